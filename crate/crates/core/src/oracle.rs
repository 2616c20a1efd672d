//! Finite-difference ground truth for the linear graphs and for small full trees.
//!
//! Each unit edge is split into `N = 1/h` cells with piecewise-linear elements
//! and a lumped (diagonal) mass, so the discrete problem is `K u = λ M u` with
//! `K` symmetric and `M` diagonal.  The quadratic form is
//! `Σ_e w_e ∫ (|u'|² + q|u|²) + α Σ_v ω_v |u(v)|²`; its natural conditions are
//! the Robin vertex conditions.  On the linear graph edge `k` and vertex `k`
//! carry weight `b^k`; on the tree every weight is one.
//!
//! The unknowns always form a tree (a path for the linear graph), so leaf-first
//! `LDLᵀ` of `K − σM` has no fill and its negative pivots count the
//! eigenvalues below `σ`.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::{GraphParams, RootCondition};
use crate::potential::Potential;
use crate::spectra::tree_spectrum;
use crate::{Error, Result};

/// Unknown count above which [`fd_tree`] refuses to assemble.
pub const TREE_SIZE_CAP: usize = 200_000;
/// Largest problem handed to the dense eigensolver.
pub const DENSE_CAP: usize = 1200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Linear {
        n: usize,
        b: f64,
        root_condition: RootCondition,
    },
    Tree {
        n: usize,
        b: usize,
    },
}

/// `K` and `M` on a tree of unknowns; node `i` couples only to `parent[i] < i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator {
    pub h: f64,
    pub geometry: Geometry,
    pub stiffness_diag: Vec<f64>,
    /// `K[i, parent[i]]`.
    pub stiffness_parent: Vec<f64>,
    pub parent: Vec<Option<usize>>,
    pub mass: Vec<f64>,
}

struct Builder {
    diag: Vec<f64>,
    off: Vec<f64>,
    parent: Vec<Option<usize>>,
    mass: Vec<f64>,
}

impl Builder {
    fn node(&mut self, parent: Option<usize>) -> usize {
        self.diag.push(0.0);
        self.off.push(0.0);
        self.parent.push(parent);
        self.mass.push(0.0);
        self.diag.len() - 1
    }

    /// Chain of `cells − 1` interior nodes from `start` to a new end node.
    fn edge(&mut self, start: usize, cells: usize, weight: f64, q: &Potential) -> usize {
        let h = 1.0 / cells as f64;
        let mut prev = start;
        for j in 0..cells {
            let next = self.node(Some(prev));
            let qe = q.value_at((j as f64 + 0.5) * h);
            let stiff = weight / h;
            let lump = 0.5 * weight * h;
            self.diag[prev] += stiff + lump * qe;
            self.diag[next] += stiff + lump * qe;
            self.off[next] = -stiff;
            self.mass[prev] += lump;
            self.mass[next] += lump;
            prev = next;
        }
        prev
    }
}

/// Warns when a potential jump falls inside a cell; the scheme then drops to first order.
fn check_alignment(q: &Potential, cells: usize) {
    if !matches!(q, Potential::PiecewiseConstant { .. }) {
        return;
    }
    for x in q.knots() {
        let t = x * cells as f64;
        if (t - t.round()).abs() > 1e-9 {
            log::warn!("potential jump at x = {x} is not a mesh node for 1/h = {cells}");
        }
    }
}

fn cells_for(h: f64) -> Result<usize> {
    if !(h > 0.0 && h <= 1.0 / 16.0) {
        return Err(Error::InvalidParams(format!(
            "mesh size {h} must lie in (0, 1/16]"
        )));
    }
    let cells = (1.0 / h).round() as usize;
    if ((cells as f64) * h - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!(
            "1/h = {} is not an integer",
            1.0 / h
        )));
    }
    Ok(cells)
}

/// Drops node 0 (Dirichlet root) and renumbers.
fn drop_root(op: DiscretizedOperator) -> DiscretizedOperator {
    let shift = |p: Option<usize>| p.and_then(|i| i.checked_sub(1));
    DiscretizedOperator {
        stiffness_diag: op.stiffness_diag[1..].to_vec(),
        stiffness_parent: op.stiffness_parent[1..]
            .iter()
            .zip(&op.parent[1..])
            .map(|(k, p)| if *p == Some(0) { 0.0 } else { *k })
            .collect(),
        parent: op.parent[1..]
            .iter()
            .map(|&p| if p == Some(0) { None } else { shift(p) })
            .collect(),
        mass: op.mass[1..].to_vec(),
        ..op
    }
}

pub fn discretize_linear(
    params: &GraphParams,
    q: &Potential,
    h: f64,
) -> Result<DiscretizedOperator> {
    let cells = cells_for(h)?;
    check_alignment(q, cells);
    let (n, b, alpha) = (params.n, params.b, params.alpha);
    let mut bl = Builder {
        diag: Vec::new(),
        off: Vec::new(),
        parent: Vec::new(),
        mass: Vec::new(),
    };
    let mut v = bl.node(None);
    bl.diag[v] += alpha;
    for k in 1..=n {
        let w = b.powi(k as i32);
        v = bl.edge(v, cells, w, q);
        bl.diag[v] += alpha * w;
    }
    let op = DiscretizedOperator {
        h: 1.0 / cells as f64,
        geometry: Geometry::Linear {
            n,
            b,
            root_condition: params.root_condition,
        },
        stiffness_diag: bl.diag,
        stiffness_parent: bl.off,
        parent: bl.parent,
        mass: bl.mass,
    };
    Ok(match params.root_condition {
        RootCondition::Robin => op,
        RootCondition::Dirichlet => drop_root(op),
    })
}

/// Unknowns of the full tree with `n` levels and branching `b` at mesh `h`.
pub fn tree_size(n: usize, b: usize, h: f64) -> Result<usize> {
    let cells = cells_for(h)?;
    let edges: usize = (1..=n as u32).map(|l| b.pow(l)).sum();
    Ok(1 + edges * cells)
}

pub fn discretize_tree(
    n: usize,
    b: usize,
    alpha: f64,
    q: &Potential,
    h: f64,
) -> Result<DiscretizedOperator> {
    if n == 0 || b < 2 {
        return Err(Error::InvalidParams(format!(
            "tree needs n ≥ 1 and b ≥ 2, got n = {n}, b = {b}"
        )));
    }
    let size = tree_size(n, b, h)?;
    if size > TREE_SIZE_CAP {
        return Err(Error::SizeCap {
            size,
            cap: TREE_SIZE_CAP,
        });
    }
    let cells = cells_for(h)?;
    check_alignment(q, cells);
    let mut bl = Builder {
        diag: Vec::new(),
        off: Vec::new(),
        parent: Vec::new(),
        mass: Vec::new(),
    };
    let root = bl.node(None);
    bl.diag[root] += alpha;
    let mut level = vec![root];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * b);
        for &v in &level {
            for _ in 0..b {
                let child = bl.edge(v, cells, 1.0, q);
                bl.diag[child] += alpha;
                next.push(child);
            }
        }
        level = next;
    }
    Ok(DiscretizedOperator {
        h: 1.0 / cells as f64,
        geometry: Geometry::Tree { n, b },
        stiffness_diag: bl.diag,
        stiffness_parent: bl.off,
        parent: bl.parent,
        mass: bl.mass,
    })
}

impl DiscretizedOperator {
    pub fn size(&self) -> usize {
        self.mass.len()
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut d: Vec<f64> = self
            .stiffness_diag
            .iter()
            .zip(&self.mass)
            .map(|(k, m)| k - sigma * m)
            .collect();
        let mut neg = 0;
        for i in (0..self.size()).rev() {
            let mut di = d[i];
            if di == 0.0 {
                di = -f64::EPSILON
                    * (self.stiffness_diag[i].abs() + sigma.abs() * self.mass[i])
                        .max(f64::MIN_POSITIVE);
            }
            if di < 0.0 {
                neg += 1;
            }
            if let Some(p) = self.parent[i] {
                let k = self.stiffness_parent[i];
                d[p] -= k * k / di;
            }
        }
        neg
    }

    /// Gershgorin interval for the eigenvalues of `M^{-1/2} K M^{-1/2}`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut radius = vec![0.0; n];
        for i in 0..n {
            if let Some(p) = self.parent[i] {
                let r = self.stiffness_parent[i].abs() / (self.mass[i] * self.mass[p]).sqrt();
                radius[i] += r;
                radius[p] += r;
            }
        }
        (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let c = self.stiffness_diag[i] / self.mass[i];
            (lo.min(c - radius[i]), hi.max(c + radius[i]))
        })
    }

    /// The `m` lowest eigenvalues by inertia bisection.
    pub fn lowest(&self, m: usize) -> Result<Vec<f64>> {
        if m > self.size() {
            return Err(Error::InvalidParams(format!(
                "{m} eigenvalues requested from {} unknowns",
                self.size()
            )));
        }
        let (lo, hi) = self.gershgorin();
        let (lo, hi) = (lo - 1.0 - 1e-9 * lo.abs(), hi + 1.0 + 1e-9 * hi.abs());
        if self.count_below(lo) != 0 || self.count_below(hi) != self.size() {
            return Err(Error::RootSearch(
                "inertia counts disagree with the Gershgorin bounds".into(),
            ));
        }
        Ok((0..m)
            .into_par_iter()
            .map(|i| {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid == a || mid == b || b - a <= 1e-14 * mid.abs().max(1.0) {
                        break;
                    }
                    if self.count_below(mid) > i {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect())
    }

    fn dense_scaled(&self) -> Result<DMatrix<f64>> {
        let n = self.size();
        if n > DENSE_CAP {
            return Err(Error::SizeCap {
                size: n,
                cap: DENSE_CAP,
            });
        }
        let mut s = DMatrix::zeros(n, n);
        for i in 0..n {
            s[(i, i)] = self.stiffness_diag[i] / self.mass[i];
            if let Some(p) = self.parent[i] {
                let v = self.stiffness_parent[i] / (self.mass[i] * self.mass[p]).sqrt();
                s[(i, p)] = v;
                s[(p, i)] = v;
            }
        }
        Ok(s)
    }

    /// Dense eigenpairs; returns sorted eigenvalues and `max |XᵀMX − I|`
    /// over the `M`-normalized eigenvectors.
    pub fn dense_check(&self) -> Result<(Vec<f64>, f64)> {
        let eig = SymmetricEigen::new(self.dense_scaled()?);
        let n = self.size();
        let mut x = eig.eigenvectors.clone();
        for i in 0..n {
            let w = 1.0 / self.mass[i].sqrt();
            x.row_mut(i).iter_mut().for_each(|v| *v *= w);
        }
        let mx = DMatrix::from_fn(n, n, |i, j| self.mass[i] * x[(i, j)]);
        let gram = x.transpose() * mx;
        let defect = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok((vals, defect))
    }

    /// Coordinate listing (`K i j value`, `M i i value`), one entry per line, 0-based.
    pub fn write_coo<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# size {} h {}", self.size(), self.h)?;
        for i in 0..self.size() {
            writeln!(w, "K {i} {i} {:.17e}", self.stiffness_diag[i])?;
            if let Some(p) = self.parent[i] {
                writeln!(w, "K {i} {p} {:.17e}", self.stiffness_parent[i])?;
                writeln!(w, "K {p} {i} {:.17e}", self.stiffness_parent[i])?;
            }
        }
        for i in 0..self.size() {
            writeln!(w, "M {i} {i} {:.17e}", self.mass[i])?;
        }
        Ok(())
    }
}

/// Raw values at `h` and `h/2` and the extrapolation `(4λ_{h/2} − λ_h)/3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub h: f64,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub extrapolated: Vec<f64>,
}

fn richardson(coarse: Vec<f64>, fine: Vec<f64>, h: f64) -> Richardson {
    let extrapolated = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect();
    Richardson {
        h,
        coarse,
        fine,
        extrapolated,
    }
}

pub fn fd_linear(params: &GraphParams, q: &Potential, h: f64, m: usize) -> Result<Vec<f64>> {
    let op = discretize_linear(params, q, h)?;
    if m > op.size() / 4 {
        return Err(Error::InvalidParams(format!(
            "m = {m} exceeds a quarter of {} unknowns",
            op.size()
        )));
    }
    op.lowest(m)
}

pub fn fd_linear_richardson(
    params: &GraphParams,
    q: &Potential,
    h: f64,
    m: usize,
) -> Result<Richardson> {
    let (c, f) = rayon::join(
        || fd_linear(params, q, h, m),
        || fd_linear(params, q, 0.5 * h, m),
    );
    Ok(richardson(c?, f?, h))
}

pub fn fd_tree(
    n: usize,
    b: usize,
    alpha: f64,
    q: &Potential,
    h: f64,
    m: usize,
) -> Result<Vec<f64>> {
    let op = discretize_tree(n, b, alpha, q, h)?;
    op.lowest(m.min(op.size()))
}

pub fn fd_tree_richardson(
    n: usize,
    b: usize,
    alpha: f64,
    q: &Potential,
    h: f64,
    m: usize,
) -> Result<Richardson> {
    let (c, f) = rayon::join(
        || fd_tree(n, b, alpha, q, h, m),
        || fd_tree(n, b, alpha, q, 0.5 * h, m),
    );
    Ok(richardson(c?, f?, h))
}

/// Groups of nearly equal values, as `(mean, count)`.
pub fn cluster_values(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &v in values {
        match out.last_mut() {
            Some((mean, count)) if v - last <= tol * v.abs().max(1.0) => {
                *mean = (*mean * *count as f64 + v) / (*count + 1) as f64;
                *count += 1;
            }
            _ => out.push((v, 1)),
        }
        last = v;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityMismatch {
    pub lambda: f64,
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub b: usize,
    pub alpha: f64,
    pub fd: Vec<f64>,
    pub assembled: Vec<f64>,
    pub max_deviation: f64,
    /// `(λ, multiplicity)` of each complete group in the FD multiset.
    pub fd_groups: Vec<(f64, usize)>,
    pub mismatches: Vec<MultiplicityMismatch>,
}

/// FD tree eigenvalues (Richardson from `h`, `h/2`) against the assembled
/// linear-graph spectra, lowest `m` of each multiset.
pub fn decomposition_check(
    n: usize,
    b: usize,
    alpha: f64,
    q: &Potential,
    m: usize,
    h: f64,
) -> Result<DecompositionReport> {
    let params = GraphParams::robin(n, b as f64, alpha)?;
    let fd = fd_tree_richardson(n, b, alpha, q, h, m + 1)?.extrapolated;
    let mut top = fd[m].abs().max(10.0) * 1.5 + 10.0;
    let assembled = loop {
        let ts = tree_spectrum(&params, q, fd[0] - 1.0, top)?;
        let all = ts.expanded();
        if all.len() > m {
            break (all, ts);
        }
        top = 2.0 * top + 10.0;
    };
    let (all, ts) = assembled;
    let fd_m = &fd[..m];
    let an_m = &all[..m];
    let max_deviation = fd_m
        .iter()
        .zip(an_m)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut groups = cluster_values(&fd, 1e-6);
    // the group straddling the cut-off may be incomplete
    groups.pop();
    let mut mismatches = Vec::new();
    for &(lambda, found) in &groups {
        let expected = ts
            .entries
            .iter()
            .filter(|e| (e.lambda - lambda).abs() <= 1e-4 * lambda.abs().max(1.0))
            .map(|e| e.multiplicity)
            .sum();
        if expected != found {
            mismatches.push(MultiplicityMismatch {
                lambda,
                expected,
                found,
            });
        }
    }
    Ok(DecompositionReport {
        n,
        b,
        alpha,
        fd: fd_m.to_vec(),
        assembled: an_m.to_vec(),
        max_deviation,
        fd_groups: groups,
        mismatches,
    })
}
