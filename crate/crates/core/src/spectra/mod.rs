//! Linear-graph spectra with cluster / intermediate / rogue tags, full-tree
//! spectra, Dirichlet-point multiplicity, rogue trajectories and the
//! semi-infinite tree.
//!
//! Eigenvalues are located by bisection on the counting function of
//! [`count::Counter`], so every eigenvalue carries its global rank `i`
//! (`i` eigenvalues lie strictly below it).  Tags follow from the rank:
//!
//! * Robin root, `α ≠ 0`: `λ^= = e₀`, `λ^− = e₁`, `Σ^0 = e₂..e_{n−1}`,
//!   `λ^k = e_{kn}`, `Σ^k = e_{kn+1}..e_{(k+1)n−1}`.
//! * Dirichlet root, `α ≠ 0`: `λ̊^= = e₀`, `Σ̊^0 = e₁..e_{n−2}`,
//!   `λ̊^k_− = e_{kn−1}`, `λ̊^k_+ = e_{kn}`, `Σ̊^k = e_{kn+1}..e_{kn+n−2}`.
//!
//! For `α = 0` the rogue slots join `Σ^0`.

pub mod count;
pub mod infinite;
pub mod multiplicity;
pub mod rogue;
pub mod tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::{GraphParams, RootCondition};
use crate::eigenfunctions::{regime_at, Regime};
use crate::potential::Potential;
use crate::transfer::transfer_at;
use crate::zerosets::{first_index, y_roots_at};
use crate::{Error, Result};
use count::Counter;
pub use infinite::{infinite_bands, infinite_point_spectrum, BandStructure};
pub use multiplicity::{dirichlet_multiplicity, DirichletMultiplicity};
pub use rogue::{rogue_trajectory, RogueRow};
pub use tree::{tree_spectrum, TreeEigenvalue, TreeSpectrum};

/// Relative width at which a bracketed eigenvalue counts as converged.
const EIG_RTOL: f64 = 1e-14;
const EIG_ATOL: f64 = 1e-13;
/// Offset of window split points from `λ_D^k`, relative.
const SPLIT_OFFSET: f64 = 1e-9;
/// Distance (relative) within which an eigenvalue sits on `λ_D^k`.
const DIRICHLET_HIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RogueKind {
    /// `λ^=` (Robin root) or `λ̊^=` (Dirichlet root).
    Double,
    /// `λ^−`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Tag {
    /// Member `position` (0-based) of `Σ^k`.
    Cluster {
        k: usize,
        position: usize,
    },
    /// `λ^k` (no side) or `λ̊^k_±`.
    Intermediate {
        k: usize,
        side: Option<Side>,
    },
    Rogue {
        kind: RogueKind,
    },
    /// An intermediate eigenvalue sitting exactly on `λ_D^k`.
    DirichletPoint {
        k: usize,
    },
    /// `n = 1`: no classification applies.
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaggedEigenvalue {
    pub lambda: f64,
    /// Number of eigenvalues strictly below.
    pub rank: usize,
    pub tag: Tag,
    /// Index `j` of the zero-set component `C_n^j` through `(c(λ), s(λ))`.
    pub component: Option<usize>,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub k: usize,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: GraphParams,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub dirichlet: Vec<f64>,
    pub eigenvalues: Vec<TaggedEigenvalue>,
    pub clusters: Vec<ClusterSummary>,
    pub dirichlet_flags: Vec<DirichletMultiplicity>,
    /// Window counts were asserted (`n ≥ 3`).
    pub counts_checked: bool,
}

impl SpectrumReport {
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.lambda).collect()
    }

    pub fn cluster(&self, k: usize) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .filter(|e| matches!(e.tag, Tag::Cluster { k: kk, .. } if kk == k))
            .map(|e| e.lambda)
            .collect()
    }

    pub fn rogue(&self, kind: RogueKind) -> Option<f64> {
        self.eigenvalues
            .iter()
            .find(|e| e.tag == Tag::Rogue { kind })
            .map(|e| e.lambda)
    }

    pub fn intermediate(&self, k: usize, side: Option<Side>) -> Option<f64> {
        self.eigenvalues
            .iter()
            .find(|e| match e.tag {
                Tag::Intermediate { k: kk, side: s } => kk == k && s == side,
                Tag::DirichletPoint { k: kk } => kk == k && side.is_none(),
                _ => false,
            })
            .map(|e| e.lambda)
    }

    pub fn summary(&self, k: usize) -> Option<&ClusterSummary> {
        self.clusters.iter().find(|c| c.k == k)
    }
}

/// An energy below every eigenvalue.
pub fn lower_bound(counter: &Counter) -> Result<f64> {
    let p = &counter.params;
    let mut lo = -1.5 * p.alpha * p.alpha - 10.0 + counter.q.min_value().min(0.0);
    for _ in 0..60 {
        if counter.count(lo)? == 0 {
            return Ok(lo);
        }
        lo *= 2.0;
    }
    Err(Error::RootSearch(
        "no energy below the spectrum found".into(),
    ))
}

/// All eigenvalues `≤ lambda_max`, with ranks, by recursive count bisection.
pub fn eigenvalues_below(counter: &Counter, lambda_max: f64) -> Result<Vec<(usize, f64)>> {
    let lo = lower_bound(counter)?;
    // split points just below each λ_D so windows are independent
    let mut cuts = vec![lo];
    cuts.extend(
        counter
            .dirichlet
            .iter()
            .filter(|&&d| d < lambda_max && d > lo)
            .map(|&d| d - SPLIT_OFFSET * d.abs().max(1.0)),
    );
    cuts.push(lambda_max);
    let counts: Vec<usize> = cuts
        .par_iter()
        .map(|&x| counter.count(x))
        .collect::<Result<_>>()?;
    let mut out: Vec<Vec<(usize, f64)>> = cuts
        .par_windows(2)
        .zip(counts.par_windows(2))
        .map(|(x, c)| {
            let mut v = Vec::new();
            isolate(counter, x[0], c[0], x[1], c[1], &mut v)?;
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<(usize, f64)> = out.iter_mut().flat_map(std::mem::take).collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(all)
}

fn converged(a: f64, b: f64) -> bool {
    b - a <= EIG_ATOL + EIG_RTOL * a.abs().max(b.abs()) || (a + b) / 2.0 == a || (a + b) / 2.0 == b
}

fn isolate(
    counter: &Counter,
    a: f64,
    na: usize,
    b: f64,
    nb: usize,
    out: &mut Vec<(usize, f64)>,
) -> Result<()> {
    if nb <= na {
        return Ok(());
    }
    if converged(a, b) {
        let m = 0.5 * (a + b);
        out.extend((na..nb).map(|i| (i, m)));
        return Ok(());
    }
    let m = 0.5 * (a + b);
    let nm = counter.count(m)?;
    // counts must be monotone; clamp roundoff wobble inside a converging bracket
    let nm = nm.clamp(na, nb);
    isolate(counter, a, na, m, nm, out)?;
    isolate(counter, m, nm, b, nb, out)
}

/// Zero-set component through `(c(λ), s(λ))`.
fn component_of(params: &GraphParams, lambda: f64, q: &Potential) -> Result<Option<usize>> {
    let t = transfer_at(q, lambda)?;
    if t.log_scale > 600.0 {
        return Ok(None);
    }
    let (c, s) = (t.c(), t.s());
    let ys = y_roots_at(params, s);
    let j = ys
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - c).abs().total_cmp(&(b.1 - c).abs()))
        .map(|(j, _)| j + first_index(params));
    Ok(j)
}

/// Tag for rank `i`.
pub fn tag_for_rank(params: &GraphParams, i: usize) -> Tag {
    let n = params.n;
    if n == 1 {
        return Tag::Unclassified;
    }
    let rogue = params.alpha != 0.0;
    match params.root_condition {
        RootCondition::Robin => {
            if i < n {
                return match (rogue, i) {
                    (true, 0) => Tag::Rogue {
                        kind: RogueKind::Double,
                    },
                    (true, 1) => Tag::Rogue {
                        kind: RogueKind::Minus,
                    },
                    (true, _) => Tag::Cluster {
                        k: 0,
                        position: i - 2,
                    },
                    (false, _) => Tag::Cluster { k: 0, position: i },
                };
            }
            let (k, r) = (i / n, i % n);
            if r == 0 {
                Tag::Intermediate { k, side: None }
            } else {
                Tag::Cluster { k, position: r - 1 }
            }
        }
        RootCondition::Dirichlet => {
            if i + 1 < n {
                return match (rogue, i) {
                    (true, 0) => Tag::Rogue {
                        kind: RogueKind::Double,
                    },
                    (true, _) => Tag::Cluster {
                        k: 0,
                        position: i - 1,
                    },
                    (false, _) => Tag::Cluster { k: 0, position: i },
                };
            }
            let j = i + 1;
            let (k, r) = (j / n, j % n);
            match r {
                0 => Tag::Intermediate {
                    k,
                    side: Some(Side::Minus),
                },
                1 => Tag::Intermediate {
                    k,
                    side: Some(Side::Plus),
                },
                _ => Tag::Cluster { k, position: r - 2 },
            }
        }
    }
}

fn check_windows(counter: &Counter, lambda_max: f64) -> Result<()> {
    let p = &counter.params;
    let n = p.n;
    for (idx, &d) in counter.dirichlet.iter().enumerate() {
        if d >= lambda_max {
            break;
        }
        let k = idx + 1;
        let below = counter.count(d - SPLIT_OFFSET * d.abs().max(1.0))?;
        let above = counter.count(d + SPLIT_OFFSET * d.abs().max(1.0))?;
        let ok = match p.root_condition {
            RootCondition::Robin => {
                (below == k * n || below == k * n + 1) && (above == k * n || above == k * n + 1)
            }
            RootCondition::Dirichlet => below == k * n && above == k * n,
        };
        if !ok {
            let expected = match p.root_condition {
                RootCondition::Robin => format!("{} or {}", k * n, k * n + 1),
                RootCondition::Dirichlet => format!("{}", k * n),
            };
            return Err(Error::CountMismatch {
                window: format!("λ_D^{k} = {d}"),
                expected,
                found: below.max(above),
            });
        }
    }
    Ok(())
}

/// Eigenvalues of `B_n` / `B̊_n` in `[lambda_min, lambda_max]`, classified.
/// The window is extended downward to the bottom of the spectrum.
pub fn linear_spectrum(
    params: &GraphParams,
    q: &Potential,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<SpectrumReport> {
    if !(lambda_min < lambda_max) {
        return Err(Error::Precondition(format!(
            "empty window [{lambda_min}, {lambda_max}]"
        )));
    }
    let counter = Counter::new(*params, q, lambda_max * 1.2 + 50.0)?;
    let ground = lower_bound(&counter)?;
    let lambda_min = lambda_min.min(ground);
    let found = eigenvalues_below(&counter, lambda_max)?;
    let counts_checked = params.n >= 3;
    if counts_checked {
        check_windows(&counter, lambda_max)?;
    }
    for w in found.windows(2) {
        if !(w[1].1 > w[0].1) {
            log::warn!(
                "eigenvalues of rank {} and {} coincide at {}",
                w[0].0,
                w[1].0,
                w[0].1
            );
        }
    }
    let dirichlet: Vec<f64> = counter
        .dirichlet
        .iter()
        .copied()
        .filter(|&d| d <= lambda_max)
        .collect();
    let flags = if params.root_condition == RootCondition::Robin {
        (1..=dirichlet.len())
            .into_par_iter()
            .map(|k| multiplicity::multiplicity_at(params, q, k, dirichlet[k - 1]))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let eigenvalues = found
        .par_iter()
        .map(|&(rank, lambda)| {
            let mut tag = tag_for_rank(params, rank);
            if let Tag::Intermediate { k, side: None } = tag {
                let hit = dirichlet
                    .get(k - 1)
                    .is_some_and(|&d| (lambda - d).abs() <= DIRICHLET_HIT * d.abs().max(1.0));
                if hit && flags.get(k - 1).is_some_and(|f| f.eigenvalue) {
                    tag = Tag::DirichletPoint { k };
                }
            }
            let t = transfer_at(q, lambda)?;
            Ok(TaggedEigenvalue {
                lambda,
                rank,
                tag,
                component: component_of(params, lambda, q)?,
                regime: regime_at(params, &t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let clusters = summarize(&eigenvalues);
    Ok(SpectrumReport {
        params: *params,
        lambda_min,
        lambda_max,
        dirichlet,
        eigenvalues,
        clusters,
        dirichlet_flags: flags,
        counts_checked,
    })
}

fn summarize(eigs: &[TaggedEigenvalue]) -> Vec<ClusterSummary> {
    let mut out: Vec<ClusterSummary> = Vec::new();
    for e in eigs {
        if let Tag::Cluster { k, .. } = e.tag {
            match out.iter_mut().find(|c| c.k == k) {
                Some(c) => {
                    c.count += 1;
                    c.min = c.min.min(e.lambda);
                    c.max = c.max.max(e.lambda);
                    c.width = c.max - c.min;
                }
                None => out.push(ClusterSummary {
                    k,
                    count: 1,
                    min: e.lambda,
                    max: e.lambda,
                    width: 0.0,
                }),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
