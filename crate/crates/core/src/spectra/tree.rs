//! Spectrum of the full regular tree as the union of linear-graph spectra:
//! `σ(B_n)` once and `σ(B̊_m)` with multiplicity `(b−1)b^{n−m}`, `m = 1..n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear_spectrum;
use crate::determinants::{GraphParams, RootCondition};
use crate::potential::Potential;
use crate::{Error, Result};

/// Entries closer than this are merged and flagged.
pub const COLLISION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "graph", rename_all = "snake_case")]
pub enum Origin {
    /// `B_n`.
    Robin,
    /// `B̊_m`.
    Dirichlet { m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEigenvalue {
    pub lambda: f64,
    pub multiplicity: usize,
    pub origins: Vec<Origin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSpectrum {
    pub params: GraphParams,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub entries: Vec<TreeEigenvalue>,
    /// Entries that combine more than one linear graph.
    pub collisions: Vec<f64>,
}

impl TreeSpectrum {
    /// Eigenvalues repeated by multiplicity, increasing.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.lambda, e.multiplicity))
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

pub fn origin_multiplicity(params: &GraphParams, origin: Origin) -> usize {
    match origin {
        Origin::Robin => 1,
        Origin::Dirichlet { m } => {
            let b = params.b.round() as usize;
            (b - 1) * b.pow((params.n - m) as u32)
        }
    }
}

pub fn tree_spectrum(
    params: &GraphParams,
    q: &Potential,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<TreeSpectrum> {
    if params.root_condition != RootCondition::Robin {
        return Err(Error::Precondition(
            "tree spectra need the Robin root condition".into(),
        ));
    }
    if params.b.fract() != 0.0 || params.b < 2.0 {
        return Err(Error::Precondition(format!(
            "tree spectra need an integer b ≥ 2, got {}",
            params.b
        )));
    }
    let jobs: Vec<(Origin, GraphParams)> = std::iter::once((Origin::Robin, *params))
        .chain((1..=params.n).map(|m| {
            (
                Origin::Dirichlet { m },
                params.with_n(m).with_root(RootCondition::Dirichlet),
            )
        }))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|(o, p)| Ok((*o, linear_spectrum(p, q, lambda_min, lambda_max)?)))
        .collect::<Result<Vec<_>>>()?;
    let lambda_min = parts
        .iter()
        .map(|(_, r)| r.lambda_min)
        .fold(lambda_min, f64::min);
    let mut flat: Vec<(f64, Origin)> = parts
        .iter()
        .flat_map(|(o, r)| r.eigenvalues.iter().map(move |e| (e.lambda, *o)))
        .filter(|(l, _)| *l >= lambda_min && *l <= lambda_max)
        .collect();
    flat.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut entries: Vec<TreeEigenvalue> = Vec::new();
    let mut collisions = Vec::new();
    for (l, o) in flat {
        let mult = origin_multiplicity(params, o);
        match entries.last_mut() {
            Some(e) if (l - e.lambda).abs() <= COLLISION_TOL => {
                e.multiplicity += mult;
                e.origins.push(o);
                if collisions.last() != Some(&e.lambda) {
                    collisions.push(e.lambda);
                    log::warn!(
                        "linear-graph spectra collide at λ = {}; disjointness fails",
                        e.lambda
                    );
                }
            }
            _ => entries.push(TreeEigenvalue {
                lambda: l,
                multiplicity: mult,
                origins: vec![o],
            }),
        }
    }
    Ok(TreeSpectrum {
        params: *params,
        lambda_min,
        lambda_max,
        entries,
        collisions,
    })
}
