//! Spectra of finite regular rooted quantum trees with Robin (δ-type) vertex
//! conditions.
//!
//! A regular tree with `n` levels and branching factor `b` carrying the
//! operator `-d²/dx² + q(x)` on every unit edge decomposes into weighted
//! linear graphs.  Their eigenvalues are the intersections of the spiral
//! curve `λ ↦ (c(λ), s(λ))` with the zero sets of the secular determinants
//! `D_n(y, z)` and `D̊_n(y, z)`, which are built from the orthogonal
//! polynomials `P_n`, `Q_n` in `v = (b+1)y + αz`.
//!
//! Module map:
//!
//! * [`potential`], [`transfer`]: edge potential, `c(λ)`, `s(λ)`, Dirichlet spectrum.
//! * [`orthopoly`]: `P_n`, `Q_n`, roots, Gaussian quadrature and moments.
//! * [`determinants`]: `D_n`, `D̊_n` by recurrence, by `P/Q` and by matrix determinant.
//! * [`zerosets`]: component curves of the zero sets, strips, rogue asymptotes.
//! * [`spectra`]: classified linear-graph spectra, tree spectra, semi-infinite trees.
//! * [`eigenfunctions`]: vertex values, regimes, edge reconstruction, residuals.
//! * [`oracle`]: finite-difference discretizations used as ground truth.

pub mod determinants;
pub mod eigenfunctions;
mod error;
pub mod export;
pub mod oracle;
pub mod orthopoly;
pub mod potential;
pub mod roots;
pub mod scaled;
pub mod spectra;
pub mod transfer;
pub mod zerosets;

pub use determinants::{GraphParams, RootCondition, SecularValue};
pub use error::{Error, Result};
pub use orthopoly::{PolyParams, QuadratureMeasure};
pub use potential::Potential;
pub use scaled::Scaled;
pub use spectra::{SpectrumReport, TaggedEigenvalue, TreeSpectrum};
pub use transfer::{DirichletSpectrum, TransferValues};

/// Canonical scan coordinate `μ = sgn(λ)·√|λ|`.
pub fn mu_of_lambda(lambda: f64) -> f64 {
    lambda.signum() * lambda.abs().sqrt()
}

/// Inverse of [`mu_of_lambda`]: `λ = |μ|·μ`.
pub fn lambda_of_mu(mu: f64) -> f64 {
    mu.abs() * mu
}
