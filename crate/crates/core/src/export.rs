//! CSV tables and versioned JSON envelopes for computed artifacts.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::eigenfunctions::EdgeProfile;
use crate::orthopoly::QuadratureMeasure;
use crate::spectra::infinite::BandStructure;
use crate::spectra::{RogueRow, SpectrumReport, Tag, TreeSpectrum};
use crate::transfer::SpiralPoint;
use crate::zerosets::CurveComponent;
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Every JSON artifact: schema version, the configuration that produced it, the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, T> {
    pub schema_version: u32,
    pub config: C,
    pub result: T,
}

impl<C, T> Envelope<C, T> {
    pub fn new(config: C, result: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            config,
            result,
        }
    }
}

pub fn write_json<W: Write, V: Serialize>(w: W, value: &V) -> Result<()> {
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn finish<W: Write>(mut wr: csv::Writer<W>) -> Result<()> {
    wr.flush()?;
    Ok(())
}

/// Short text form of a tag, e.g. `cluster:2:0`, `intermediate:3:minus`.
pub fn tag_label(tag: &Tag) -> String {
    match tag {
        Tag::Cluster { k, position } => format!("cluster:{k}:{position}"),
        Tag::Intermediate { k, side: None } => format!("intermediate:{k}"),
        Tag::Intermediate { k, side: Some(s) } => {
            format!("intermediate:{k}:{}", format!("{s:?}").to_lowercase())
        }
        Tag::Rogue { kind } => format!("rogue:{}", format!("{kind:?}").to_lowercase()),
        Tag::DirichletPoint { k } => format!("dirichlet_point:{k}"),
        Tag::Unclassified => "unclassified".into(),
    }
}

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e))
}

macro_rules! row {
    ($wr:expr, $($x:expr),+ $(,)?) => {
        $wr.write_record(&[$($x.to_string()),+]).map_err(csv_err)?
    };
}

pub fn spectrum_csv<W: Write>(w: W, r: &SpectrumReport) -> Result<()> {
    let mut wr = csv_writer(w);
    row!(wr, "rank", "lambda", "mu", "tag", "component", "regime");
    for e in &r.eigenvalues {
        let comp = e.component.map(|c| c.to_string()).unwrap_or_default();
        let regime = format!("{:?}", e.regime).to_lowercase();
        row!(
            wr,
            e.rank,
            e.lambda,
            crate::mu_of_lambda(e.lambda),
            tag_label(&e.tag),
            comp,
            regime
        );
    }
    finish(wr)
}

pub fn tree_csv<W: Write>(w: W, t: &TreeSpectrum) -> Result<()> {
    let mut wr = csv_writer(w);
    row!(wr, "lambda", "multiplicity", "origins");
    for e in &t.entries {
        let origins: Vec<String> = e
            .origins
            .iter()
            .map(|o| match o {
                crate::spectra::tree::Origin::Robin => "B".to_string(),
                crate::spectra::tree::Origin::Dirichlet { m } => format!("D{m}"),
            })
            .collect();
        row!(wr, e.lambda, e.multiplicity, origins.join(";"));
    }
    finish(wr)
}

pub fn spiral_csv<W: Write>(w: W, pts: &[SpiralPoint]) -> Result<()> {
    let mut wr = csv_writer(w);
    row!(wr, "mu", "lambda", "y", "z");
    for p in pts {
        row!(wr, p.mu, p.lambda, p.y, p.z);
    }
    finish(wr)
}

pub fn components_csv<W: Write>(w: W, comps: &[CurveComponent]) -> Result<()> {
    let mut wr = csv_writer(w);
    row!(wr, "k", "kind", "z", "y");
    for c in comps {
        let kind = format!("{:?}", c.kind).to_lowercase();
        for &(z, y) in &c.points {
            row!(wr, c.k, kind, z, y);
        }
    }
    finish(wr)
}

pub fn quadrature_csv<W: Write>(w: W, m: &QuadratureMeasure) -> Result<()> {
    let mut wr = csv_writer(w);
    row!(wr, "kind", "index", "node", "value");
    for (i, (x, wt)) in m.nodes.iter().zip(&m.weights).enumerate() {
        row!(wr, "weight", i, x, wt);
    }
    for (k, mu) in m.moments.iter().enumerate() {
        row!(wr, "moment", k, "", mu);
    }
    finish(wr)
}

pub fn bands_csv<W: Write>(w: W, b: &BandStructure) -> Result<()> {
    let mut wr = csv_writer(w);
    row!(wr, "band", "lambda_lo", "lambda_hi", "mu_lo", "mu_hi");
    for (i, &(lo, hi)) in b.bands.iter().enumerate() {
        row!(
            wr,
            i,
            lo,
            hi,
            crate::mu_of_lambda(lo),
            crate::mu_of_lambda(hi)
        );
    }
    finish(wr)
}

pub fn rogue_csv<W: Write>(w: W, rows: &[RogueRow]) -> Result<()> {
    let mut wr = csv_writer(w);
    row!(
        wr,
        "alpha",
        "lambda_double",
        "lambda_minus",
        "center",
        "width",
        "residual_double",
        "residual_minus",
        "residual_center",
        "width_bound"
    );
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        row!(
            wr,
            r.alpha,
            r.lambda_double,
            opt(r.lambda_minus),
            r.center,
            r.width,
            r.residual_double,
            opt(r.residual_minus),
            r.residual_center,
            r.width_bound
        );
    }
    finish(wr)
}

pub fn edge_profiles_csv<W: Write>(w: W, profiles: &[EdgeProfile]) -> Result<()> {
    let mut wr = csv_writer(w);
    row!(wr, "edge", "x", "global_x", "u");
    for p in profiles {
        for (x, u) in p.x.iter().zip(&p.u) {
            row!(wr, p.k, x, (p.k - 1) as f64 + x, u);
        }
    }
    finish(wr)
}
