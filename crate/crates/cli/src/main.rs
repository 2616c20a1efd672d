mod config;
mod plot;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use qtree::export::{self, Envelope};
use qtree::oracle::decomposition_check;
use qtree::orthopoly::quadrature_measure;
use qtree::spectra::infinite::{density_of_states, gap_candidates, GapEigenvalue};
use qtree::spectra::{
    infinite_bands, linear_spectrum, rogue_trajectory, tree_spectrum, BandStructure,
};
use qtree::{mu_of_lambda, PolyParams, Potential};
use serde::Serialize;

use config::{open_output, CliError, CliResult, Format, GraphArgs, OutputArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "qtree",
    version,
    about = "Spectra of regular rooted quantum trees with Robin vertex conditions"
)]
struct Cli {
    /// Worker threads for parallel sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tagged spectrum of the linear graph.
    Spectrum(SpectrumArgs),
    /// Tree spectrum with multiplicities.
    Tree(SpectrumArgs),
    /// SVG figure of the zero sets or of eigenvalues against α.
    Plot(PlotArgs),
    /// Bands, gap eigenvalues and density of states of the infinite tree.
    Bands(BandsArgs),
    /// Rogue eigenvalues and cluster width along an α sequence.
    Rogue(RogueArgs),
    /// Quadrature nodes, weights and moments of the orthogonality measure.
    Moments(MomentsArgs),
    /// Run the seeded invariant suites.
    Verify(VerifyArgs),
    /// Compare the finite-difference tree spectrum with the assembled one.
    OracleCompare(OracleArgs),
}

#[derive(Debug, Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    lambda_min: f64,
    #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
    lambda_max: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PlotKind {
    ZeroSets,
    AlphaSweep,
}

#[derive(Debug, Args, Serialize)]
struct PlotArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = PlotKind::ZeroSets)]
    kind: PlotKind,
    /// Half-width of the (z, y) window.
    #[arg(long, default_value_t = 3.0)]
    window: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    mu_min: f64,
    #[arg(long, default_value_t = 15.0, allow_hyphen_values = true)]
    mu_max: f64,
    #[arg(long, default_value_t = 2000)]
    spiral_points: usize,
    #[arg(long, default_value_t = 401)]
    trace_points: usize,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    alpha_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    alpha_max: f64,
    #[arg(long, default_value_t = 61)]
    alpha_points: usize,
    /// SVG file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the plotted data as JSON.
    #[arg(long)]
    data_out: Option<PathBuf>,
    /// Embed the generation time in the SVG metadata.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Debug, Args, Serialize)]
struct BandsArgs {
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value = "zero")]
    q: String,
    #[arg(long, default_value_t = 400.0)]
    lambda_max: f64,
    /// Density samples per band.
    #[arg(long, default_value_t = 16)]
    density_points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct RogueArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Comma-separated α values.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-10,-20,-40"
    )]
    alphas: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct MomentsArgs {
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = verify::Suite::All)]
    suite: verify::Suite,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// JSON report file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct OracleArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    b: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value = "zero")]
    q: String,
    /// Number of lowest eigenvalues compared.
    #[arg(long, default_value_t = 12)]
    m: usize,
    /// Mesh width; `1/h` should place every potential knot on a node.
    #[arg(long, default_value_t = 1.0 / 200.0)]
    h: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn emit_json<A: Serialize, T: Serialize>(
    out: &OutputArgs,
    command: &str,
    args: &A,
    q: Option<&Potential>,
    result: &T,
) -> CliResult<()> {
    let mut w = out.writer()?;
    export::write_json(
        &mut w,
        &Envelope::new(RunConfig::new(command, args, q), result),
    )?;
    w.flush()?;
    Ok(())
}

fn emit_csv(
    out: &OutputArgs,
    f: impl FnOnce(&mut dyn Write) -> qtree::Result<()>,
) -> CliResult<()> {
    let mut w = out.writer()?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn check_range(lo: f64, hi: f64, what: &str) -> CliResult<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{what}: need finite min < max, got [{lo}, {hi}]"
        )))
    }
}

fn spectrum(a: &SpectrumArgs) -> CliResult<()> {
    let (p, q) = (a.graph.params()?, a.graph.potential()?);
    check_range(a.lambda_min, a.lambda_max, "λ range")?;
    let r = linear_spectrum(&p, &q, a.lambda_min, a.lambda_max)?;
    info!("{} eigenvalues below {}", r.eigenvalues.len(), a.lambda_max);
    match a.output.format {
        Format::Json => emit_json(&a.output, "spectrum", a, Some(&q), &r),
        Format::Csv => emit_csv(&a.output, |w| export::spectrum_csv(w, &r)),
    }
}

fn tree(a: &SpectrumArgs) -> CliResult<()> {
    let (p, q) = (a.graph.params()?, a.graph.potential()?);
    check_range(a.lambda_min, a.lambda_max, "λ range")?;
    let t = tree_spectrum(&p, &q, a.lambda_min, a.lambda_max)?;
    match a.output.format {
        Format::Json => emit_json(&a.output, "tree", a, Some(&q), &t),
        Format::Csv => emit_csv(&a.output, |w| export::tree_csv(w, &t)),
    }
}

fn plot(a: &PlotArgs) -> CliResult<()> {
    let (p, q) = (a.graph.params()?, a.graph.potential()?);
    check_range(a.mu_min, a.mu_max, "μ range")?;
    if !(a.window > 0.0) {
        return Err(CliError::Config(format!(
            "window must be positive, got {}",
            a.window
        )));
    }
    let stamp = a.timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let (svg, data) = match a.kind {
        PlotKind::ZeroSets => {
            let o = plot::ZeroSetOptions {
                window: a.window,
                mu_range: (a.mu_min, a.mu_max),
                spiral_points: a.spiral_points,
                trace_points: a.trace_points,
            };
            let d = plot::zero_set_data(&p, &q, &o)?;
            (plot::zero_set_svg(&d, stamp), serde_json::to_value(&d)?)
        }
        PlotKind::AlphaSweep => {
            check_range(a.alpha_min, a.alpha_max, "α range")?;
            let d = plot::sweep_data(
                &p,
                &q,
                (a.alpha_min, a.alpha_max),
                a.alpha_points,
                (a.mu_min, a.mu_max),
            )?;
            (plot::sweep_svg(&d, stamp), serde_json::to_value(&d)?)
        }
    };
    if let Some(path) = &a.data_out {
        let mut w = open_output(Some(path))?;
        export::write_json(
            &mut w,
            &Envelope::new(RunConfig::new("plot", a, Some(&q)), data),
        )?;
        w.flush()?;
    }
    let mut w = open_output(a.out.as_ref())?;
    w.write_all(svg.as_bytes())?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DensitySample {
    band: usize,
    lambda: f64,
    mu: f64,
    density: f64,
}

#[derive(Serialize)]
struct BandsReport {
    bands: BandStructure,
    gap_roots: Vec<GapEigenvalue>,
    density: Vec<DensitySample>,
}

fn bands(a: &BandsArgs) -> CliResult<()> {
    let q = config::parse_potential(&a.q)?;
    let bands = infinite_bands(a.b, a.alpha, &q, a.lambda_max)?;
    let gap_roots = gap_candidates(a.b, a.alpha, &q, a.lambda_max)?;
    let mut density = Vec::new();
    for (i, &(lo, hi)) in bands.bands.iter().enumerate() {
        let (m0, m1) = (mu_of_lambda(lo), mu_of_lambda(hi));
        for j in 1..=a.density_points {
            let mu = m0 + (m1 - m0) * j as f64 / (a.density_points + 1) as f64;
            let lambda = qtree::lambda_of_mu(mu);
            density.push(DensitySample {
                band: i,
                lambda,
                mu,
                density: density_of_states(a.b, a.alpha, &q, lambda)?,
            });
        }
    }
    match a.output.format {
        Format::Json => emit_json(
            &a.output,
            "bands",
            a,
            Some(&q),
            &BandsReport {
                bands,
                gap_roots,
                density,
            },
        ),
        Format::Csv => emit_csv(&a.output, |w| export::bands_csv(w, &bands)),
    }
}

fn rogue(a: &RogueArgs) -> CliResult<()> {
    let (p, q) = (a.graph.params()?, a.graph.potential()?);
    if a.alphas.is_empty() {
        return Err(CliError::Config("no α values given".into()));
    }
    let rows = rogue_trajectory(&p, &q, &a.alphas)?;
    match a.output.format {
        Format::Json => emit_json(&a.output, "rogue", a, Some(&q), &rows),
        Format::Csv => emit_csv(&a.output, |w| export::rogue_csv(w, &rows)),
    }
}

fn moments(a: &MomentsArgs) -> CliResult<()> {
    let m = quadrature_measure(PolyParams::new(a.b, a.n)?)?;
    match a.output.format {
        Format::Json => emit_json(&a.output, "moments", a, None, &m),
        Format::Csv => emit_csv(&a.output, |w| export::quadrature_csv(w, &m)),
    }
}

fn run_verify(a: &VerifyArgs) -> CliResult<()> {
    let results = verify::run(a.suite, a.seed);
    let mut out = std::io::stdout().lock();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{status}  {:<15} {:>4} cases  {}",
            format!("{:?}", r.suite).to_lowercase(),
            r.cases,
            r.detail
        )?;
    }
    if let Some(path) = &a.out {
        let mut w = open_output(Some(path))?;
        export::write_json(
            &mut w,
            &Envelope::new(RunConfig::new("verify", a, None), &results),
        )?;
        w.flush()?;
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{:?}", r.suite).to_lowercase())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "suites failed: {}",
            failed.join(", ")
        )))
    }
}

fn oracle_compare(a: &OracleArgs) -> CliResult<()> {
    let q = config::parse_potential(&a.q)?;
    let rep = decomposition_check(a.n, a.b, a.alpha, &q, a.m, a.h)?;
    match a.output.format {
        Format::Json => emit_json(&a.output, "oracle-compare", a, Some(&q), &rep),
        Format::Csv => emit_csv(&a.output, |w| {
            writeln!(w, "index,fd,assembled,deviation")?;
            for (i, (f, s)) in rep.fd.iter().zip(&rep.assembled).enumerate() {
                writeln!(w, "{i},{f},{s},{}", (f - s).abs())?;
            }
            Ok(())
        }),
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build_global()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    match &cli.command {
        Command::Spectrum(a) => spectrum(a),
        Command::Tree(a) => tree(a),
        Command::Plot(a) => plot(a),
        Command::Bands(a) => bands(a),
        Command::Rogue(a) => rogue(a),
        Command::Moments(a) => moments(a),
        Command::Verify(a) => run_verify(a),
        Command::OracleCompare(a) => oracle_compare(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qtree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
