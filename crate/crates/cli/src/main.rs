//! `qortho`: evaluation, spectra, tables and certification reports for the
//! discrete q-ultraspherical family.
//!
//! Exit codes: 0 success, 1 a computation or check failed, 2 invalid input.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qortho_core::repops::{build_operator, jacobi_offdiag, node_weight};
use qortho_core::spectral::{eigenvalues, match_spectrum, spectral_measure};
use qortho_core::ultraspherical::{ctilde, ctilde_recurrence, ctilde_series_detailed, dual_dtilde, mu, Method, Node};
use qortho_core::verify::{
    certify, dual_weight, measure_against_weights, spectrum_tolerance, weight_sum_closed, Caps, CertificationReport,
    CertifyOptions, Verdict,
};
use qortho_core::{Error, FamilyParams, RepParams};

/// Eigenvalue bracket width relative to ‖T‖∞.
const EIG_TOL: f64 = 1e-15;

#[derive(Parser, Debug)]
#[command(name = "qortho", version, about = "Discrete q-ultraspherical polynomials: evaluation, spectra and certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format (default: text for eval, csv for table, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the numerical kernels (0 = all cores). Output does not depend on it.
    #[arg(long, global = true, env = "QORTHO_THREADS")]
    threads: Option<usize>,
    /// Add a UNIX timestamp to JSON output.
    #[arg(long, global = true)]
    timestamp: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate C̃ₙ⁽ᶜ⁾(x;q), or the dual D̃ₙ⁽ᶜ⁾(μ(x;−c)|q) with --dual.
    Eval(EvalArgs),
    /// Match the largest eigenvalues of the truncated Jacobi matrix to ±aq^{k+1}.
    Spectrum(SpectrumArgs),
    /// Run every certification check and emit the report with its ledger.
    Certify(CertifyArgs),
    /// Export node, weight and coefficient tables as CSV.
    Table(TableArgs),
    /// Compare the spectral measure of the Jacobi matrix with the closed-form weights.
    Measure(MeasureArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    q: f64,
    /// Family parameter c.
    #[arg(long, conflicts_with = "a", required_unless_present = "a")]
    c: Option<f64>,
    /// Representation parameter a; sets c = a².
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    n: usize,
    /// Argument; a nonnegative integer with --dual.
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, value_enum, default_value = "recurrence")]
    method: MethodArg,
    #[arg(long)]
    dual: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Series,
    Recurrence,
    Both,
}

#[derive(Args, Debug, Clone, Copy)]
struct RepArgs {
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
}

impl RepArgs {
    fn rep(&self) -> Result<RepParams, Error> {
        RepParams::new(self.q, self.a)
    }

    fn default_size(&self) -> usize {
        if self.q > 0.8 {
            200
        } else {
            80
        }
    }
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    rep: RepArgs,
    /// Jacobi matrix size (default 80, or 200 when q > 0.8).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Relative matching tolerance (default 1e-8, or 1e-6 when q > 0.8).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    rep: RepArgs,
    #[arg(long, default_value_t = 20)]
    degree: usize,
    #[arg(long, default_value_t = 40)]
    nodes: usize,
    /// Jacobi matrix size (default 80, or 200 when q > 0.8).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Self-test: perturb the weight w₁ by this relative amount.
    #[arg(long, hide = true, num_args = 0..=1, default_missing_value = "1e-6")]
    inject_weight_bug: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TableKind {
    PrimalWeights,
    DualWeights,
    Jacobi,
    PolynomialValues,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    rep: RepArgs,
    #[arg(long)]
    rows: usize,
    #[arg(long, value_enum)]
    kind: TableKind,
    /// Argument for polynomial-values (default: the node aq).
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    rep: RepArgs,
    /// Jacobi matrix size (default 80, or 200 when q > 0.8).
    #[arg(long)]
    size: Option<usize>,
    /// Node pairs compared against the weights.
    #[arg(long, default_value_t = 4)]
    pairs: usize,
}

enum Failure {
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Compute(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Compute(format!("json: {e}"))
    }
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // a second initialization only happens in tests; ignore it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(&cli, a),
        Command::Spectrum(a) => cmd_spectrum(&cli, a),
        Command::Certify(a) => cmd_certify(&cli, a),
        Command::Table(a) => cmd_table(&cli, a),
        Command::Measure(a) => cmd_measure(&cli, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn sink(cli: &Cli) -> io::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
fn num(x: f64) -> String {
    let m = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&m) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn write_json<T: Serialize>(cli: &Cli, value: &T) -> Result<(), Failure> {
    let mut v = serde_json::to_value(value)?;
    if cli.timestamp {
        if let Some(obj) = v.as_object_mut() {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            obj.insert("timestamp".into(), secs.into());
        }
    }
    let mut w = sink(cli)?;
    serde_json::to_writer_pretty(&mut w, &v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv(cli: &Cli, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(sink(cli)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_text(cli: &Cli, text: &str) -> Result<(), Failure> {
    let mut w = sink(cli)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EvalOutput {
    q: f64,
    c: f64,
    n: usize,
    x: f64,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recurrence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_diff: Option<f64>,
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> CmdResult {
    let c = match (args.c, args.a) {
        (Some(c), _) => c,
        (None, Some(a)) if a > 0.0 => a * a,
        (None, Some(a)) => return Err(Failure::Input(format!("a must be positive, got {a}"))),
        (None, None) => unreachable!("clap requires --c or --a"),
    };
    let fam = FamilyParams::new(args.q, c)?;
    if !args.x.is_finite() {
        return Err(Failure::Input(format!("x must be finite, got {}", args.x)));
    }
    let mut out = EvalOutput {
        q: args.q,
        c,
        n: args.n,
        x: args.x,
        method: "recurrence",
        value: None,
        series: None,
        recurrence: None,
        abs_diff: None,
    };
    if args.dual {
        if args.x < 0.0 || args.x.fract() != 0.0 || args.x > 1e6 {
            return Err(Failure::Input(format!("--dual needs a nonnegative integer x, got {}", args.x)));
        }
        out.method = "dual";
        out.value = Some(dual_dtilde(args.n, args.x as usize, &fam));
    } else {
        match args.method {
            MethodArg::Recurrence => out.value = Some(ctilde(args.n, &fam, args.x, Method::Recurrence)?),
            MethodArg::Series => {
                out.method = "series";
                out.value = Some(ctilde(args.n, &fam, args.x, Method::Series)?);
            }
            MethodArg::Both => {
                out.method = "both";
                let s = ctilde_series_detailed(args.n, &fam, args.x)?.0;
                let r = ctilde_recurrence(args.n, &fam, args.x);
                out.series = Some(s);
                out.recurrence = Some(r);
                out.abs_diff = Some((s - r).abs());
                // the routes must agree; a disagreement is reported after printing
                if let Err(e) = ctilde(args.n, &fam, args.x, Method::Both) {
                    emit_eval(cli, &out)?;
                    return Err(e.into());
                }
            }
        }
    }
    emit_eval(cli, &out)?;
    Ok(true)
}

fn emit_eval(cli: &Cli, out: &EvalOutput) -> Result<(), Failure> {
    match cli.format.unwrap_or(Format::Text) {
        Format::Json => write_json(cli, out),
        Format::Csv => match out.value {
            Some(v) => write_csv(cli, &["n", "x", "value"], &[vec![out.n.to_string(), num(out.x), num(v)]]),
            None => write_csv(
                cli,
                &["n", "x", "series", "recurrence", "abs_diff"],
                &[vec![
                    out.n.to_string(),
                    num(out.x),
                    num(out.series.unwrap_or(f64::NAN)),
                    num(out.recurrence.unwrap_or(f64::NAN)),
                    num(out.abs_diff.unwrap_or(f64::NAN)),
                ]],
            ),
        },
        Format::Text => match out.value {
            Some(v) => write_text(cli, &format!("{}\n", num(v))),
            None => write_text(
                cli,
                &format!(
                    "series {}\nrecurrence {}\nabs_diff {}\n",
                    num(out.series.unwrap_or(f64::NAN)),
                    num(out.recurrence.unwrap_or(f64::NAN)),
                    num(out.abs_diff.unwrap_or(f64::NAN))
                ),
            ),
        },
    }
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SpectrumParams {
    q: f64,
    a: f64,
    top: usize,
    tolerance: f64,
}

#[derive(Serialize)]
struct MatchedOut {
    analytic: f64,
    computed: f64,
    rel_err: f64,
}

#[derive(Serialize)]
struct SpectrumOutput {
    params: SpectrumParams,
    size: usize,
    matched: Vec<MatchedOut>,
    max_rel_err: f64,
}

fn cmd_spectrum(cli: &Cli, args: &SpectrumArgs) -> CmdResult {
    let rep = args.rep.rep()?;
    let size = args.size.unwrap_or(args.rep.default_size());
    if args.top == 0 {
        return Err(Failure::Input("--top must be at least 1".into()));
    }
    let tol = args.tol.unwrap_or(spectrum_tolerance(rep.q()));
    if !(tol > 0.0) {
        return Err(Failure::Input(format!("--tol must be positive, got {tol}")));
    }
    let op = build_operator(size, &rep)?;
    let eigs = eigenvalues(&op, EIG_TOL)?;
    let report = match_spectrum(&eigs, &rep, args.top, tol)?;
    let out = SpectrumOutput {
        params: SpectrumParams {
            q: rep.q(),
            a: rep.a(),
            top: args.top,
            tolerance: tol,
        },
        size,
        matched: report
            .matched
            .iter()
            .map(|m| MatchedOut {
                analytic: m.analytic,
                computed: m.computed,
                rel_err: m.rel_err,
            })
            .collect(),
        max_rel_err: report.max_rel_err,
    };
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => write_json(cli, &out)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .matched
                .iter()
                .map(|m| vec![num(m.analytic), num(m.computed), num(m.rel_err)])
                .collect();
            write_csv(cli, &["analytic", "computed", "rel_err"], &rows)?;
        }
        Format::Text => {
            let mut s = format!("size {size}, top {}, tolerance {tol:e}\n", args.top);
            for m in &out.matched {
                s += &format!("{:>24} {:>24} {:.3e}\n", m.analytic, m.computed, m.rel_err);
            }
            s += &format!("max_rel_err {:.3e}\n", out.max_rel_err);
            write_text(cli, &s)?;
        }
    }
    let complete = out.matched.len() == args.top.min(size);
    if !complete {
        eprintln!("only {} of {} eigenvalues could be matched", out.matched.len(), args.top);
    }
    Ok(complete && out.max_rel_err <= tol)
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

fn summary(report: &CertificationReport) -> String {
    let count = |v: Verdict| report.checks.iter().filter(|c| c.verdict == v).count();
    let mut s = format!(
        "q = {}, a = {}, degree {}, nodes {}, size {}\n",
        report.params.q, report.params.a, report.params.degree, report.params.nodes, report.params.size
    );
    s += &format!(
        "verdict: {} ({} pass, {} fail, {} flagged, {} info)\n\nchecks\n",
        if report.passed() { "pass" } else { "fail" },
        count(Verdict::Pass),
        count(Verdict::Fail),
        count(Verdict::Flagged),
        count(Verdict::Info)
    );
    for c in &report.checks {
        let tag = match c.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Flagged => "flag",
            Verdict::Info => "info",
        };
        s += &format!("  {tag}  {:<32} {:>11.3e}", c.name, c.statistic);
        if c.tolerance.is_finite() {
            s += &format!(" <= {:.0e}", c.tolerance);
        }
        if let Some(n) = &c.note {
            s += &format!("  {n}");
        }
        s.push('\n');
    }
    s += "\nledger (computed / printed)\n";
    for e in &report.ledger {
        let off = match &e.nearest_rational {
            Some(r) if e.stable => r.clone(),
            _ if e.stable => format!("{:.10}", e.offset),
            _ => "not constant".into(),
        };
        s += &format!("  {:<40} offset {:<14} spread {:.1e}\n", e.id, off, e.offset_spread);
    }
    s
}

fn cmd_certify(cli: &Cli, args: &CertifyArgs) -> CmdResult {
    let rep = args.rep.rep()?;
    let caps = Caps {
        degree: args.degree,
        nodes: args.nodes,
        size: args.size.unwrap_or(args.rep.default_size()),
    };
    let options = CertifyOptions {
        top: args.top,
        weight_perturbation: args.inject_weight_bug,
    };
    let report = certify(&rep, caps, options)?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => write_json(cli, &report)?,
        Format::Text => write_text(cli, &summary(&report))?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        num(c.statistic),
                        num(c.tolerance),
                        format!("{:?}", c.verdict).to_lowercase(),
                    ]
                })
                .collect();
            write_csv(cli, &["name", "statistic", "tolerance", "verdict"], &rows)?;
        }
    }
    if cli.out.is_some() {
        print!("{}", summary(&report));
    }
    Ok(report.passed())
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

fn cmd_table(cli: &Cli, args: &TableArgs) -> CmdResult {
    let rep = args.rep.rep()?;
    let fam = rep.family();
    let (q, a) = (rep.q(), rep.a());
    let (header, rows): (&[&str], Vec<Vec<String>>) = match args.kind {
        TableKind::PrimalWeights => (
            &["n", "node_plus", "node_minus", "weight"],
            (0..args.rows)
                .map(|n| {
                    let x = Node::plus(n).value(&fam);
                    vec![n.to_string(), num(x), num(-x), num(node_weight(n, &rep))]
                })
                .collect(),
        ),
        TableKind::DualWeights => (
            &["m", "mu", "weight"],
            (0..args.rows)
                .map(|m| {
                    vec![m.to_string(), num(mu(m, -a * a, q)), num(dual_weight(m, &rep).to_f64())]
                })
                .collect(),
        ),
        TableKind::Jacobi => (
            &["n", "offdiag"],
            (0..args.rows).map(|n| vec![n.to_string(), num(jacobi_offdiag(n, &rep))]).collect(),
        ),
        TableKind::PolynomialValues => {
            let x = args.x.unwrap_or(rep.spectral_radius());
            if !x.is_finite() {
                return Err(Failure::Input(format!("x must be finite, got {x}")));
            }
            (
                &["n", "x", "value"],
                (0..args.rows)
                    .map(|n| vec![n.to_string(), num(x), num(ctilde_recurrence(n, &fam, x))])
                    .collect(),
            )
        }
    };
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(cli, header, &rows)?,
        Format::Text => {
            let mut s = header.join("\t") + "\n";
            for r in &rows {
                s += &(r.join("\t") + "\n");
            }
            write_text(cli, &s)?;
        }
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| {
                    header
                        .iter()
                        .zip(r)
                        .map(|(h, v)| {
                            let val = v.parse::<f64>().map_or(serde_json::Value::String(v.clone()), serde_json::Value::from);
                            (h.to_string(), val)
                        })
                        .collect()
                })
                .collect();
            write_json(cli, &objs)?;
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// measure
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MeasureParams {
    q: f64,
    a: f64,
    size: usize,
    pairs: usize,
}

#[derive(Serialize)]
struct MeasureNode {
    sign: i8,
    k: usize,
    analytic: f64,
    computed: f64,
    mass: f64,
}

#[derive(Serialize)]
struct MassRatio {
    sign: i8,
    k: usize,
    /// mass at node k over mass at node k+1.
    mass_ratio: f64,
    /// w_k / w_(k+1).
    weight_ratio: f64,
    rel_diff: f64,
}

#[derive(Serialize)]
struct MeasureOffsets {
    /// mass_k · (-a²q³;q²)_∞/(q;q²)_∞ / w_k, per positive node.
    mass_over_weight_per_printed_norm: Vec<f64>,
    /// Largest |mass_k·⟨ψ_k,ψ_k⟩ − 1| over the compared nodes.
    max_mass_psi_norm_defect: f64,
}

#[derive(Serialize)]
struct MeasureOutput {
    params: MeasureParams,
    total_mass: f64,
    nodes: Vec<MeasureNode>,
    ratios: Vec<MassRatio>,
    offsets: MeasureOffsets,
}

fn cmd_measure(cli: &Cli, args: &MeasureArgs) -> CmdResult {
    let rep = args.rep.rep()?;
    let fam = rep.family();
    let size = args.size.unwrap_or(args.rep.default_size());
    if size < 2 {
        return Err(Failure::Input(format!("--size must be at least 2, got {size}")));
    }
    if args.pairs == 0 {
        return Err(Failure::Input("--pairs must be at least 1".into()));
    }
    let op = build_operator(size, &rep)?;
    let measure = spectral_measure(&op, EIG_TOL)?;
    let mut nodes = Vec::new();
    let mut ratios = Vec::new();
    for sign in [1i8, -1] {
        let mut masses = Vec::new();
        for k in 0..=args.pairs {
            let node = Node { sign, k };
            let x = node.value(&fam);
            let i = measure.nearest(x).ok_or_else(|| Failure::Compute("empty spectral measure".into()))?;
            masses.push(measure.masses[i]);
            nodes.push(MeasureNode {
                sign,
                k,
                analytic: x,
                computed: measure.nodes[i],
                mass: measure.masses[i],
            });
        }
        for k in 0..args.pairs {
            let mass_ratio = masses[k] / masses[k + 1];
            let weight_ratio = node_weight(k, &rep) / node_weight(k + 1, &rep);
            ratios.push(MassRatio {
                sign,
                k,
                mass_ratio,
                weight_ratio,
                rel_diff: (mass_ratio / weight_ratio - 1.0).abs(),
            });
        }
    }
    let (_, psi_defect, plus_masses) = measure_against_weights(&measure, &rep, size, args.pairs)?;
    let p = weight_sum_closed(&rep)?;
    let out = MeasureOutput {
        params: MeasureParams {
            q: rep.q(),
            a: rep.a(),
            size,
            pairs: args.pairs,
        },
        total_mass: measure.total_mass(),
        nodes,
        ratios,
        offsets: MeasureOffsets {
            mass_over_weight_per_printed_norm: plus_masses
                .iter()
                .enumerate()
                .map(|(k, m)| m * p / node_weight(k, &rep))
                .collect(),
            max_mass_psi_norm_defect: psi_defect,
        },
    };
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => write_json(cli, &out)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .nodes
                .iter()
                .map(|n| vec![n.sign.to_string(), n.k.to_string(), num(n.analytic), num(n.computed), num(n.mass)])
                .collect();
            write_csv(cli, &["sign", "k", "analytic", "computed", "mass"], &rows)?;
        }
        Format::Text => {
            let mut s = format!("total mass {}\n", out.total_mass);
            for r in &out.ratios {
                s += &format!(
                    "{:+} k={} mass ratio {:.12} weight ratio {:.12} rel diff {:.2e}\n",
                    r.sign, r.k, r.mass_ratio, r.weight_ratio, r.rel_diff
                );
            }
            write_text(cli, &s)?;
        }
    }
    Ok(true)
}
