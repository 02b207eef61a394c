//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;

use qortho_core::repops::{build_frame_with, build_operator, node_weight, symmetrization_residual};
use qortho_core::spectral::{eigenvalues, match_spectrum, spectral_measure};
use qortho_core::ultraspherical::{compare_routes, ctilde_at_node, qdiff_residual, Node, SpectralPoint};
use qortho_core::verify::{
    certify, computed_c, gram_dual, gram_primal, measure_against_weights, psi_norm_ledger, spectrum_tolerance,
    total_mass, unitarity, Caps, CertifyOptions, LedgerEntry, Verdict,
};
use qortho_core::{RepParams, Result};

const QS: [f64; 3] = [0.3, 0.5, 0.9];
const AS: [f64; 3] = [0.25, 1.0, 4.0];

fn grid() -> impl Iterator<Item = RepParams> {
    QS.iter().flat_map(|&q| AS.iter().map(move |&a| RepParams::new(q, a).unwrap()))
}

fn size_for(rep: &RepParams) -> usize {
    if rep.q() > 0.8 {
        200
    } else {
        80
    }
}

/// (x;q)_∞ by a plain product, independent of the library's Pochhammer code.
fn prod_inf(x: f64, q: f64) -> f64 {
    let mut p = 1.0;
    let mut t = x;
    while t.abs() > 1e-18 {
        p *= 1.0 - t;
        t *= q;
    }
    p
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn tag(rep: &RepParams) -> String {
    format!("q={} a={}", rep.q(), rep.a())
}

fn c1_routes() -> Result<Outcome> {
    let mut worst = (0.0_f64, String::new());
    for rep in grid() {
        let fam = rep.family();
        for k in 0..=10 {
            for sign in [1, -1] {
                let x = Node { sign, k }.value(&fam);
                for n in 0..=30 {
                    let d = compare_routes(n, &fam, x)?.scaled_diff();
                    if d > worst.0 {
                        worst = (d, format!("{} n={n} x={x:e}", tag(&rep)));
                    }
                }
            }
        }
    }
    outcome(worst.0 <= 1e-10, format!("max scaled diff {:.2e} <= 1e-10 ({})", worst.0, worst.1))
}

fn c2_symmetrization() -> Result<Outcome> {
    let worst = grid()
        .flat_map(|rep| (0..=200).map(move |n| symmetrization_residual(n, &rep)))
        .fold(0.0, f64::max);
    outcome(worst <= 1e-13, format!("max relative gap {worst:.2e} <= 1e-13, n <= 200"))
}

fn c3_qdiff() -> Result<Outcome> {
    let (mut worst, mut collapse) = (0.0_f64, 0.0_f64);
    for rep in grid() {
        let mut pts: Vec<SpectralPoint> = (0..=5).flat_map(|k| [Node::plus(k).into(), Node::minus(k).into()]).collect();
        pts.push(SpectralPoint::Value(0.3 * rep.a()));
        for pt in pts {
            collapse = collapse.max(qdiff_residual(0, &rep, pt)?);
            for n in 1..=30 {
                worst = worst.max(qdiff_residual(n, &rep, pt)?);
            }
        }
    }
    outcome(
        worst <= 1e-9 && collapse <= 1e-13,
        format!("max scaled residual {worst:.2e} <= 1e-9, n = 0 collapse {collapse:.2e} <= 1e-13"),
    )
}

fn c4_spectrum() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for rep in grid() {
        let tol = spectrum_tolerance(rep.q());
        let op = build_operator(size_for(&rep), &rep)?;
        let eigs = eigenvalues(&op, 1e-15)?;
        let radius = eigs.iter().map(|x| x.abs()).fold(0.0, f64::max) / rep.spectral_radius();
        let r = match_spectrum(&eigs, &rep, 10, tol)?;
        let good = r.matched.len() == 10 && r.max_rel_err <= tol && radius <= 1.0 + 1e-8;
        ok &= good;
        if !good || rep.q() > 0.8 && rep.a() == 4.0 {
            parts.push(format!("{}: max rel err {:.1e}, |λ|max/aq = {radius:.15}", tag(&rep), r.max_rel_err));
        }
    }
    outcome(ok, format!("top 10 matched on all of G; {}", parts.join("; ")))
}

fn c5_primal() -> Result<Outcome> {
    let (mut off, mut par) = (0.0_f64, 0.0_f64);
    for rep in grid() {
        let g = gram_primal(20, &rep, None)?;
        off = off.max(g.max_offdiag);
        par = par.max(g.max_parity);
    }
    outcome(
        off <= 1e-8 && par <= 1e-14,
        format!("max normalized off-diagonal {off:.2e} <= 1e-8, odd m+m' {par:.2e} <= 1e-14"),
    )
}

fn c6_dual() -> Result<Outcome> {
    let mut off = 0.0_f64;
    for rep in grid() {
        off = off.max(gram_dual(15, &rep, None)?.max_offdiag);
    }
    outcome(off <= 1e-8, format!("max normalized off-diagonal {off:.2e} <= 1e-8, n, n' <= 15"))
}

fn c7_unitarity() -> Result<Outcome> {
    let (mut col_off, mut row_off, mut col_diag, mut spread) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut all_certified = true;
    for rep in grid() {
        let pairs = if rep.q() > 0.8 { 60 } else { 40 };
        let frame = build_frame_with(21, pairs, &rep, computed_c(&rep)?)?;
        let u = unitarity(&frame);
        all_certified &= u.certified_columns == frame.cols() && u.rows_certified;
        col_off = col_off.max(u.max_column_offdiag);
        row_off = row_off.max(u.max_row_offdiag);
        col_diag = col_diag.max(u.column_diag.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max));
        let diags: Vec<f64> = u.column_diag.iter().chain(&u.row_diag).copied().collect();
        let e = LedgerEntry::new("diag", "", &vec![1.0; diags.len()], &diags);
        spread = spread.max(e.offset_spread);
    }
    outcome(
        all_certified && col_off <= 1e-8 && row_off <= 1e-8 && col_diag <= 1e-8 && spread <= 1e-8,
        format!(
            "columns {col_off:.2e}, rows {row_off:.2e} off-diagonal; column diagonal |G-1| {col_diag:.2e}; diagonal ratio spread {spread:.2e}"
        ),
    )
}

fn c8_total_mass() -> Result<Outcome> {
    let (mut s_err, mut mass_err) = (0.0_f64, 0.0_f64);
    let mut printed = Vec::new();
    let mut rational = true;
    let mut corrected = true;
    for rep in grid() {
        let (q, a) = (rep.q(), rep.a());
        let t = total_mass(&rep)?;
        let closed = prod_inf(a * a * q * q * q, q * q) / prod_inf(q, q * q);
        s_err = s_err.max((t.s_direct / closed - 1.0).abs());
        let m = spectral_measure(&build_operator(size_for(&rep), &rep)?, 1e-15)?;
        mass_err = mass_err.max((m.total_mass() - 1.0).abs());
        let ledger = t.ledger();
        corrected &= ledger[3].nearest_rational.as_deref() == Some("2") && ledger[3].stable;
        for e in &ledger[..3] {
            rational &= e.is_simple_rational();
            if q == 0.5 && a == 1.0 {
                printed.push(format!("{} {:.6}", e.id, e.offset));
            }
        }
    }
    outcome(
        s_err <= 1e-12 && mass_err <= 1e-12 && rational,
        format!(
            "S vs closed form {s_err:.2e} <= 1e-12; |Σ mass - 1| {mass_err:.2e} <= 1e-12; printed prefactor offsets rational: {rational} (q=0.5 a=1: {}); sign-corrected sum gives offset 2: {corrected}",
            printed.join(", ")
        ),
    )
}

fn c9_norms() -> Result<Outcome> {
    let (mut parity, mut ident) = (0.0_f64, 0.0_f64);
    let mut stable = true;
    let mut offsets = Vec::new();
    for rep in grid() {
        let (q, a2) = (rep.q(), rep.a() * rep.a());
        let (plus, minus, ledger) = psi_norm_ledger(&rep)?;
        parity = parity.max((plus - minus).abs() / plus);
        stable &= ledger.iter().all(|e| e.stable);
        if offsets.is_empty() {
            offsets = ledger.iter().map(|e| format!("{} {}", e.id, e.nearest_rational.clone().unwrap_or("?".into()))).collect();
        }
        let split = prod_inf(-a2 * q * q, q) / (prod_inf(-a2 * q * q, q * q) * prod_inf(-a2 * q * q * q, q * q));
        let euler = prod_inf(-q, q) * prod_inf(q, q * q);
        ident = ident.max((split - 1.0).abs()).max((euler - 1.0).abs());
    }
    outcome(
        parity <= 1e-12 && stable && ident <= 1e-12,
        format!("norm parity {parity:.2e}; product identities {ident:.2e}; offsets recorded: {}", offsets.join(", ")),
    )
}

fn c10_special_value() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    let mut misprint_recorded = true;
    for rep in grid() {
        let (q, a) = (rep.q(), rep.a());
        let fam = rep.family();
        let plus = ctilde_at_node(30, &fam, Node::plus(0))?;
        let minus = ctilde_at_node(30, &fam, Node::minus(0))?;
        for n in 0..=30 {
            let log_closed = n as f64 * a.ln() + 0.5 * (n * (n + 1)) as f64 * q.ln();
            for v in [plus.values[n], minus.values[n]] {
                worst = worst.max((v.log_mag() - log_closed).abs().exp_m1().abs());
            }
        }
        let report = certify(&rep, Caps { size: size_for(&rep), nodes: 10, degree: 4 }, CertifyOptions::default())?;
        let e = report.entry("special_value_printed").expect("ledger entry present");
        misprint_recorded &= !e.stable && (a == 1.0 || e.claimed != e.computed);
    }
    outcome(
        worst <= 1e-11 && misprint_recorded,
        format!("max relative error of |C_n(±aq)| {worst:.2e} <= 1e-11; printed a^2 q^(n(n+1)) recorded as misprint: {misprint_recorded}"),
    )
}

fn c11_measure() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    let mut pinned = f64::NAN;
    for rep in grid() {
        let m = spectral_measure(&build_operator(80, &rep)?, 1e-15)?;
        let (ratio_err, _, masses) = measure_against_weights(&m, &rep, 80, 4)?;
        worst = worst.max(ratio_err);
        if rep.q() == 0.5 && rep.a() == 1.0 {
            pinned = masses[0] / masses[1];
        }
    }
    let rep = RepParams::new(0.5, 1.0)?;
    let weights_pin = node_weight(0, &rep) / node_weight(1, &rep);
    outcome(
        worst <= 1e-6 && (pinned / 1.2 - 1.0).abs() <= 1e-6 && (weights_pin / 1.2 - 1.0).abs() <= 1e-15,
        format!("max mass-ratio vs weight-ratio error {worst:.2e} <= 1e-6 (N = 80); q=0.5 a=1 mass ratio {pinned:.12}"),
    )
}

fn c12_mutation() -> Result<Outcome> {
    let rep = RepParams::new(0.5, 1.0)?;
    let clean = certify(&rep, Caps::default(), CertifyOptions::default())?;
    let bad = certify(&rep, Caps::default(), CertifyOptions { weight_perturbation: Some(1e-6), ..Default::default() })?;
    let failed: Vec<&str> = bad.checks.iter().filter(|c| c.verdict == Verdict::Fail).map(|c| c.name.as_str()).collect();
    outcome(
        clean.passed() && !bad.passed(),
        format!("clean run passes: {}; perturbed run fails on {}", clean.passed(), failed.join(", ")),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 12] = [
        ("series/recurrence equivalence", c1_routes),
        ("symmetrization identity", c2_symmetrization),
        ("q-difference equation", c3_qdiff),
        ("spectrum reproduction", c4_spectrum),
        ("primal orthogonality", c5_primal),
        ("dual orthogonality", c6_dual),
        ("unitarity", c7_unitarity),
        ("total mass", c8_total_mass),
        ("norm sums", c9_norms),
        ("special value", c10_special_value),
        ("measure agreement", c11_measure),
        ("mutation sensitivity", c12_mutation),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!("{} {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
