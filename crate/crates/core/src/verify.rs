//! Identity certification: orthogonality sums, norm identities, unitarity of
//! the normalized eigenbasis, and a ledger of printed closed-form constants
//! compared against independently computed values.
//!
//! Off-diagonal orthogonality is theorem-level and must vanish; printed
//! constants are claims. A claim whose ratio to the computed value is the
//! same at every index is recorded as a stable multiplicative offset, which
//! flags a misprint rather than failing the run.

use rayon::prelude::*;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::qseries::{dd_div, kahan_sum, qpoch_inf, sum_log_scaled, KahanSum, LogScaledReal, SeriesTolerance};
use crate::repops::{
    build_frame_with, build_operator, j_action_residual, node_betas, node_weight, prefactors, printed_c_forms,
    symmetrization_residual, RepParams, UnitaryFrame,
};
use crate::spectral::{eigenvalues, match_spectrum, spectral_measure, SpectralMeasure};
use crate::ultraspherical::{
    compare_routes, ctilde_at_node, dual_dtilde_scaled, qdiff_residual, recurrence_coeffs, special_value_closed, Node,
    SpectralPoint,
};

/// Candidate offsets for misprint detection.
pub const SIMPLE_RATIONALS: [(f64, &str); 5] = [(0.25, "1/4"), (0.5, "1/2"), (1.0, "1"), (2.0, "2"), (4.0, "4")];
/// Relative tolerance for rational matching and offset stability.
pub const OFFSET_TOL: f64 = 1e-8;
/// Discarded tail of a Gram entry relative to its diagonal.
pub const GRAM_TAIL_TOL: f64 = 1e-12;
/// Hard ceiling on summation indices for Gram sums.
pub const GRAM_INDEX_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Flagged,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Hard check: pass iff `statistic ≤ tolerance`.
    pub fn bound(name: &str, statistic: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            tolerance,
            verdict: if statistic <= tolerance { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    /// Check derived from a ledger entry: pass when the claim holds (offset 1),
    /// flagged when the offset is stable but not 1, fail when it drifts.
    pub fn from_ledger(name: &str, entry: &LedgerEntry) -> Self {
        let verdict = if !entry.stable {
            Verdict::Fail
        } else if (entry.offset - 1.0).abs() <= OFFSET_TOL {
            Verdict::Pass
        } else {
            Verdict::Flagged
        };
        Self {
            name: name.into(),
            statistic: entry.offset_spread,
            tolerance: OFFSET_TOL,
            verdict,
            note: Some(format!("{} offset {}", entry.id, fmt_offset(entry))),
        }
    }

    pub fn info(name: &str, statistic: f64, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            statistic,
            tolerance: f64::NAN,
            verdict: Verdict::Info,
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn fmt_offset(e: &LedgerEntry) -> String {
    match &e.nearest_rational {
        Some(r) => r.clone(),
        None => format!("{:.12}", e.offset),
    }
}

/// A printed constant against its computed value.
///
/// `offset` is the mean of computed/claimed over all sampled indices and
/// `offset_spread` the largest relative deviation from that mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub id: String,
    pub claim: String,
    pub claimed: f64,
    pub computed: f64,
    pub offset: f64,
    pub offset_spread: f64,
    pub samples: usize,
    pub nearest_rational: Option<String>,
    pub stable: bool,
}

pub fn nearest_rational(x: f64) -> Option<&'static str> {
    SIMPLE_RATIONALS
        .iter()
        .find(|(r, _)| (x / r - 1.0).abs() <= OFFSET_TOL)
        .map(|(_, s)| *s)
}

impl LedgerEntry {
    pub fn new(id: &str, claim: &str, claimed: &[f64], computed: &[f64]) -> Self {
        assert!(!claimed.is_empty() && claimed.len() == computed.len());
        let ratios: Vec<f64> = computed.iter().zip(claimed).map(|(c, k)| c / k).collect();
        let offset = kahan_sum(&ratios) / ratios.len() as f64;
        let spread = ratios.iter().map(|r| (r / offset - 1.0).abs()).fold(0.0, f64::max);
        let spread = if spread.is_nan() { f64::INFINITY } else { spread };
        Self {
            id: id.into(),
            claim: claim.into(),
            claimed: claimed[0],
            computed: computed[0],
            offset,
            offset_spread: spread,
            samples: ratios.len(),
            nearest_rational: nearest_rational(offset).map(String::from),
            stable: offset.is_finite() && spread <= OFFSET_TOL,
        }
    }

    /// Stable and equal to one of [`SIMPLE_RATIONALS`].
    pub fn is_simple_rational(&self) -> bool {
        self.stable && self.nearest_rational.is_some()
    }
}

// ---------------------------------------------------------------------------
// Closed-form constants
// ---------------------------------------------------------------------------

fn qinf(x: f64, q: f64) -> Result<f64> {
    qpoch_inf(x, q, &SeriesTolerance::default())
}

/// P = (−a²q³;q²)_∞ / (q;q²)_∞, the sum Σₙ wₙ of the node weights.
pub fn weight_sum_closed(rep: &RepParams) -> Result<f64> {
    let (q, a2) = (rep.q(), rep.a() * rep.a());
    Ok(qinf(-a2 * q * q * q, q * q)? / qinf(q, q * q)?)
}

// ---------------------------------------------------------------------------
// Primal Gram matrix
// ---------------------------------------------------------------------------

/// Multiplies one node weight by (1 + rel). Used to confirm that the
/// certification reacts to corrupted weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPerturbation {
    pub index: usize,
    pub rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    /// Matrix dimension (degrees or dual indices 0..dim).
    pub dim: usize,
    /// Summation indices used (nodes for the primal sum, grid points for the dual).
    pub terms_used: usize,
    /// Gram entries, row-major.
    pub gram: Vec<f64>,
    /// Largest |G_ij|/sqrt(G_ii G_jj) over i ≠ j.
    pub max_offdiag: f64,
    /// Largest normalized |G_ij| over i+j odd.
    pub max_parity: f64,
    /// G_ii divided by the printed norm.
    pub norm_ratios: Vec<f64>,
    /// Largest normalized change when the summation runs further.
    pub tail_change: f64,
}

fn normalized_offdiag(gram: &[f64], dim: usize) -> (f64, f64) {
    let (mut off, mut par) = (0.0_f64, 0.0_f64);
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let v = gram[i * dim + j].abs() / (gram[i * dim + i] * gram[j * dim + j]).sqrt();
            off = off.max(v);
            if (i + j) % 2 == 1 {
                par = par.max(v);
            }
        }
    }
    (off, par)
}

/// Σₙ wₙ[βᵢ(aq^{n+1})βⱼ(aq^{n+1}) + βᵢ(−aq^{n+1})βⱼ(−aq^{n+1})] for i, j ≤ M.
///
/// βₘ = dₘC̃ₘ, so this is the polynomial Gram matrix scaled by dᵢdⱼ. The
/// printed norm then becomes the m-independent constant P and its ratio is
/// read off directly. Nodes are added until every entry's remaining tail is
/// below [`GRAM_TAIL_TOL`] of its diagonal.
pub fn gram_primal(degree: usize, rep: &RepParams, perturb: Option<WeightPerturbation>) -> Result<GramReport> {
    let dim = degree + 1;
    let p = weight_sum_closed(rep)?;
    let (q, a2) = (rep.q(), rep.a() * rep.a());
    let q2 = q * q;
    let mut acc = vec![KahanSum::new(); dim * dim];
    let min_nodes = 2 * dim + 10;
    const BATCH: usize = 32;
    let mut n0 = 0;
    let mut w = 1.0;
    loop {
        let batch: Vec<Vec<f64>> = (n0..n0 + BATCH)
            .into_par_iter()
            .map(|n| node_betas(degree, n, rep).map(|b| b.iter().map(|x| x.to_f64()).collect()))
            .collect::<Result<_>>()?;
        for (off, b) in batch.iter().enumerate() {
            let n = n0 + off;
            let mut wn = w;
            if let Some(pt) = perturb.filter(|pt| pt.index == n) {
                wn *= 1.0 + pt.rel;
            }
            for i in 0..dim {
                for j in 0..dim {
                    let plus = b[i] * b[j];
                    // βₘ(−x) = (−1)^m βₘ(x)
                    let minus = if (i + j) % 2 == 1 { -plus } else { plus };
                    acc[i * dim + j].add(wn * plus + wn * minus);
                }
            }
            let ratio = q * (1.0 + a2 * q2.powi(n as i32 + 1)) / (1.0 - q2.powi(n as i32 + 1));
            let done = n + 1 >= min_nodes
                && ratio < 1.0
                && (0..dim).all(|i| {
                    let t = 2.0 * wn * b[i] * b[i];
                    4.0 * t * ratio / (1.0 - ratio) <= GRAM_TAIL_TOL * acc[i * dim + i].total()
                });
            w *= ratio;
            if done {
                let gram: Vec<f64> = acc.iter().map(|s| s.total()).collect();
                let (max_offdiag, max_parity) = normalized_offdiag(&gram, dim);
                let norm_ratios = (0..dim).map(|i| gram[i * dim + i] / p).collect();
                return Ok(GramReport {
                    dim,
                    terms_used: n + 1,
                    gram,
                    max_offdiag,
                    max_parity,
                    norm_ratios,
                    tail_change: 0.0,
                });
            }
        }
        n0 += BATCH;
        if n0 > GRAM_INDEX_CAP {
            return Err(Error::Truncation(format!(
                "primal Gram tail not below {GRAM_TAIL_TOL:e} within {GRAM_INDEX_CAP} nodes"
            )));
        }
    }
}

// ---------------------------------------------------------------------------
// Dual Gram matrix
// ---------------------------------------------------------------------------

/// Dual weight W_m = (1+a²q^{2m+1})(−a²q;q)_m q^{m(m−1)/2} / ((1+a²q)(q;q)_m).
pub fn dual_weight(m: usize, rep: &RepParams) -> LogScaledReal {
    let (q, a2) = (rep.q(), rep.a() * rep.a());
    let mut l = (a2 * q.powi(2 * m as i32 + 1)).ln_1p() - (a2 * q).ln_1p();
    for j in 0..m {
        let qj = q.powi(j as i32 + 1);
        l += (a2 * qj).ln_1p() - (-qj).ln_1p();
    }
    let mf = m as f64;
    l += 0.5 * mf * (mf - 1.0) * q.ln();
    LogScaledReal::from_log(1, l)
}

/// Printed dual norm 2P·(q²;q²)ₙq⁻ⁿ/(−a²q²;q²)ₙ = 2P/wₙ.
pub fn dual_norm_printed(n: usize, rep: &RepParams) -> Result<f64> {
    Ok(2.0 * weight_sum_closed(rep)? / node_weight(n, rep))
}

/// Σₘ Wₘ D̃ᵢ(μ(m;−a²)) D̃ⱼ(μ(m;−a²)) for i, j ≤ ncap.
pub fn gram_dual(ncap: usize, rep: &RepParams, perturb: Option<WeightPerturbation>) -> Result<GramReport> {
    let dim = ncap + 1;
    let fam = rep.family();
    let point = |m: usize| -> Vec<LogScaledReal> {
        let mut wm = dual_weight(m, rep);
        if let Some(pt) = perturb.filter(|pt| pt.index == m) {
            wm = wm * (1.0 + pt.rel);
        }
        let d: Vec<LogScaledReal> = (0..dim).map(|n| dual_dtilde_scaled(n, m, &fam)).collect();
        let mut out = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                out.push(wm * d[i] * d[j]);
            }
        }
        out
    };
    let min_points = 4 * dim + 20;
    let mut terms: Vec<Vec<LogScaledReal>> = Vec::new();
    const BATCH: usize = 32;
    let mut cut = None;
    while cut.is_none() {
        let start = terms.len();
        if start > GRAM_INDEX_CAP {
            return Err(Error::Truncation(format!(
                "dual Gram tail not below {GRAM_TAIL_TOL:e} within {GRAM_INDEX_CAP} points"
            )));
        }
        let batch: Vec<Vec<LogScaledReal>> = (start..start + BATCH).into_par_iter().map(point).collect();
        terms.extend(batch);
        for m in start.max(min_points)..terms.len() {
            // each diagonal term small against its running sum and still falling
            let settled = (0..dim).all(|i| {
                let k = i * dim + i;
                let partial = sum_log_scaled(&terms[..=m].iter().map(|t| t[k]).collect::<Vec<_>>());
                let t = terms[m][k];
                t.cmp_abs(&terms[m - 1][k]).is_lt() && (t / partial).to_f64().abs() <= 1e-18
            });
            if settled {
                cut = Some(m + 1);
                break;
            }
        }
    }
    let cut = cut.expect("loop exits with a cut");
    while terms.len() < cut + 10 {
        let m = terms.len();
        terms.push(point(m));
    }
    let entries = |upto: usize| -> Vec<LogScaledReal> {
        (0..dim * dim)
            .into_par_iter()
            .map(|k| sum_log_scaled(&terms[..upto].iter().map(|t| t[k]).collect::<Vec<_>>()))
            .collect()
    };
    let g = entries(cut);
    let g_ext = entries(cut + 10);
    let diag_norm = |i: usize, j: usize, v: LogScaledReal| -> f64 {
        (v / (g[i * dim + i] * g[j * dim + j]).sqrt_abs()).to_f64().abs()
    };
    let mut max_offdiag = 0.0_f64;
    let mut max_parity = 0.0_f64;
    let mut tail_change = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            let k = i * dim + j;
            tail_change = tail_change.max(diag_norm(i, j, g_ext[k] - g[k]));
            if i != j {
                let v = diag_norm(i, j, g[k]);
                max_offdiag = max_offdiag.max(v);
                if (i + j) % 2 == 1 {
                    max_parity = max_parity.max(v);
                }
            }
        }
    }
    let norm_ratios = (0..dim)
        .map(|n| dual_norm_printed(n, rep).map(|h| (g[n * dim + n] / LogScaledReal::from_f64(h)).to_f64()))
        .collect::<Result<Vec<_>>>()?;
    // entries scaled by the diagonal so they stay in range
    let gram = (0..dim * dim)
        .map(|k| {
            let (i, j) = (k / dim, k % dim);
            (g[k] / (g[i * dim + i] * g[j * dim + j]).sqrt_abs()).to_f64()
        })
        .collect();
    Ok(GramReport {
        dim,
        terms_used: cut,
        gram,
        max_offdiag,
        max_parity,
        norm_ratios,
        tail_change,
    })
}

// ---------------------------------------------------------------------------
// Total mass
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct TotalMass {
    /// Σ (aq,−aq;q)ₙqⁿ/(q,−q;q)ₙ summed directly.
    pub s_direct: f64,
    /// (a²q³;q²)_∞/(q;q²)_∞.
    pub s_closed: f64,
    pub rel_diff: f64,
    /// Σ wₙ = Σ (−a²q²;q²)ₙqⁿ/(q²;q²)ₙ, the sum with the opposite sign of a².
    pub s_weights: f64,
    /// (−a²q²;q²)_∞/(−a²q²,−q;q)_∞.
    pub prefactor_first: f64,
    /// (−a²q²;q)_∞/(−a²q²,−q;q)_∞.
    pub prefactor_second: f64,
}

/// Sums Σ tₙ given t₀ = 1 and the term ratio, until terms fall below
/// rounding of the running sum.
fn sum_by_ratio(ratio: impl Fn(usize) -> f64, what: &str) -> Result<(f64, f64)> {
    let tol = SeriesTolerance::default();
    let mut s = KahanSum::new();
    let mut abs = KahanSum::new();
    let mut t = 1.0;
    for n in 0..tol.max_terms {
        s.add(t);
        abs.add(t.abs());
        let next = t * ratio(n);
        if next == 0.0 || (n > 8 && next.abs() <= tol.eps_term * abs.total() && next.abs() < t.abs()) {
            return Ok((s.total(), abs.total()));
        }
        t = next;
    }
    Err(Error::Truncation(format!("{what}: no convergence in {} terms", tol.max_terms)))
}

/// Σ (aq,−aq;q)ₙqⁿ/(q,−q;q)ₙ with literal Pochhammer factors. Large a makes
/// the early terms alternate and cancel by several orders of magnitude, so
/// terms and sum are carried in double-double.
fn total_mass_direct(q: f64, a: f64) -> Result<f64> {
    let tol = SeriesTolerance::default();
    let one = TwoFloat::from(1.0);
    let mut qn = TwoFloat::from(q);
    let mut t = one;
    let mut s = TwoFloat::from(0.0);
    let mut abs = 0.0;
    for n in 0..tol.max_terms {
        s += t;
        abs += f64::from(t).abs();
        let aqn = qn * a;
        let next = dd_div(t * (one - aqn) * (one + aqn), (one - qn) * (one + qn)) * q;
        let nf = f64::from(next).abs();
        if nf == 0.0 || (n > 8 && nf <= 1e-34 * abs && nf < f64::from(t).abs()) {
            return Ok(f64::from(s));
        }
        t = next;
        qn *= q;
    }
    Err(Error::Truncation(format!("total-mass sum: no convergence in {} terms", tol.max_terms)))
}

pub fn total_mass(rep: &RepParams) -> Result<TotalMass> {
    let (q, a) = (rep.q(), rep.a());
    let a2 = a * a;
    let s_direct = total_mass_direct(q, a)?;
    let s_closed = qinf(a2 * q * q * q, q * q)? / qinf(q, q * q)?;
    let (s_weights, _) = sum_by_ratio(
        |n| {
            let qn = (q * q).powi(n as i32 + 1);
            q * (1.0 + a2 * qn) / (1.0 - qn)
        },
        "weight sum",
    )?;
    let denom = qinf(-a2 * q * q, q)? * qinf(-q, q)?;
    Ok(TotalMass {
        s_direct,
        s_closed,
        rel_diff: (s_direct - s_closed).abs() / s_closed.abs(),
        s_weights,
        prefactor_first: qinf(-a2 * q * q, q * q)? / denom,
        prefactor_second: qinf(-a2 * q * q, q)? / denom,
    })
}

impl TotalMass {
    /// Ledger entries for the printed unit-mass identity and its variants.
    pub fn ledger(&self) -> Vec<LedgerEntry> {
        let (p1, p2, s, sw) = (self.prefactor_first, self.prefactor_second, self.s_direct, self.s_weights);
        vec![
            LedgerEntry::new(
                "total_mass_printed",
                "(-a^2q^2;q^2)_inf/(-a^2q^2,-q;q)_inf * S + (-a^2q^2;q)_inf/(-a^2q^2,-q;q)_inf * S = 1, S = sum (aq,-aq;q)_n q^n/(q,-q;q)_n",
                &[1.0],
                &[p1 * s + p2 * s],
            ),
            LedgerEntry::new(
                "total_mass_first_prefactor",
                "both terms with prefactor (-a^2q^2;q^2)_inf/(-a^2q^2,-q;q)_inf: 2 * prefactor * S = 1",
                &[1.0],
                &[2.0 * p1 * s],
            ),
            LedgerEntry::new(
                "total_mass_second_prefactor",
                "both terms with prefactor (-a^2q^2;q)_inf/(-a^2q^2,-q;q)_inf: 2 * prefactor * S = 1",
                &[1.0],
                &[2.0 * p2 * s],
            ),
            LedgerEntry::new(
                "total_mass_first_prefactor_weight_sum",
                "as total_mass_first_prefactor with S replaced by sum (-a^2q^2;q^2)_n q^n/(q^2;q^2)_n",
                &[1.0],
                &[2.0 * p1 * sw],
            ),
            LedgerEntry::new(
                "total_mass_second_prefactor_weight_sum",
                "as total_mass_second_prefactor with S replaced by sum (-a^2q^2;q^2)_n q^n/(q^2;q^2)_n",
                &[1.0],
                &[2.0 * p2 * sw],
            ),
        ]
    }
}

// ---------------------------------------------------------------------------
// Norms of ψ at the outermost nodes
// ---------------------------------------------------------------------------

/// ⟨ψ_{±aq}, ψ_{±aq}⟩ = Σₘ βₘ(±aq)², with C̃ₘ(±aq) = (±1)ᵐaᵐq^{m(m+1)/2}.
pub fn scalar_product_psi(sign: i8, rep: &RepParams) -> Result<f64> {
    let mut mmax = 64;
    loop {
        let d = prefactors(mmax, rep);
        let terms: Vec<LogScaledReal> = (0..=mmax)
            .map(|m| {
                let v = special_value_closed(m, rep);
                let v = if sign < 0 && m % 2 == 1 { -v } else { v };
                let b = d[m] * v;
                b * b
            })
            .collect();
        let total = sum_log_scaled(&terms);
        if (terms[mmax] / total).to_f64() < 1e-20 {
            return Ok(total.to_f64());
        }
        mmax *= 2;
        if mmax > GRAM_INDEX_CAP {
            return Err(Error::Truncation("norm of psi did not converge".into()));
        }
    }
}

/// Ledger entries for the printed values of ⟨ψ_{aq},ψ_{aq}⟩ and ⟨ψ_{−aq},ψ_{−aq}⟩.
pub fn psi_norm_ledger(rep: &RepParams) -> Result<(f64, f64, Vec<LedgerEntry>)> {
    let (q, a2) = (rep.q(), rep.a() * rep.a());
    let plus = scalar_product_psi(1, rep)?;
    let minus = scalar_product_psi(-1, rep)?;
    let base = qinf(-a2 * q * q, q * q)?;
    let first = qinf(-a2 * q * q, q)? * qinf(-q, q)? / base;
    let second = weight_sum_closed(rep)?;
    let minus_form = qinf(-a2 * q * q, q)? * qinf(-1.0, q)? / base;
    let entries = vec![
        LedgerEntry::new("psi_norm_plus_first_form", "<psi_aq,psi_aq> = (-a^2q^2,-q;q)_inf/(-a^2q^2;q^2)_inf", &[first], &[plus]),
        LedgerEntry::new("psi_norm_plus_second_form", "<psi_aq,psi_aq> = (-a^2q^3;q^2)_inf/(q;q^2)_inf", &[second], &[plus]),
        LedgerEntry::new("psi_norm_minus", "<psi_-aq,psi_-aq> = (-a^2q^2,-1;q)_inf/(-a^2q^2;q^2)_inf", &[minus_form], &[minus]),
    ];
    Ok((plus, minus, entries))
}

// ---------------------------------------------------------------------------
// Unitarity of the normalized frame
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct UnitarityReport {
    /// Largest |Σₘ â_i â_j| over distinct certified columns (same or opposite sign).
    pub max_column_offdiag: f64,
    /// Largest |Σₙ(â_{mn}â_{kn} + â′_{mn}â′_{kn})| over distinct rows.
    pub max_row_offdiag: f64,
    /// Σₘ â_j² for certified columns j.
    pub column_diag: Vec<f64>,
    pub row_diag: Vec<f64>,
    pub certified_columns: usize,
    pub rows_certified: bool,
}

pub fn unitarity(frame: &UnitaryFrame) -> UnitarityReport {
    let cert: Vec<usize> = (0..frame.cols()).filter(|&j| frame.col_converged[j]).collect();
    let pairs: Vec<(usize, usize)> = cert.iter().flat_map(|&i| cert.iter().map(move |&j| (i, j))).filter(|(i, j)| i <= j).collect();
    let inner: Vec<(usize, usize, f64)> = pairs.par_iter().map(|&(i, j)| (i, j, frame.column_inner(i, j))).collect();
    let mut max_column_offdiag = 0.0_f64;
    let mut column_diag = Vec::new();
    for &(i, j, v) in &inner {
        if i == j {
            column_diag.push(v);
        } else {
            max_column_offdiag = max_column_offdiag.max(v.abs());
        }
    }
    let mut max_row_offdiag = 0.0_f64;
    let mut row_diag = Vec::new();
    for m in 0..frame.rows {
        for k in m..frame.rows {
            let v = frame.row_inner(m, k);
            if m == k {
                row_diag.push(v);
            } else {
                max_row_offdiag = max_row_offdiag.max(v.abs());
            }
        }
    }
    if !frame.rows_converged {
        max_row_offdiag = f64::INFINITY;
    }
    UnitarityReport {
        max_column_offdiag,
        max_row_offdiag,
        column_diag,
        row_diag,
        certified_columns: cert.len(),
        rows_certified: frame.rows_converged,
    }
}

/// The normalization constant that makes the columns unit vectors,
/// 1/sqrt⟨ψ_{aq},ψ_{aq}⟩ (the n = 0 column has c₀ = C and β₀ = 1).
pub fn computed_c(rep: &RepParams) -> Result<f64> {
    Ok(1.0 / scalar_product_psi(1, rep)?.sqrt())
}

// ---------------------------------------------------------------------------
// The functions Fₙ
// ---------------------------------------------------------------------------

/// Fₙ(x;a²) = ₃φ₂(x, a²q/x, aq^{n+1}; iaq, −iaq; q, q), real throughout since
/// (iaq;q)ₖ(−iaq;q)ₖ = (−a²q²;q²)ₖ. Terminates at x = q⁻ᵐ.
pub fn f_dual(x: f64, n: usize, rep: &RepParams) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("F_n needs a finite nonzero argument, got {x}")));
    }
    let (q, a) = (rep.q(), rep.a());
    let a2 = a * a;
    let b = a2 * q / x;
    let c = a * q.powi(n as i32 + 1);
    let (v, _) = sum_by_ratio(
        |k| {
            let qk = q.powi(k as i32);
            (1.0 - x * qk) * (1.0 - b * qk) * (1.0 - c * qk) / ((1.0 - q * qk) * (1.0 + a2 * q * q * qk * qk)) * q
        },
        "F_n series",
    )?;
    Ok(v)
}

/// Spread of Fₙ(q⁻ᵐ)/βₘ(aq^{n+1}) over m ≤ mmax, i.e. how far the matrix
/// entries are from being proportional to Fₙ on the points q⁻ᵐ.
pub fn f_dual_proportionality(n: usize, mmax: usize, rep: &RepParams) -> Result<f64> {
    let b = node_betas(mmax, n, rep)?;
    let ratios: Vec<f64> = (0..=mmax)
        .map(|m| f_dual(rep.q().powi(-(m as i32)), n, rep).map(|f| f / b[m].to_f64()))
        .collect::<Result<_>>()?;
    let mean = kahan_sum(&ratios) / ratios.len() as f64;
    Ok(ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max))
}

// ---------------------------------------------------------------------------
// Aggregate certification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Caps {
    /// Highest polynomial degree in the Gram matrices; also the frame's row count.
    pub degree: usize,
    /// Node pairs (frame columns / 2).
    pub nodes: usize,
    /// Size of the truncated Jacobi matrix.
    pub size: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            degree: 20,
            nodes: 40,
            size: 80,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// Largest-|λ| eigenvalues matched against the grid.
    pub top: usize,
    /// Relative perturbation applied to the node weight w₁.
    pub weight_perturbation: Option<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            top: 10,
            weight_perturbation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportParams {
    pub q: f64,
    pub a: f64,
    pub degree: usize,
    pub nodes: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub params: ReportParams,
    pub checks: Vec<Check>,
    pub ledger: Vec<LedgerEntry>,
    pub verdict: Verdict,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn entry(&self, id: &str) -> Option<&LedgerEntry> {
        self.ledger.iter().find(|e| e.id == id)
    }
}

/// Relative tolerance for matching eigenvalues to the grid.
pub fn spectrum_tolerance(q: f64) -> f64 {
    if q > 0.8 {
        1e-6
    } else {
        1e-8
    }
}

/// Evaluation points used by the pointwise scans: ±aq^{k+1}, k ≤ 5, and 0.3a.
fn scan_points(rep: &RepParams) -> Vec<SpectralPoint> {
    let mut pts: Vec<SpectralPoint> = (0..=5).flat_map(|k| [Node::plus(k).into(), Node::minus(k).into()]).collect();
    pts.push(SpectralPoint::classify(0.3 * rep.a(), &rep.family()));
    pts
}

fn pointwise_checks(rep: &RepParams) -> Result<(Vec<Check>, Vec<LedgerEntry>)> {
    let fam = rep.family();
    let mut checks = Vec::new();

    let sym = (0..=200).map(|n| symmetrization_residual(n, rep)).fold(0.0, f64::max);
    checks.push(Check::bound("symmetrization", sym, 1e-13));
    let nonpositive = (0..=200)
        .filter(|&n| !(recurrence_coeffs(n, &fam).a * recurrence_coeffs(n + 1, &fam).c > 0.0))
        .count();
    checks.push(Check::bound("favard_positivity", nonpositive as f64, 0.0).with_note("count of n <= 200 with A_n C_(n+1) <= 0"));

    let mut routes = 0.0_f64;
    for m in 0..=10 {
        for sign in [1, -1] {
            let x = Node { sign, k: m }.value(&fam);
            for n in 0..=30 {
                routes = routes.max(compare_routes(n, &fam, x)?.scaled_diff());
            }
        }
    }
    checks.push(Check::bound("series_recurrence", routes, 1e-10));

    let pts = scan_points(rep);
    let mut qd = 0.0_f64;
    let mut collapse = 0.0_f64;
    let mut jact = 0.0_f64;
    for &pt in &pts {
        collapse = collapse.max(qdiff_residual(0, rep, pt)?);
        for n in 1..=30 {
            qd = qd.max(qdiff_residual(n, rep, pt)?);
        }
        jact = jact.max(j_action_residual(pt, 31, rep)?);
    }
    checks.push(Check::bound("qdiff", qd, 1e-9));
    checks.push(Check::bound("qdiff_collapse", collapse, 1e-13));
    checks.push(Check::bound("j_action", jact, 1e-9));

    let plus = ctilde_at_node(30, &fam, Node::plus(0))?;
    let minus = ctilde_at_node(30, &fam, Node::minus(0))?;
    let mut sv = 0.0_f64;
    let mut printed = Vec::new();
    let mut corrected = Vec::new();
    let mut minus_vals = Vec::new();
    for n in 0..=30 {
        let closed = special_value_closed(n, rep);
        sv = sv.max(((plus.values[n] - closed) / closed).to_f64().abs());
        let signed = if n % 2 == 1 { -closed } else { closed };
        sv = sv.max(((minus.values[n] - signed) / closed).to_f64().abs());
        printed.push(LogScaledReal::from_log(1, 2.0 * rep.a().ln() + (n * (n + 1)) as f64 * rep.q().ln()));
        corrected.push(closed);
        minus_vals.push(minus.values[n]);
    }
    checks.push(Check::bound("special_value", sv, 1e-11));
    // ratios taken in log-scaled form, then materialized
    let ratio = |num: &LogScaledReal, den: &LogScaledReal| (*num / *den).to_f64();
    let printed_offsets: Vec<f64> = corrected.iter().zip(&printed).map(|(c, p)| ratio(c, p)).collect();
    let minus_offsets: Vec<f64> = minus_vals.iter().zip(&corrected).map(|(v, c)| ratio(v, c)).collect();
    let mut printed_entry =
        LedgerEntry::new("special_value_printed", "C_n(aq;q) = a^2 q^(n(n+1)), n <= 30", &vec![1.0; 31], &printed_offsets);
    // the n = 0 values themselves: a² claimed against C_0 = 1
    printed_entry.claimed = rep.a() * rep.a();
    printed_entry.computed = 1.0;
    let ledger = vec![
        printed_entry,
        LedgerEntry::new(
            "special_value_minus_node",
            "C_n(-aq;q) equals C_n(aq;q), n <= 30 (parity gives a factor (-1)^n)",
            &vec![1.0; 31],
            &minus_offsets,
        ),
    ];
    Ok((checks, ledger))
}

fn spectral_checks(rep: &RepParams, caps: &Caps, top: usize) -> Result<(Vec<Check>, Vec<LedgerEntry>)> {
    let op = build_operator(caps.size, rep)?;
    let tol = spectrum_tolerance(rep.q());
    let eigs = eigenvalues(&op, 1e-15)?;
    let mut checks = Vec::new();
    let radius = rep.spectral_radius();
    let excess = eigs.iter().map(|x| x.abs() / radius - 1.0).fold(0.0, f64::max);
    checks.push(Check::bound("spectral_radius", excess, 1e-8));
    match match_spectrum(&eigs, rep, top, tol) {
        Ok(r) => {
            let complete = r.matched.len() == top.min(eigs.len());
            let mut c = Check::bound("spectrum_match", r.max_rel_err, tol);
            if !complete {
                c.verdict = Verdict::Fail;
            }
            checks.push(c.with_note(format!("{} of {top} eigenvalues matched", r.matched.len())));
        }
        Err(Error::SpectrumViolation { computed, .. }) => {
            checks.push(Check::bound("spectrum_match", f64::INFINITY, tol).with_note(format!("eigenvalue {computed} outside the spectral radius")));
        }
        Err(e) => return Err(e),
    }

    let measure = spectral_measure(&op, 1e-15)?;
    checks.push(Check::bound("measure_completeness", (measure.total_mass() - 1.0).abs(), 1e-12));
    checks.push(Check::bound("measure_parity", measure.parity_defect(), 1e-10));
    let (ratio_err, norm_err, masses) = measure_against_weights(&measure, rep, caps.size, 4)?;
    checks.push(Check::bound("measure_weight_ratios", ratio_err, 1e-6));
    checks.push(Check::bound("measure_psi_norms", norm_err, 1e-6));
    let p = weight_sum_closed(rep)?;
    let claimed: Vec<f64> = (0..masses.len()).map(|k| node_weight(k, rep) / p).collect();
    let ledger = vec![LedgerEntry::new(
        "measure_mass_vs_printed_norm",
        "mass at aq^(k+1) equals w_k / h_0 with the printed h_0 = (-a^2q^3;q^2)_inf/(q;q^2)_inf, k < 4",
        &claimed,
        &masses,
    )];
    Ok((checks, ledger))
}

/// Compares masses at ±aq^{k+1}, k < `pairs`, with the node weights and with
/// the norms of ψ. Returns (worst weight-ratio error, worst |mass·‖ψ‖² − 1|,
/// masses at the positive nodes).
pub fn measure_against_weights(
    measure: &SpectralMeasure,
    rep: &RepParams,
    size: usize,
    pairs: usize,
) -> Result<(f64, f64, Vec<f64>)> {
    let fam = rep.family();
    let mass_at = |node: Node| -> Result<f64> {
        let x = node.value(&fam);
        let i = measure.nearest(x).ok_or_else(|| Error::Solver("empty spectral measure".into()))?;
        if measure.flagged[i] {
            return Err(Error::Solver(format!("node {x} is flagged by the eigensolver")));
        }
        Ok(measure.masses[i])
    };
    let mut ratio_err = 0.0_f64;
    let mut norm_err = 0.0_f64;
    let mut plus_masses = Vec::new();
    for sign in [1i8, -1] {
        let masses: Vec<f64> = (0..=pairs).map(|k| mass_at(Node { sign, k })).collect::<Result<_>>()?;
        for k in 0..pairs {
            let want = node_weight(k + 1, rep) / node_weight(k, rep);
            ratio_err = ratio_err.max((masses[k + 1] / masses[k] / want - 1.0).abs());
        }
        if sign > 0 {
            plus_masses = masses[..pairs].to_vec();
        }
    }
    for (k, &mass) in plus_masses.iter().enumerate() {
        let b = node_betas(size + 80, k, rep)?;
        let sq: Vec<LogScaledReal> = b.iter().map(|x| *x * *x).collect();
        let norm = sum_log_scaled(&sq).to_f64();
        norm_err = norm_err.max((mass * norm - 1.0).abs());
    }
    Ok((ratio_err, norm_err, plus_masses))
}

fn gram_checks(rep: &RepParams, caps: &Caps, perturb: Option<WeightPerturbation>) -> Result<(Vec<Check>, Vec<LedgerEntry>)> {
    let mut checks = Vec::new();
    let mut ledger = Vec::new();

    let primal = gram_primal(caps.degree, rep, perturb)?;
    checks.push(Check::bound("primal_offdiag", primal.max_offdiag, 1e-8).with_note(format!("{} nodes summed", primal.terms_used)));
    checks.push(Check::bound("primal_parity", primal.max_parity, 1e-14));
    let e = LedgerEntry::new(
        "primal_norm",
        "sum over nodes of w_n C_m C_m' equals (-a^2q^3;q^2)_inf/(q;q^2)_inf * (1+a^2q)(q;q)_m a^(2m) q^(m(m+3)/2) / ((1+a^2q^(2m+1))(-a^2q;q)_m) on the diagonal",
        &vec![1.0; primal.dim],
        &primal.norm_ratios,
    );
    checks.push(Check::from_ledger("primal_norm_ratio", &e));
    ledger.push(e);

    let dual_dim = caps.degree.min(20);
    let dual = gram_dual(dual_dim, rep, None)?;
    checks.push(Check::bound("dual_offdiag", dual.max_offdiag, 1e-8).with_note(format!("{} grid points summed", dual.terms_used)));
    checks.push(Check::bound("dual_tail", dual.tail_change, 1e-12));
    let e = LedgerEntry::new(
        "dual_norm",
        "sum over m of W_m D_n D_n' equals 2(-a^2q^3;q^2)_inf/(q;q^2)_inf * (q^2;q^2)_n q^(-n) / (-a^2q^2;q^2)_n on the diagonal",
        &vec![1.0; dual.dim],
        &dual.norm_ratios,
    );
    checks.push(Check::from_ledger("dual_norm_ratio", &e));
    ledger.push(e);
    Ok((checks, ledger))
}

fn frame_checks(rep: &RepParams, caps: &Caps) -> Result<(Vec<Check>, Vec<LedgerEntry>)> {
    let mut checks = Vec::new();
    let (c1, c2) = printed_c_forms(rep)?;
    checks.push(Check::bound("c_printed_forms_agree", (c1 / c2 - 1.0).abs(), 1e-12));
    let c = computed_c(rep)?;
    let frame = build_frame_with(caps.degree + 1, caps.nodes, rep, c)?;
    let u = unitarity(&frame);
    let note = format!("{} of {} columns certified", u.certified_columns, frame.cols());
    checks.push(Check::bound("unitarity_columns", u.max_column_offdiag, 1e-8).with_note(note));
    checks.push(Check::bound("unitarity_rows", u.max_row_offdiag, 1e-8));
    let col_dev = u.column_diag.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check::bound("unitarity_column_norms", col_dev, 1e-8));
    let row_dev = u.row_diag.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check::bound("unitarity_row_norms", row_dev, 1e-8));

    // with the printed C every entry scales by c2/c, so squared sums by (c2/c)²
    let scale = (c2 / c).powi(2);
    let col_printed: Vec<f64> = u.column_diag.iter().map(|d| d * scale).collect();
    let row_printed: Vec<f64> = u.row_diag.iter().map(|d| d * scale).collect();
    let ledger = vec![
        LedgerEntry::new(
            "normalization_constant",
            "C^2 = (q;q^2)_inf/(-a^2q^3;q^2)_inf makes the n = 0 column a unit vector",
            &[c2 * c2],
            &[c * c],
        ),
        LedgerEntry::new("column_norms_printed_c", "sum_m a_mn^2 = 1 with the printed C", &vec![1.0; col_printed.len()], &col_printed),
        LedgerEntry::new("row_norms_printed_c", "sum_n (a_mn^2 + a'_mn^2) = 1 with the printed C", &vec![1.0; row_printed.len()], &row_printed),
    ];
    Ok((checks, ledger))
}

fn norm_and_mass_checks(rep: &RepParams) -> Result<(Vec<Check>, Vec<LedgerEntry>)> {
    let mut checks = Vec::new();
    let (q, a2) = (rep.q(), rep.a() * rep.a());
    let (plus, minus, mut ledger) = psi_norm_ledger(rep)?;
    checks.push(Check::bound("psi_norm_parity", (plus - minus).abs() / plus, 1e-12));
    let all_rational = ledger.iter().all(LedgerEntry::is_simple_rational);
    checks.push(Check {
        verdict: if all_rational { Verdict::Flagged } else { Verdict::Info },
        ..Check::info("psi_norm_printed_forms", ledger.iter().map(|e| e.offset_spread).fold(0.0, f64::max), "")
    }
    .with_note(ledger.iter().map(|e| format!("{} {}", e.id, fmt_offset(e))).collect::<Vec<_>>().join("; ")));

    let split = (qinf(-a2 * q * q, q)? / (qinf(-a2 * q * q, q * q)? * qinf(-a2 * q * q * q, q * q)?) - 1.0).abs();
    let euler = (qinf(-q, q)? * qinf(q, q * q)? - 1.0).abs();
    checks.push(Check::bound("product_identities", split.max(euler), 1e-12));

    let tm = total_mass(rep)?;
    checks.push(Check::bound("total_mass_closed_form", tm.rel_diff, 1e-12));
    let p = weight_sum_closed(rep)?;
    checks.push(Check::bound("weight_sum_closed_form", (tm.s_weights / p - 1.0).abs(), 1e-12));
    let mass_ledger = tm.ledger();
    let printed_rational = mass_ledger[..3].iter().all(LedgerEntry::is_simple_rational);
    checks.push(Check {
        verdict: if printed_rational { Verdict::Flagged } else { Verdict::Info },
        ..Check::info("total_mass_printed_prefactors", f64::NAN, "")
    }
    .with_note(mass_ledger.iter().map(|e| format!("{} {}", e.id, fmt_offset(e))).collect::<Vec<_>>().join("; ")));
    ledger.extend(mass_ledger);

    let unit = (0..5).map(|n| f_dual(1.0, n, rep).map(|v| (v - 1.0).abs())).collect::<Result<Vec<_>>>()?;
    checks.push(Check::bound("f_dual_unit_point", unit.iter().copied().fold(0.0, f64::max), 1e-15));
    let spread = (0..3).map(|n| f_dual_proportionality(n, 8, rep)).collect::<Result<Vec<_>>>()?;
    checks.push(Check::info(
        "f_dual_proportionality",
        spread.iter().copied().fold(0.0, f64::max),
        "spread of F_n(q^-m)/beta_m(aq^(n+1)) over m <= 8, n < 3; exploratory",
    ));
    Ok((checks, ledger))
}

/// Runs every certification check at the given caps.
pub fn certify(rep: &RepParams, caps: Caps, options: CertifyOptions) -> Result<CertificationReport> {
    if caps.degree == 0 || caps.nodes == 0 || caps.size < 2 {
        return Err(Error::Parameter(format!(
            "caps need degree >= 1, nodes >= 1, size >= 2; got {caps:?}"
        )));
    }
    if options.top == 0 {
        return Err(Error::Parameter("top must be at least 1".into()));
    }
    let perturb = options.weight_perturbation.map(|rel| WeightPerturbation { index: 1, rel });
    let mut checks = Vec::new();
    let mut ledger = Vec::new();
    for part in [
        pointwise_checks(rep)?,
        spectral_checks(rep, &caps, options.top)?,
        gram_checks(rep, &caps, perturb)?,
        frame_checks(rep, &caps)?,
        norm_and_mass_checks(rep)?,
    ] {
        checks.extend(part.0);
        ledger.extend(part.1);
    }
    let verdict = if checks.iter().any(|c| c.verdict == Verdict::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(CertificationReport {
        params: ReportParams {
            q: rep.q(),
            a: rep.a(),
            degree: caps.degree,
            nodes: caps.nodes,
            size: caps.size,
        },
        checks,
        ledger,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(q: f64, a: f64) -> RepParams {
        RepParams::new(q, a).unwrap()
    }

    #[test]
    fn rational_detection() {
        assert_eq!(nearest_rational(2.0 + 1e-10), Some("2"));
        assert_eq!(nearest_rational(0.5), Some("1/2"));
        assert_eq!(nearest_rational(1.5), None);
        let e = LedgerEntry::new("x", "", &[1.0, 2.0], &[2.0, 4.0]);
        assert!(e.stable && e.is_simple_rational());
        let e = LedgerEntry::new("x", "", &[1.0, 1.0], &[2.0, 2.1]);
        assert!(!e.stable);
    }

    #[test]
    fn primal_gram_q_binomial_oracle() {
        // G_00 = 2 Σ wₙ and Σ (c;q²)ₙqⁿ/(q²;q²)ₙ = (cq;q²)_∞/(q;q²)_∞ with c = −a²q²
        let r = rep(0.5, 1.0);
        let g = gram_primal(4, &r, None).unwrap();
        let (q, c) = (0.5_f64, -0.25_f64);
        let mut num = 1.0;
        let mut den = 1.0;
        for k in 0..2000 {
            num *= 1.0 - c * q * q.powi(2 * k);
            den *= 1.0 - q * q.powi(2 * k);
        }
        assert!((g.gram[0] / (2.0 * num / den) - 1.0).abs() < 1e-13);
        assert!(g.max_parity == 0.0);
        assert!(g.max_offdiag < 1e-8);
        for r in &g.norm_ratios {
            assert!((r - 2.0).abs() < 1e-10, "{r}");
        }
    }

    #[test]
    fn dual_gram_small() {
        let r = rep(0.5, 1.0);
        let g = gram_dual(3, &r, None).unwrap();
        assert!(g.max_offdiag < 1e-8, "{}", g.max_offdiag);
        assert!(g.tail_change < 1e-12);
        for x in &g.norm_ratios {
            assert!((x - 1.0).abs() < 1e-10, "{x}");
        }
    }

    #[test]
    fn total_mass_closed_form() {
        for &(q, a) in &[(0.3, 0.25), (0.5, 1.0), (0.9, 4.0)] {
            let t = total_mass(&rep(q, a)).unwrap();
            assert!(t.rel_diff < 1e-12, "q={q} a={a}: {}", t.rel_diff);
        }
    }

    #[test]
    fn psi_norm_offsets() {
        let (plus, minus, e) = psi_norm_ledger(&rep(0.5, 1.0)).unwrap();
        assert!((plus - minus).abs() < 1e-12 * plus);
        let offs: Vec<_> = e.iter().map(|x| x.nearest_rational.clone()).collect();
        assert_eq!(offs, vec![Some("2".into()), Some("2".into()), Some("1".into())]);
    }

    #[test]
    fn f_dual_examples() {
        let r = rep(0.5, 1.0);
        for n in 0..4 {
            assert_eq!(f_dual(1.0, n, &r).unwrap(), 1.0);
        }
        // x = 2: terms 1 and (1−2)(1−1/4)(1−1/2)/((1−1/2)(1+1/4))·(1/2)
        assert!((f_dual(2.0, 0, &r).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn unitarity_with_computed_constant() {
        let r = rep(0.5, 1.0);
        let frame = build_frame_with(12, 10, &r, computed_c(&r).unwrap()).unwrap();
        let u = unitarity(&frame);
        assert!(u.certified_columns > 0);
        assert!(u.max_column_offdiag < 1e-8 && u.max_row_offdiag < 1e-8);
        assert!(u.column_diag.iter().chain(&u.row_diag).all(|d| (d - 1.0).abs() < 1e-8));
    }

    #[test]
    fn certify_rejects_bad_caps() {
        let caps = Caps { size: 1, ..Caps::default() };
        assert!(matches!(certify(&rep(0.5, 1.0), caps, CertifyOptions::default()), Err(Error::Parameter(_))));
    }
}
