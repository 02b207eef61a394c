//! Operators of the lowest-weight representation with q^{2l−1} = −a.
//!
//! The symmetric operator `I` acts on the basis |n⟩ as a zero-diagonal
//! Jacobi matrix with off-diagonal entries aₙ. Its formal eigenvectors
//! ψ_λ = Σ βₘ(λ)|m⟩ have coefficients βₘ(λ) = dₘ·C̃ₘ^{(a²)}(λ;q), and the
//! diagonal operator `J|n⟩ = (q⁻ⁿ − a²qⁿ⁺¹)|n⟩` shifts λ along the grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qseries::{qpoch_inf, sum_log_scaled, LogScaledReal, SeriesTolerance};
use crate::ultraspherical::{
    ctilde_at_node, ctilde_values, qdiff_coefficients, recurrence_coeffs, FamilyParams, Node, SpectralPoint,
};

/// Representation parameters (q, a): 0 < q < 1, a > 0. The lowest weight l is
/// fixed implicitly by q^{2l−1} = −a and never materialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepParams {
    q: f64,
    a: f64,
}

impl RepParams {
    pub fn new(q: f64, a: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Parameter(format!("q must lie in (0,1), got {q}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Parameter(format!("a must be positive, got {a}")));
        }
        Ok(Self { q, a })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// The polynomial family C̃^{(a²)}.
    pub fn family(&self) -> FamilyParams {
        FamilyParams::new(self.q, self.a * self.a).expect("validated at construction")
    }

    /// The outermost spectral point a·q.
    pub fn spectral_radius(&self) -> f64 {
        self.a * self.q
    }
}

// ---------------------------------------------------------------------------
// Jacobi matrix of I
// ---------------------------------------------------------------------------

/// Coupling aₙ = ⟨n+1|I|n⟩.
pub fn jacobi_offdiag(n: usize, rep: &RepParams) -> f64 {
    let (q, a2) = (rep.q, rep.a * rep.a);
    let ni = n as i32;
    let lead = (a2 * q.powi(ni + 2)).sqrt();
    let num = (1.0 - q.powi(ni + 1)) * (1.0 + a2 * q.powi(ni + 1));
    let den = (1.0 + a2 * q.powi(2 * ni + 1)) * (1.0 + a2 * q.powi(2 * ni + 3));
    lead * (num / den).sqrt()
}

/// The N×N finite section of `I`: zero diagonal, positive off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    offdiag: Vec<f64>,
}

pub const SYMMETRIZATION_TOL: f64 = 1e-13;

impl TridiagonalOperator {
    pub fn size(&self) -> usize {
        self.offdiag.len() + 1
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Infinity norm of the truncated matrix.
    pub fn norm_inf(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i] } else { 0.0 };
                left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                let mut s = 0.0;
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Relative mismatch |aₙ² − Aₙ·Cₙ₊₁| / aₙ² with A, C taken from the family a².
pub fn symmetrization_residual(n: usize, rep: &RepParams) -> f64 {
    let fam = rep.family();
    let an = jacobi_offdiag(n, rep);
    let prod = recurrence_coeffs(n, &fam).a * recurrence_coeffs(n + 1, &fam).c;
    (an * an - prod).abs() / (an * an)
}

pub fn build_operator(size: usize, rep: &RepParams) -> Result<TridiagonalOperator> {
    if size < 2 {
        return Err(Error::Parameter(format!("operator size must be at least 2, got {size}")));
    }
    let offdiag: Vec<f64> = (0..size - 1).map(|n| jacobi_offdiag(n, rep)).collect();
    for (n, &an) in offdiag.iter().enumerate() {
        if !(an > 0.0) {
            return Err(Error::Construction(format!("a_{n} = {an} is not strictly positive")));
        }
        let r = symmetrization_residual(n, rep);
        if r > SYMMETRIZATION_TOL {
            return Err(Error::Construction(format!("a_{n}^2 != A_n C_(n+1): relative gap {r:e}")));
        }
    }
    let sq = rep.q.sqrt();
    for n in 20..offdiag.len().saturating_sub(1) {
        let dev = (offdiag[n + 1] / offdiag[n] - sq).abs();
        // the asymptotic bound sinks below rounding once q^{n/2} < ε
        if dev > 10.0 * rep.q.powf(n as f64 / 2.0) + 16.0 * f64::EPSILON {
            return Err(Error::Construction(format!("ratio a_(n+1)/a_n at n={n} deviates from sqrt(q) by {dev:e}")));
        }
    }
    Ok(TridiagonalOperator { offdiag })
}

// ---------------------------------------------------------------------------
// Eigenvector coefficients
// ---------------------------------------------------------------------------

/// Prefactors d₀..d_mmax with βₘ = dₘ·C̃ₘ:
/// dₘ² = (−a²q;q)ₘ(1+a²q^{2m+1}) / ((q;q)ₘ(1+a²q)a^{2m}) · q^{−m(m+3)/2}.
pub fn prefactors(mmax: usize, rep: &RepParams) -> Vec<LogScaledReal> {
    let (q, a) = (rep.q, rep.a);
    let a2 = a * a;
    let lq = q.ln();
    let base = (a2 * q).ln_1p();
    let mut poch = 0.0;
    let mut out = Vec::with_capacity(mmax + 1);
    for m in 0..=mmax {
        if m > 0 {
            let qm = q.powi(m as i32);
            poch += (a2 * qm).ln_1p() - (-qm).ln_1p();
        }
        let mf = m as f64;
        let log_sq = poch + (a2 * q.powi(2 * m as i32 + 1)).ln_1p() - base - 2.0 * mf * a.ln() - 0.5 * mf * (mf + 3.0) * lq;
        out.push(LogScaledReal::from_log(1, 0.5 * log_sq));
    }
    out
}

/// β₀(λ)..β_mmax(λ).
pub fn beta_sequence(mmax: usize, point: impl Into<SpectralPoint>, rep: &RepParams) -> Result<Vec<LogScaledReal>> {
    let vals = ctilde_values(mmax, &rep.family(), point.into())?;
    Ok(prefactors(mmax, rep).into_iter().zip(vals).map(|(d, c)| d * c).collect())
}

pub fn beta(m: usize, point: impl Into<SpectralPoint>, rep: &RepParams) -> Result<LogScaledReal> {
    Ok(beta_sequence(m, point, rep)?[m])
}

/// β₀..β_mmax at the node +a·q^{n+1} via the minimal-solution route.
pub fn node_betas(mmax: usize, n: usize, rep: &RepParams) -> Result<Vec<LogScaledReal>> {
    let ev = ctilde_at_node(mmax, &rep.family(), Node::plus(n))?;
    Ok(prefactors(mmax, rep).into_iter().zip(ev.values).map(|(d, c)| d * c).collect())
}

/// ψ_λ truncated to the first N basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorExpansion {
    pub point: SpectralPoint,
    pub lam: f64,
    pub coeffs: Vec<LogScaledReal>,
}

pub fn eigenvector(point: impl Into<SpectralPoint>, size: usize, rep: &RepParams) -> Result<EigenvectorExpansion> {
    if size < 2 {
        return Err(Error::Parameter(format!("eigenvector size must be at least 2, got {size}")));
    }
    let point = point.into();
    let coeffs = beta_sequence(size - 1, point, rep)?;
    Ok(EigenvectorExpansion {
        point,
        lam: point.value(&rep.family()),
        coeffs,
    })
}

impl EigenvectorExpansion {
    pub fn squared_norm(&self) -> LogScaledReal {
        let sq: Vec<LogScaledReal> = self.coeffs.iter().map(|b| *b * *b).collect();
        sum_log_scaled(&sq)
    }

    /// ‖T v − λ v‖ / ‖v‖ for the finite section T of matching size.
    pub fn residual(&self, op: &TridiagonalOperator) -> f64 {
        let n = self.coeffs.len();
        assert_eq!(op.size(), n, "operator and expansion sizes differ");
        let lam = LogScaledReal::from_f64(self.lam);
        let r: Vec<LogScaledReal> = (0..n)
            .map(|i| {
                let mut terms = vec![-(lam * self.coeffs[i])];
                if i > 0 {
                    terms.push(self.coeffs[i - 1] * op.offdiag[i - 1]);
                }
                if i + 1 < n {
                    terms.push(self.coeffs[i + 1] * op.offdiag[i]);
                }
                sum_log_scaled(&terms)
            })
            .collect();
        let rr: Vec<LogScaledReal> = r.iter().map(|x| *x * *x).collect();
        (sum_log_scaled(&rr) / self.squared_norm()).sqrt_abs().to_f64()
    }
}

// ---------------------------------------------------------------------------
// The diagonal operator J
// ---------------------------------------------------------------------------

pub fn j_diag(n: usize, rep: &RepParams) -> f64 {
    rep.q.powi(-(n as i32)) - rep.a * rep.a * rep.q.powi(n as i32 + 1)
}

/// Largest per-component relative residual of the three-term J-action on
/// ψ_λ over basis indices m < N.
pub fn j_action_residual(point: impl Into<SpectralPoint>, size: usize, rep: &RepParams) -> Result<f64> {
    if size < 2 {
        return Err(Error::Parameter(format!("size must be at least 2, got {size}")));
    }
    let fam = rep.family();
    let point = match point.into() {
        SpectralPoint::Value(x) => SpectralPoint::classify(x, &fam),
        p => p,
    };
    let (k_up, k_mid, k_down) = qdiff_coefficients(point, rep)?;
    let (a2, q) = (rep.a * rep.a, rep.q);
    let mmax = size - 1;
    let mid = beta_sequence(mmax, point, rep)?;
    let up = beta_sequence(mmax, point.times_q(&fam), rep)?;
    let down = if k_down == 0.0 {
        vec![LogScaledReal::ZERO; size]
    } else {
        beta_sequence(mmax, point.over_q(&fam), rep)?
    };
    let mut worst = 0.0_f64;
    for m in 0..size {
        let terms = [
            mid[m] * j_diag(m, rep),
            -(up[m] * (-a2 * q * k_up)),
            -(mid[m] * (a2 * q * (1.0 + q) * k_mid)),
            -(down[m] * k_down),
        ];
        let scale = terms.iter().map(|t| t.abs()).fold(LogScaledReal::ZERO, |acc, t| if t.cmp_abs(&acc).is_gt() { t } else { acc });
        if scale.is_zero() {
            continue;
        }
        let rel = (sum_log_scaled(&terms) / scale).to_f64().abs();
        worst = worst.max(rel);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Normalization and the candidate unitary frame
// ---------------------------------------------------------------------------

/// Node weight wₙ = (−a²q²;q²)ₙ qⁿ / (q²;q²)ₙ.
pub fn node_weight(n: usize, rep: &RepParams) -> f64 {
    let (q, a2) = (rep.q, rep.a * rep.a);
    let q2 = q * q;
    let mut w = 1.0;
    for j in 0..n {
        let qj = q2.powi(j as i32 + 1);
        w *= q * (1.0 + a2 * qj) / (1.0 - qj);
    }
    w
}

/// Constant C and coefficients cₙ = C·√wₙ of the normalized basis.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationSchedule {
    pub big_c: f64,
    pub cs: Vec<f64>,
}

impl NormalizationSchedule {
    pub fn with_constant(count: usize, rep: &RepParams, big_c: f64) -> Self {
        Self {
            big_c,
            cs: (0..count).map(|n| big_c * node_weight(n, rep).sqrt()).collect(),
        }
    }
}

/// The two printed forms of C:
/// ((−a²q²;q²)_∞ / (−a²q²,−q;q)_∞)^{1/2} and ((q;q²)_∞ / (−a²q³;q²)_∞)^{1/2}.
pub fn printed_c_forms(rep: &RepParams) -> Result<(f64, f64)> {
    let tol = SeriesTolerance::default();
    let (q, a2) = (rep.q, rep.a * rep.a);
    let first = qpoch_inf(-a2 * q * q, q * q, &tol)? / (qpoch_inf(-a2 * q * q, q, &tol)? * qpoch_inf(-q, q, &tol)?);
    let second = qpoch_inf(q, q * q, &tol)? / qpoch_inf(-a2 * q * q * q, q * q, &tol)?;
    Ok((first.sqrt(), second.sqrt()))
}

/// Schedule with the printed constant C (second printed form).
pub fn normalization(count: usize, rep: &RepParams) -> Result<NormalizationSchedule> {
    if count == 0 {
        return Err(Error::Parameter("normalization needs at least one coefficient".into()));
    }
    let (_, c) = printed_c_forms(rep)?;
    Ok(NormalizationSchedule::with_constant(count, rep, c))
}

/// Frame entries beyond this magnitude abort materialization.
pub const FRAME_LIMIT: f64 = 1e300;

/// Matrix (â_{mn} â′_{mn}) with â_{mn} = cₙ βₘ(aq^{n+1}) and
/// â′_{mn} = cₙ βₘ(−aq^{n+1}), columns interleaved (+,0), (−,0), (+,1), …
///
/// Beyond the M stored rows, each column is continued (`col_ext`), doubling
/// the length until its last entries are negligible; a column that still
/// carries weight at `COLUMN_TAIL_CAP` is marked unconverged. Beyond the K stored
/// node pairs, the row Gram contributions Σ_{n≥K}(â_{mn}â_{m'n} + â′_{mn}â′_{m'n})
/// are summed until negligible (`row_tail_gram`, M×M row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFrame {
    pub rows: usize,
    pub pairs: usize,
    pub entries: Vec<f64>,
    pub schedule: NormalizationSchedule,
    pub col_ext: Vec<Vec<f64>>,
    pub col_converged: Vec<bool>,
    pub row_tail_gram: Vec<f64>,
    pub rows_converged: bool,
}

impl UnitaryFrame {
    pub fn cols(&self) -> usize {
        2 * self.pairs
    }

    /// Column index of the node `sign·aq^{n+1}`.
    pub fn col_index(sign: i8, n: usize) -> usize {
        2 * n + usize::from(sign < 0)
    }

    pub fn get(&self, m: usize, col: usize) -> f64 {
        self.entries[m * self.cols() + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|m| self.get(m, col)).collect()
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.entries[m * self.cols()..(m + 1) * self.cols()]
    }

    /// Continuation entry of column `col` at basis index `rows + i`.
    fn ext(&self, col: usize, i: usize) -> f64 {
        let v = self.col_ext[col / 2][i];
        if col % 2 == 1 && (self.rows + i) % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Σ_m over stored and continuation rows of the product of two columns.
    pub fn column_inner(&self, i: usize, j: usize) -> f64 {
        let mut s = crate::qseries::KahanSum::new();
        for m in 0..self.rows {
            s.add(self.get(m, i) * self.get(m, j));
        }
        for t in 0..self.col_ext[i / 2].len() {
            s.add(self.ext(i, t) * self.ext(j, t));
        }
        s.total()
    }

    /// Σ_n over stored and tail node pairs of the product of two rows.
    pub fn row_inner(&self, m: usize, k: usize) -> f64 {
        let mut s = crate::qseries::KahanSum::new();
        for (x, y) in self.row(m).iter().zip(self.row(k)) {
            s.add(x * y);
        }
        s.add(self.row_tail_gram[m * self.rows + k]);
        s.total()
    }
}

/// Extra basis rows used to continue each column.
const COLUMN_TAIL_ROWS: usize = 80;
/// Longest continuation tried before a column is reported unconverged.
const COLUMN_TAIL_CAP: usize = 5120;
/// Hard ceiling on nodes visited while summing row tails.
const ROW_TAIL_NODE_CAP: usize = 20_000;

pub fn build_frame(rows: usize, pairs: usize, rep: &RepParams) -> Result<UnitaryFrame> {
    let schedule = normalization(pairs.max(1), rep)?;
    build_frame_with(rows, pairs, rep, schedule.big_c)
}

/// Frame for an arbitrary constant C (e.g. a numerically computed one).
pub fn build_frame_with(rows: usize, pairs: usize, rep: &RepParams, big_c: f64) -> Result<UnitaryFrame> {
    if rows == 0 || pairs == 0 {
        return Err(Error::Parameter("frame needs at least one row and one node pair".into()));
    }
    let schedule = NormalizationSchedule::with_constant(pairs, rep, big_c);
    let columns: Vec<(Vec<f64>, Vec<f64>, bool)> = (0..pairs)
        .into_par_iter()
        .map(|n| -> Result<(Vec<f64>, Vec<f64>, bool)> {
            let c = LogScaledReal::from_f64(schedule.cs[n]);
            let mut ext = rows + COLUMN_TAIL_ROWS;
            loop {
                let b = node_betas(ext, n, rep)?;
                let vals: Vec<f64> = b.iter().map(|bm| (c * *bm).to_f64()).collect();
                if let Some(m) = vals[..rows].iter().position(|v| !(v.abs() <= FRAME_LIMIT)) {
                    return Err(Error::Frame(format!("entry (m={m}, n={n}) exceeds {FRAME_LIMIT:e}")));
                }
                // the continuation must end far below rounding of a unit column
                let end = vals.iter().rev().take(4).fold(0.0_f64, |m, v| m.max(v.abs()));
                let converged = vals.iter().all(|v| v.is_finite()) && end < 1e-17;
                if converged || ext >= COLUMN_TAIL_CAP {
                    let tail = vals[rows..].to_vec();
                    let head = vals[..rows].to_vec();
                    return Ok((head, tail, converged));
                }
                ext *= 2;
            }
        })
        .collect::<Result<_>>()?;

    let cols = 2 * pairs;
    let mut entries = vec![0.0; rows * cols];
    let mut col_ext = Vec::with_capacity(pairs);
    let mut col_converged = vec![false; cols];
    for (n, (col, tail, ok)) in columns.into_iter().enumerate() {
        for (m, &v) in col.iter().enumerate() {
            entries[m * cols + 2 * n] = v;
            entries[m * cols + 2 * n + 1] = if m % 2 == 1 { -v } else { v };
        }
        col_converged[2 * n] = ok;
        col_converged[2 * n + 1] = ok;
        col_ext.push(tail);
    }
    let (row_tail_gram, rows_converged) = row_tail_gram(rows, pairs, rep, big_c)?;
    Ok(UnitaryFrame {
        rows,
        pairs,
        entries,
        schedule,
        col_ext,
        col_converged,
        row_tail_gram,
        rows_converged,
    })
}

/// Σ_{n≥K} cₙ²(βₘ(aq^{n+1})βₖ(aq^{n+1}) + βₘ(−aq^{n+1})βₖ(−aq^{n+1})) for all
/// row pairs, summed until a geometric bound on the remainder is negligible.
/// Entries with m+k odd vanish by parity.
fn row_tail_gram(rows: usize, pairs: usize, rep: &RepParams, big_c: f64) -> Result<(Vec<f64>, bool)> {
    let mut acc = vec![crate::qseries::KahanSum::new(); rows * rows];
    let c2 = big_c * big_c;
    let mut w = node_weight(pairs, rep);
    let (q, a2) = (rep.q, rep.a * rep.a);
    let q2 = q * q;
    let mut n = pairs;
    loop {
        let b: Vec<f64> = node_betas(rows - 1, n, rep)?.iter().map(|x| x.to_f64()).collect();
        let mut biggest = 0.0_f64;
        for m in 0..rows {
            for k in (m % 2..rows).step_by(2) {
                let t = 2.0 * c2 * w * b[m] * b[k];
                acc[m * rows + k].add(t);
                if m == k {
                    biggest = biggest.max(t);
                }
            }
        }
        let ratio = q * (1.0 + a2 * q2.powi(n as i32 + 1)) / (1.0 - q2.powi(n as i32 + 1));
        let rest = 4.0 * biggest * ratio / (1.0 - ratio);
        if n >= pairs + rows + 5 && ratio < 1.0 && rest <= 1e-18 {
            let mut out: Vec<f64> = acc.iter().map(|s| s.total()).collect();
            for m in 0..rows {
                for k in 0..m {
                    out[m * rows + k] = out[k * rows + m];
                }
            }
            return Ok((out, true));
        }
        n += 1;
        if n > pairs + ROW_TAIL_NODE_CAP {
            return Ok((vec![f64::INFINITY; rows * rows], false));
        }
        w *= ratio;
    }
}
