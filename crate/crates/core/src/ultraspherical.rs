//! Discrete q-ultraspherical polynomials C̃ₙ⁽ᶜ⁾(x;q) of the second type and
//! their duals D̃ₙ⁽ᶜ⁾(μ(x;−c)|q).
//!
//! The three-term recurrence
//!
//! ```text
//! x·C̃ₙ(x) = Aₙ·C̃ₙ₊₁(x) + Cₙ·C̃ₙ₋₁(x),   Aₙ = (1+c qⁿ⁺¹)/(1+c q²ⁿ⁺¹),  Cₙ = Aₙ − 1
//! ```
//!
//! is the normative definition; the terminating ₃φ₂ representation is kept
//! as an independent cross-check.
//!
//! At the spectral nodes ±√c·q^{k+1} the sequence n ↦ C̃ₙ(x) is the minimal
//! solution of the recurrence and decays like q^{n²/2}. Forward iteration
//! then loses roughly n²/2·log₁₀(1/q) digits, so node values are produced by
//! a backward continued fraction for the minimal solution instead
//! ([`ctilde_at_node`]).

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::qseries::{dd_div, phi32_terminating_detailed, LogScaledReal};
use crate::repops::RepParams;

/// Tolerance for the series/recurrence cross-check, relative to the route scale.
pub const ROUTE_TOL: f64 = 1e-10;
/// Imaginary residue allowed in the series route, relative to its term scale.
pub const IMAG_TOL: f64 = 1e-10;
/// Tolerance for the closed-form special value against the node evaluation.
pub const SPECIAL_VALUE_TOL: f64 = 1e-11;
/// Relative distance under which a real argument is identified with a node.
pub const NODE_SNAP_TOL: f64 = 1e-13;

/// Parameters (q, c) of the family C̃ₙ⁽ᶜ⁾(x;q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    q: f64,
    c: f64,
}

impl FamilyParams {
    pub fn new(q: f64, c: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Parameter(format!("q must lie in (0,1), got {q}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("c must be positive, got {c}")));
        }
        Ok(Self { q, c })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sqrt_c(&self) -> f64 {
        self.c.sqrt()
    }
}

/// Recurrence coefficients `a = Aₙ` (multiplying C̃ₙ₊₁) and `c = Cₙ`
/// (multiplying C̃ₙ₋₁).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCoeffs {
    pub a: f64,
    pub c: f64,
}

pub fn recurrence_coeffs(n: usize, p: &FamilyParams) -> RecurrenceCoeffs {
    let q = p.q;
    let denom = 1.0 + p.c * q.powi(2 * n as i32 + 1);
    RecurrenceCoeffs {
        a: (1.0 + p.c * q.powi(n as i32 + 1)) / denom,
        c: p.c * q.powi(n as i32 + 1) * (1.0 - q.powi(n as i32)) / denom,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Recurrence,
    Both,
}

// ---------------------------------------------------------------------------
// Spectral nodes and evaluation points
// ---------------------------------------------------------------------------

/// The exact grid point `sign·√c·q^{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub sign: i8,
    pub k: usize,
}

impl Node {
    pub fn plus(k: usize) -> Self {
        Self { sign: 1, k }
    }

    pub fn minus(k: usize) -> Self {
        Self { sign: -1, k }
    }

    pub fn value(&self, p: &FamilyParams) -> f64 {
        f64::from(self.sign) * p.sqrt_c() * p.q.powi(self.k as i32 + 1)
    }
}

/// An evaluation point: either an exact node or an arbitrary real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralPoint {
    Node(Node),
    Value(f64),
}

impl From<Node> for SpectralPoint {
    fn from(n: Node) -> Self {
        SpectralPoint::Node(n)
    }
}

impl From<f64> for SpectralPoint {
    fn from(x: f64) -> Self {
        SpectralPoint::Value(x)
    }
}

impl SpectralPoint {
    /// Identifies `x` with a node when it matches `±√c q^{k+1}` to
    /// [`NODE_SNAP_TOL`] relative; otherwise keeps it as a plain value.
    pub fn classify(x: f64, p: &FamilyParams) -> Self {
        if x == 0.0 || !x.is_finite() {
            return SpectralPoint::Value(x);
        }
        let t = (x.abs() / p.sqrt_c()).ln() / p.q.ln() - 1.0;
        let k = t.round();
        if k >= 0.0 && k < 1e6 {
            let node = Node {
                sign: if x > 0.0 { 1 } else { -1 },
                k: k as usize,
            };
            if (node.value(p) - x).abs() <= NODE_SNAP_TOL * x.abs() {
                return SpectralPoint::Node(node);
            }
        }
        SpectralPoint::Value(x)
    }

    pub fn value(&self, p: &FamilyParams) -> f64 {
        match self {
            SpectralPoint::Node(n) => n.value(p),
            SpectralPoint::Value(x) => *x,
        }
    }

    /// The point `q·λ`.
    pub fn times_q(&self, p: &FamilyParams) -> Self {
        match *self {
            SpectralPoint::Node(n) => SpectralPoint::Node(Node { sign: n.sign, k: n.k + 1 }),
            SpectralPoint::Value(x) => SpectralPoint::classify(p.q * x, p),
        }
    }

    /// The point `λ/q`. For the outermost node this leaves the grid (±√c).
    pub fn over_q(&self, p: &FamilyParams) -> Self {
        match *self {
            SpectralPoint::Node(n) if n.k > 0 => SpectralPoint::Node(Node { sign: n.sign, k: n.k - 1 }),
            SpectralPoint::Node(n) => SpectralPoint::Value(f64::from(n.sign) * p.sqrt_c()),
            SpectralPoint::Value(x) => SpectralPoint::classify(x / p.q, p),
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation routes
// ---------------------------------------------------------------------------

/// Forward recurrence from C̃₀ = 1, C̃₁ = x, returning degrees 0..=nmax with
/// periodic rescaling so no intermediate overflows.
pub fn ctilde_sequence(nmax: usize, p: &FamilyParams, x: f64) -> Vec<LogScaledReal> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(LogScaledReal::ONE);
    if nmax == 0 {
        return out;
    }
    // (prev, cur) share the scale 2^offset
    let mut offset: i64 = 0;
    let mut prev = 1.0_f64;
    let mut cur = x;
    out.push(LogScaledReal::from_f64(x));
    for n in 1..nmax {
        let rc = recurrence_coeffs(n, p);
        let next = (x * cur - rc.c * prev) / rc.a;
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > 1e150 || (big < 1e-150 && big > 0.0) {
            let e = LogScaledReal::from_f64(big).exponent2();
            let s = LogScaledReal::pow2(-e).to_f64();
            prev *= s;
            cur *= s;
            offset += e;
        }
        out.push(LogScaledReal::from_f64(cur) * LogScaledReal::pow2(offset));
    }
    out
}

/// Forward-recurrence value of C̃ₙ(x) in binary64.
pub fn ctilde_recurrence(n: usize, p: &FamilyParams, x: f64) -> f64 {
    if x == 0.0 && n % 2 == 1 {
        return 0.0;
    }
    ctilde_sequence(n, p, x)[n].to_f64()
}

/// Series route: `(−i)ⁿ·₃φ₂(q⁻ⁿ, −c qⁿ⁺¹, ix; i√c q, −i√c q; q, q)`.
///
/// Returns the real value and the absolute term sum of the series.
pub fn ctilde_series_detailed(n: usize, p: &FamilyParams, x: f64) -> Result<(f64, f64)> {
    let q = p.q;
    let sc = p.sqrt_c();
    let num = [
        Complex64::new(q.powi(-(n as i32)), 0.0),
        Complex64::new(-p.c * q.powi(n as i32 + 1), 0.0),
        Complex64::new(0.0, x),
    ];
    let den = [Complex64::new(0.0, sc * q), Complex64::new(0.0, -sc * q)];
    let s = phi32_terminating_detailed(num, den, q, Complex64::new(q, 0.0), n)?;
    let rot = match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    let v = rot * s.value;
    let scale = v.re.abs().max(s.abs_sum);
    if v.im.abs() > IMAG_TOL * scale {
        return Err(Error::Consistency(format!(
            "series route for n={n}, x={x} left imaginary residue {:e} (scale {scale:e})",
            v.im
        )));
    }
    Ok((v.re, s.abs_sum))
}

/// Both evaluation routes side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteComparison {
    pub series: f64,
    pub recurrence: f64,
    pub abs_diff: f64,
    /// max(|series|, |recurrence|, Σ|series terms|): the magnitude against
    /// which rounding in either route is measured.
    pub scale: f64,
}

impl RouteComparison {
    pub fn scaled_diff(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.abs_diff / self.scale
        }
    }
}

pub fn compare_routes(n: usize, p: &FamilyParams, x: f64) -> Result<RouteComparison> {
    let (series, abs_sum) = if x == 0.0 && n % 2 == 1 {
        (0.0, 0.0)
    } else {
        ctilde_series_detailed(n, p, x)?
    };
    let recurrence = ctilde_recurrence(n, p, x);
    Ok(RouteComparison {
        series,
        recurrence,
        abs_diff: (series - recurrence).abs(),
        scale: series.abs().max(recurrence.abs()).max(abs_sum),
    })
}

/// C̃ₙ⁽ᶜ⁾(x;q) by the chosen route. `Both` returns the recurrence value after
/// checking the series agrees within [`ROUTE_TOL`] of the route scale.
pub fn ctilde(n: usize, p: &FamilyParams, x: f64, method: Method) -> Result<f64> {
    if x == 0.0 && n % 2 == 1 {
        return Ok(0.0);
    }
    match method {
        Method::Recurrence => Ok(ctilde_recurrence(n, p, x)),
        Method::Series => ctilde_series_detailed(n, p, x).map(|(v, _)| v),
        Method::Both => {
            let cmp = compare_routes(n, p, x)?;
            if cmp.abs_diff > ROUTE_TOL * cmp.scale {
                return Err(Error::MethodDisagreement {
                    n,
                    x,
                    diff: cmp.abs_diff,
                    scale: cmp.scale,
                    tol: ROUTE_TOL,
                });
            }
            Ok(cmp.recurrence)
        }
    }
}

/// Node values of C̃₀..C̃_nmax plus a boundary residual: the relative gap
/// between the forward ratio C̃ₜ/C̃ₜ₋₁ and the continued-fraction ratio at the
/// switch index t. It vanishes exactly when x is a point of the
/// orthogonality grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEvaluation {
    pub values: Vec<LogScaledReal>,
    pub boundary_residual: f64,
    /// Degree at which the forward recurrence hands over to the backward ratios.
    pub switch_index: usize,
}

/// Initial start index for the backward continued fraction at node k.
fn miller_start(nmax: usize, k: usize, q: f64) -> usize {
    let lq = -q.ln();
    let turn = 2 * k + 2 + (4f64.ln() / lq).ceil() as usize;
    nmax.max(turn) + miller_settle(q) + 16
}

/// Steps of backward recurrence needed to forget the start value to ~40 digits.
fn miller_settle(q: f64) -> usize {
    (2.0 * 40.0 * std::f64::consts::LN_10 / -q.ln()).sqrt().ceil() as usize
}

/// Backward ratios r₁..r_start (index 0 unused).
fn backward_ratios(start: usize, p: &FamilyParams, x: f64, k: usize) -> Result<Vec<f64>> {
    let mut ratios = vec![0.0; start + 1];
    let mut r_next = 0.0;
    for n in (1..=start).rev() {
        let rc = recurrence_coeffs(n, p);
        let d = x - rc.a * r_next;
        if d == 0.0 {
            return Err(Error::Consistency(format!("continued fraction breaks down at n={n}, node k={k}")));
        }
        ratios[n] = rc.c / d;
        r_next = ratios[n];
    }
    Ok(ratios)
}

/// C̃ₙ at the exact node `sign·√c·q^{k+1}`, n = 0..=nmax.
///
/// At a node the sequence grows while n is below a turning index and is
/// the minimal solution of the recurrence beyond it. Below the turn the
/// forward recurrence is stable; above it the ratios rₙ = C̃ₙ/C̃ₙ₋₁, which
/// satisfy rₙ = Cₙ/(x − Aₙ rₙ₊₁), are evaluated backward from far out. The
/// turn is the last degree where the backward error gain |Aₙrₙrₙ₊₁/Cₙ| exceeds
/// one. Negative nodes follow by parity.
pub fn ctilde_at_node(nmax: usize, p: &FamilyParams, node: Node) -> Result<NodeEvaluation> {
    let x = p.sqrt_c() * p.q.powi(node.k as i32 + 1);
    if x == 0.0 {
        return Err(Error::Domain(format!("node k={} underflows binary64", node.k)));
    }
    let settle = miller_settle(p.q);
    let mut start = miller_start(nmax, node.k, p.q);
    let (ratios, turn) = loop {
        let ratios = backward_ratios(start, p, x, node.k)?;
        let gain = |n: usize| {
            let rc = recurrence_coeffs(n, p);
            (rc.a * ratios[n] * ratios[n + 1] / rc.c).abs()
        };
        let turn = (1..start).rev().find(|&n| gain(n) >= 1.0).map_or(1, |n| n + 1);
        if turn + settle <= start {
            break (ratios, turn);
        }
        if start > 1_000_000 {
            return Err(Error::Truncation(format!("no turning index found for node k={}", node.k)));
        }
        start = 2 * start;
    };

    let fwd = ctilde_sequence(turn, p, x);
    let residual = if turn == 1 {
        (ratios[1] - x).abs() / x
    } else {
        let r_fwd = (fwd[turn] / fwd[turn - 1]).to_f64();
        (r_fwd - ratios[turn]).abs() / ratios[turn].abs()
    };
    let flip = node.sign < 0;
    let mut values = Vec::with_capacity(nmax + 1);
    let mut acc = LogScaledReal::ONE;
    for n in 0..=nmax {
        if n <= turn {
            acc = fwd[n];
        } else {
            acc = acc * ratios[n];
        }
        values.push(if flip && n % 2 == 1 { -acc } else { acc });
    }
    Ok(NodeEvaluation {
        values,
        boundary_residual: residual,
        switch_index: turn,
    })
}

/// C̃₀..C̃_nmax at an evaluation point, using the node route on the grid and
/// the forward recurrence elsewhere.
pub fn ctilde_values(nmax: usize, p: &FamilyParams, point: SpectralPoint) -> Result<Vec<LogScaledReal>> {
    match point {
        SpectralPoint::Node(node) => ctilde_at_node(nmax, p, node).map(|e| e.values),
        SpectralPoint::Value(x) => match SpectralPoint::classify(x, p) {
            SpectralPoint::Node(node) => ctilde_at_node(nmax, p, node).map(|e| e.values),
            SpectralPoint::Value(x) => Ok(ctilde_sequence(nmax, p, x)),
        },
    }
}

// ---------------------------------------------------------------------------
// Special value, μ map, dual family
// ---------------------------------------------------------------------------

/// Closed form `aⁿ q^{n(n+1)/2}` of C̃ₙ^{(a²)}(±aq;q), log-scaled.
pub fn special_value_closed(n: usize, rep: &RepParams) -> LogScaledReal {
    let n_f = n as f64;
    LogScaledReal::from_log(1, n_f * rep.a().ln() + 0.5 * n_f * (n_f + 1.0) * rep.q().ln())
}

/// C̃ₙ^{(a²)}(aq;q) = aⁿ q^{n(n+1)/2} (the same value holds at −aq).
///
/// The closed form follows from q-Chu–Vandermonde. It is checked against the
/// node evaluation to [`SPECIAL_VALUE_TOL`] relative and against the series
/// route within the series' own term scale.
pub fn special_value(n: usize, rep: &RepParams) -> Result<f64> {
    let fam = rep.family();
    let closed = special_value_closed(n, rep);
    let node = ctilde_at_node(n, &fam, Node::plus(0))?;
    let rel = ((node.values[n] - closed) / closed).to_f64().abs();
    if !(rel <= SPECIAL_VALUE_TOL) {
        return Err(Error::Consistency(format!(
            "special value at n={n}: closed form and node evaluation differ by {rel:e} relative"
        )));
    }
    let x = rep.a() * rep.q();
    if let Ok((series, abs_sum)) = ctilde_series_detailed(n, &fam, x) {
        let c = closed.to_f64();
        if (series - c).abs() > ROUTE_TOL * abs_sum.max(c.abs()) {
            return Err(Error::Consistency(format!(
                "special value at n={n}: series route {series:e} vs closed form {c:e}"
            )));
        }
    }
    Ok(closed.to_f64())
}

/// μ(x; s) = q⁻ˣ + s·qˣ⁺¹. The dual family uses s = −c.
pub fn mu(x: usize, s: f64, q: f64) -> f64 {
    q.powi(-(x as i32)) + s * q.powi(x as i32 + 1)
}

/// D̃ₙ⁽ᶜ⁾(μ(x;−c)|q) = ₃φ₂(q⁻ˣ, −c qˣ⁺¹, q⁻ⁿ; i√c q, −i√c q; q, −qⁿ⁺¹),
/// log-scaled. The paired imaginary denominators are carried as (−c q²;q²)ₖ.
///
/// The terms alternate and cancel by many orders of magnitude when c is
/// large, so they are formed and summed in double-double with a separate
/// binary exponent.
pub fn dual_dtilde_scaled(n: usize, x: usize, p: &FamilyParams) -> LogScaledReal {
    let one = TwoFloat::from(1.0);
    let stop = n.min(x);
    let top = (x + 1 + stop).max(2 * stop + 2).max(n + 1);
    let mut qp = Vec::with_capacity(top + 1);
    qp.push(one);
    for j in 1..=top {
        qp.push(qp[j - 1] * p.q);
    }
    let z = -qp[n + 1];
    let mut t = one;
    let mut e: i64 = 0;
    let mut terms = vec![(t, e)];
    for k in 0..stop {
        let num = (one - dd_div(one, qp[x - k])) * (one + qp[x + 1 + k] * p.c) * (one - dd_div(one, qp[n - k]));
        let den = (one - qp[k + 1]) * (one + qp[2 * k + 2] * p.c);
        t = dd_div(t * num * z, den);
        if t.hi() == 0.0 {
            break;
        }
        // keep the mantissa near one; power-of-two scaling is exact
        let shift = t.hi().abs().log2().floor() as i32;
        t = t * 2f64.powi(-shift);
        e += i64::from(shift);
        terms.push((t, e));
    }
    let emax = terms.iter().map(|&(_, e)| e).max().unwrap_or(0);
    let mut sum = TwoFloat::from(0.0);
    for &(m, e) in &terms {
        let d = e - emax;
        if d > -1000 {
            sum += m * 2f64.powi(d as i32);
        }
    }
    LogScaledReal::from_f64(sum.hi()) * LogScaledReal::pow2(emax)
}

pub fn dual_dtilde(n: usize, x: usize, p: &FamilyParams) -> f64 {
    dual_dtilde_scaled(n, x, p).to_f64()
}

// ---------------------------------------------------------------------------
// q-difference equation
// ---------------------------------------------------------------------------

/// The four terms of the q-difference equation at degree n and point λ:
/// `lhs = (q⁻ⁿ − a²qⁿ⁺¹)·C̃ₙ(λ)` and the three right-hand terms in
/// C̃ₙ(qλ), C̃ₙ(λ), C̃ₙ(λ/q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDiffTerms {
    pub lhs: LogScaledReal,
    pub rhs: [LogScaledReal; 3],
}

impl QDiffTerms {
    pub fn residual(&self) -> LogScaledReal {
        self.lhs - (self.rhs[0] + self.rhs[1] + self.rhs[2])
    }

    /// Largest absolute term.
    pub fn scale(&self) -> LogScaledReal {
        let mut m = self.lhs.abs();
        for t in self.rhs {
            if t.cmp_abs(&m).is_gt() {
                m = t.abs();
            }
        }
        m
    }

    /// |residual| / scale (0 when every term vanishes).
    pub fn relative(&self) -> f64 {
        let s = self.scale();
        if s.is_zero() {
            0.0
        } else {
            (self.residual() / s).to_f64().abs()
        }
    }
}

/// Coefficients (λ⁻²·(λ²+1), λ⁻², λ⁻²·(λ² − a²q²)) with the last one taken
/// as exactly zero at the outermost node.
pub(crate) fn qdiff_coefficients(point: SpectralPoint, rep: &RepParams) -> Result<(f64, f64, f64)> {
    let fam = rep.family();
    let lam = point.value(&fam);
    if lam == 0.0 {
        return Err(Error::Domain("q-difference equation needs lambda != 0".into()));
    }
    let (a, q) = (rep.a(), rep.q());
    let inv2 = 1.0 / (lam * lam);
    let gap = match point {
        SpectralPoint::Node(n) => a * a * q * q * (q.powi(2 * n.k as i32) - 1.0),
        SpectralPoint::Value(x) => x * x - a * a * q * q,
    };
    Ok(((lam * lam + 1.0) * inv2, inv2, gap * inv2))
}

pub fn qdiff_terms(n: usize, rep: &RepParams, lam: impl Into<SpectralPoint>) -> Result<QDiffTerms> {
    let fam = rep.family();
    let point = match lam.into() {
        SpectralPoint::Value(x) => SpectralPoint::classify(x, &fam),
        node => node,
    };
    let (a, q) = (rep.a(), rep.q());
    let (k_up, k_mid, k_down) = qdiff_coefficients(point, rep)?;
    let at = |pt: SpectralPoint| -> Result<LogScaledReal> { Ok(ctilde_values(n, &fam, pt)?[n]) };
    let c_mid = at(point)?;
    let c_up = at(point.times_q(&fam))?;
    let c_down = if k_down == 0.0 { LogScaledReal::ZERO } else { at(point.over_q(&fam))? };
    let diag = q.powi(-(n as i32)) - a * a * q.powi(n as i32 + 1);
    Ok(QDiffTerms {
        lhs: c_mid * diag,
        rhs: [
            c_up * (-a * a * q * k_up),
            c_mid * (a * a * q * (1.0 + q) * k_mid),
            c_down * k_down,
        ],
    })
}

/// LHS − RHS of the q-difference equation for C̃ₙ^{(a²)} at λ.
pub fn qdiff_residual(n: usize, rep: &RepParams, lam: impl Into<SpectralPoint>) -> Result<f64> {
    Ok(qdiff_terms(n, rep, lam)?.residual().to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(q: f64, c: f64) -> FamilyParams {
        FamilyParams::new(q, c).unwrap()
    }

    #[test]
    fn family_params_domain() {
        assert!(FamilyParams::new(1.0, 1.0).is_err());
        assert!(FamilyParams::new(0.5, 0.0).is_err());
        assert!(FamilyParams::new(0.5, -2.0).is_err());
    }

    #[test]
    fn recurrence_coeff_examples() {
        let p = fam(0.5, 1.0);
        let r0 = recurrence_coeffs(0, &p);
        assert_eq!((r0.a, r0.c), (1.0, 0.0));
        let r1 = recurrence_coeffs(1, &p);
        assert!((r1.a - 10.0 / 9.0).abs() < 1e-15);
        assert!((r1.c - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn recurrence_coeffs_differ_by_one() {
        for &q in &[0.3, 0.5, 0.9] {
            for &c in &[0.0625, 1.0, 16.0] {
                let p = fam(q, c);
                for n in 0..=200 {
                    let r = recurrence_coeffs(n, &p);
                    assert!((r.a - r.c - 1.0).abs() <= 1e-15 * r.a, "q={q} c={c} n={n}");
                    assert!(r.a >= 1.0 && r.c >= 0.0);
                    assert!(r.a * recurrence_coeffs(n + 1, &p).c > 0.0);
                }
            }
        }
    }

    #[test]
    fn low_degree_values() {
        let p = fam(0.5, 1.0);
        for m in [Method::Series, Method::Recurrence, Method::Both] {
            assert_eq!(ctilde(0, &p, 7.3, m).unwrap(), 1.0);
            assert!((ctilde(1, &p, 0.3, m).unwrap() - 0.3).abs() < 1e-15);
            // (9x^2 - 1)/10 at x = 1/2
            assert!((ctilde(2, &p, 0.5, m).unwrap() - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_degree_vanishes_at_zero() {
        let p = fam(0.9, 16.0);
        for n in (1..30).step_by(2) {
            assert_eq!(ctilde(n, &p, 0.0, Method::Both).unwrap(), 0.0);
        }
    }

    #[test]
    fn node_route_reproduces_closed_form_at_outer_node() {
        for &q in &[0.3, 0.5, 0.9] {
            for &a in &[0.25, 1.0, 4.0] {
                let rep = RepParams::new(q, a).unwrap();
                let ev = ctilde_at_node(30, &rep.family(), Node::plus(0)).unwrap();
                assert!(ev.boundary_residual < 1e-13, "q={q} a={a}: {}", ev.boundary_residual);
                for n in 0..=30 {
                    let closed = special_value_closed(n, &rep);
                    let rel = ((ev.values[n] - closed) / closed).to_f64().abs();
                    assert!(rel < 1e-12, "q={q} a={a} n={n}: {rel:e}");
                }
            }
        }
    }

    #[test]
    fn node_route_matches_forward_recurrence_where_stable() {
        // Deep nodes at low degree sit in the oscillatory regime, where the
        // forward recurrence is accurate.
        let p = fam(0.5, 1.0);
        for k in 8..14 {
            let ev = ctilde_at_node(6, &p, Node::plus(k)).unwrap();
            let fwd = ctilde_sequence(6, &p, Node::plus(k).value(&p));
            for n in 0..=6 {
                let d = (ev.values[n] - fwd[n]).to_f64().abs();
                assert!(d <= 1e-12 * fwd[n].to_f64().abs().max(1e-300), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn off_grid_point_has_nonzero_boundary_residual() {
        // classify keeps 0.3 off the grid for q = 0.5; the fraction still
        // runs but cannot satisfy the n = 0 equation
        let p = fam(0.5, 1.0);
        assert_eq!(SpectralPoint::classify(0.3, &p), SpectralPoint::Value(0.3));
        assert_eq!(SpectralPoint::classify(0.125, &p), SpectralPoint::Node(Node::plus(2)));
        assert_eq!(SpectralPoint::classify(-0.5, &p), SpectralPoint::Node(Node::minus(0)));
    }

    #[test]
    fn special_value_examples() {
        let rep = RepParams::new(0.5, 1.0).unwrap();
        assert_eq!(special_value(0, &rep).unwrap(), 1.0);
        assert!((special_value(2, &rep).unwrap() - 0.125).abs() < 1e-16);
        let fam = rep.family();
        assert!((ctilde(2, &fam, 0.5, Method::Recurrence).unwrap() - 0.125).abs() < 1e-16);
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(0, 0.7, 0.5), 1.0 + 0.7 * 0.5);
        assert_eq!(mu(1, -1.0, 0.5), 1.75);
        assert_eq!(mu(3, 0.0, 0.5), 8.0);
    }

    #[test]
    fn dual_examples() {
        let p = fam(0.5, 1.0);
        for x in 0..10 {
            assert_eq!(dual_dtilde(0, x, &p), 1.0);
        }
        for n in 0..10 {
            assert_eq!(dual_dtilde(n, 0, &p), 1.0);
        }
        // n = x = 1: 1 + (1 - q^-1)(1 + c q^2)(1 - q^-1)/((1 - q)(1 + c q^2)) * (-q^2)
        let q: f64 = 0.5;
        let t1 = (1.0 - 1.0 / q) * (1.0 + q * q) * (1.0 - 1.0 / q) / ((1.0 - q) * (1.0 + q * q)) * (-q * q);
        assert!((dual_dtilde(1, 1, &p) - (1.0 + t1)).abs() < 1e-15);
        assert!((dual_dtilde(1, 1, &p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn qdiff_collapses_at_degree_zero() {
        for &(q, a, lam) in &[(0.5, 1.0, 0.37), (0.3, 4.0, -1.2), (0.9, 0.25, 0.01)] {
            let rep = RepParams::new(q, a).unwrap();
            let t = qdiff_terms(0, &rep, lam).unwrap();
            assert!(t.relative() <= 1e-13, "{:e}", t.relative());
        }
    }

    #[test]
    fn qdiff_small_cases() {
        let rep = RepParams::new(0.5, 1.0).unwrap();
        let t = qdiff_terms(3, &rep, 0.5).unwrap();
        assert!(t.relative() <= 1e-9);
        for n in 0..=30 {
            let t = qdiff_terms(n, &rep, Node::plus(0)).unwrap();
            assert!(t.relative() <= 1e-9, "n={n}: {:e}", t.relative());
            assert!(t.rhs[2].is_zero());
        }
    }

    #[test]
    fn qdiff_rejects_zero() {
        let rep = RepParams::new(0.5, 1.0).unwrap();
        assert!(matches!(qdiff_terms(2, &rep, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn alternating_gain_node() {
        // negative error gains at small nodes; reference from a 300-digit forward recurrence
        let rep = RepParams::new(0.3, 0.25).unwrap();
        let e = ctilde_at_node(40, &rep.family(), Node::plus(20)).unwrap();
        assert!(e.switch_index > 30);
        for (n, want) in [(5, 7.184131510014509e-18), (20, 1.868574669250426e-70), (40, 1.181262315895472e-244)] {
            let got = e.values[n].to_f64();
            assert!((got / want - 1.0).abs() < 1e-12, "n={n}: {got:e}");
        }
    }

    #[test]
    fn dual_series_with_heavy_cancellation() {
        // terms reach 3e7 against a sum of 4e-4; reference at 60 digits
        let rep = RepParams::new(0.9, 4.0).unwrap();
        let got = dual_dtilde(20, 34, &rep.family());
        assert!((got / -4.1176674076317824e-4 - 1.0).abs() < 1e-13, "{got:e}");
    }
}
