//! q-analysis kernels: q-Pochhammer symbols, terminating ₃φ₂ sums,
//! compensated summation and an overflow-safe signed log-scaled real.

use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::ops::{Add, Div, Mul, MulAssign, Neg, Sub};

use num_complex::Complex64;
use num_traits::One;
use twofloat::TwoFloat;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Compensated summation
// ---------------------------------------------------------------------------

/// Neumaier-compensated running sum. Terms must be fed in a fixed order for
/// bitwise-reproducible totals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for KahanSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        s.extend(iter);
        s
    }
}

/// Double-double quotient by long division. The crate's own TwoFloat
/// division drops the low word on targets without a fused multiply-add.
pub fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::from(q1) + q2 + q3
}

/// Compensated sum of a slice, ascending index order.
pub fn kahan_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<KahanSum>().total()
}

#[derive(Debug, Clone, Copy, Default)]
struct ComplexKahan {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahan {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

// ---------------------------------------------------------------------------
// LogScaledReal
// ---------------------------------------------------------------------------

/// A signed real `sign · exp(log_mag)` whose magnitude may lie far outside
/// the binary64 range.
///
/// Stored as `sign · frac · 2^exp2` with `frac ∈ [1, 2)`, so conversion from a
/// finite `f64` is exact. `log_mag()` reports the natural log of |value|.
#[derive(Debug, Clone, Copy)]
pub struct LogScaledReal {
    sign: i8,
    frac: f64,
    exp2: i64,
}

/// Splits a finite nonzero |x| into `frac ∈ [1,2)` and a binary exponent.
fn split_binary(x: f64) -> (f64, i64) {
    debug_assert!(x.is_finite() && x > 0.0);
    let mut bits = x.to_bits();
    let mut bias_adjust = 0i64;
    if (bits >> 52) & 0x7ff == 0 {
        // subnormal: lift into the normal range first
        let lifted = x * f64::from_bits(0x43f0_0000_0000_0000); // 2^64
        bits = lifted.to_bits();
        bias_adjust = -64;
    }
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023 + bias_adjust;
    let frac = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    (frac, exp)
}

/// `x · 2^k` without intermediate overflow or premature underflow.
fn scale_binary(mut x: f64, mut k: i64) -> f64 {
    const STEP: i64 = 1000;
    let up = f64::from_bits(((1023 + STEP) as u64) << 52);
    let down = f64::from_bits(((1023 - STEP) as u64) << 52);
    while k > STEP {
        x *= up;
        k -= STEP;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -STEP {
        x *= down;
        k += STEP;
        if x == 0.0 {
            return x;
        }
    }
    // k now lies in [-1000, 1000], a normal exponent range
    x * f64::from_bits(((1023 + k) as u64) << 52)
}

impl LogScaledReal {
    pub const ZERO: Self = Self {
        sign: 0,
        frac: 0.0,
        exp2: 0,
    };
    pub const ONE: Self = Self {
        sign: 1,
        frac: 1.0,
        exp2: 0,
    };

    fn normalized(sign: i8, frac: f64, exp2: i64) -> Self {
        if sign == 0 || frac == 0.0 {
            return Self::ZERO;
        }
        let (f, e) = split_binary(frac.abs());
        let s = if frac < 0.0 { -sign } else { sign };
        Self {
            sign: s,
            frac: f,
            exp2: exp2 + e,
        }
    }

    /// Exact conversion from a finite binary64 value.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "LogScaledReal::from_f64 needs a finite value, got {x}");
        if x == 0.0 {
            return Self::ZERO;
        }
        let (frac, exp2) = split_binary(x.abs());
        Self {
            sign: if x < 0.0 { -1 } else { 1 },
            frac,
            exp2,
        }
    }

    /// Builds `sign · exp(log_mag)`. `sign = 0` yields zero.
    pub fn from_log(sign: i8, log_mag: f64) -> Self {
        if sign == 0 || log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        assert!(log_mag.is_finite(), "log magnitude must be finite, got {log_mag}");
        let e = (log_mag / LN_2).floor();
        let rem = log_mag - e * LN_2;
        Self::normalized(sign.signum(), rem.exp(), e as i64)
    }

    /// Exactly `2^k`.
    pub fn pow2(k: i64) -> Self {
        Self {
            sign: 1,
            frac: 1.0,
            exp2: k,
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Natural log of |value|; `-∞` for zero.
    pub fn log_mag(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.frac.ln() + self.exp2 as f64 * LN_2
        }
    }

    /// Binary exponent of |value| (floor of log2); `i64::MIN` for zero.
    pub fn exponent2(&self) -> i64 {
        if self.sign == 0 {
            i64::MIN
        } else {
            self.exp2
        }
    }

    /// Materializes to binary64; overflows to ±∞ and underflows to 0.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        f64::from(self.sign) * scale_binary(self.frac, self.exp2)
    }

    /// Value times `2^(-exp2)`, i.e. the value rescaled against a reference
    /// binary exponent. Used to sum terms of wildly different magnitude.
    pub fn scaled_by_exp2(&self, exp2: i64) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        f64::from(self.sign) * scale_binary(self.frac, self.exp2 - exp2)
    }

    pub fn abs(self) -> Self {
        Self {
            sign: self.sign.abs(),
            ..self
        }
    }

    /// Square root of the magnitude (sign dropped).
    pub fn sqrt_abs(self) -> Self {
        if self.sign == 0 {
            return Self::ZERO;
        }
        let (f, e) = if self.exp2.rem_euclid(2) == 1 {
            (self.frac * 2.0, self.exp2 - 1)
        } else {
            (self.frac, self.exp2)
        };
        Self::normalized(1, f.sqrt(), e / 2)
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        Self::normalized(self.sign, 1.0 / self.frac, -self.exp2)
    }

    pub fn powi(self, k: u32) -> Self {
        let mut acc = Self::ONE;
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }

    /// Compares magnitudes.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self
                .exp2
                .cmp(&other.exp2)
                .then(self.frac.partial_cmp(&other.frac).unwrap_or(Ordering::Equal)),
        }
    }
}

impl Default for LogScaledReal {
    fn default() -> Self {
        Self::ZERO
    }
}

impl PartialEq for LogScaledReal {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || (self.frac == other.frac && self.exp2 == other.exp2))
    }
}

impl From<f64> for LogScaledReal {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Mul for LogScaledReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self::normalized(self.sign * rhs.sign, self.frac * rhs.frac, self.exp2 + rhs.exp2)
    }
}

impl Mul<f64> for LogScaledReal {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self * Self::from_f64(rhs)
    }
}

impl MulAssign for LogScaledReal {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Div for LogScaledReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Neg for LogScaledReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            ..self
        }
    }
}

impl Add for LogScaledReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.exp2 >= rhs.exp2 { (self, rhs) } else { (rhs, self) };
        let shift = small.exp2 - big.exp2;
        if shift < -1100 {
            return big;
        }
        let s = f64::from(big.sign) * big.frac + f64::from(small.sign) * scale_binary(small.frac, shift);
        Self::normalized(1, s, big.exp2)
    }
}

impl Sub for LogScaledReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

/// Compensated sum of log-scaled terms in the given order. Terms are rescaled
/// against the largest binary exponent before summing.
pub fn sum_log_scaled(terms: &[LogScaledReal]) -> LogScaledReal {
    let Some(e_max) = terms.iter().filter(|t| !t.is_zero()).map(|t| t.exponent2()).max() else {
        return LogScaledReal::ZERO;
    };
    let s: KahanSum = terms.iter().map(|t| t.scaled_by_exp2(e_max)).collect();
    LogScaledReal::from_f64(s.total()) * LogScaledReal::pow2(e_max)
}

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

/// Truncation controls for infinite products and non-terminating sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    pub eps_term: f64,
    pub max_terms: usize,
}

impl SeriesTolerance {
    pub fn new(eps_term: f64, max_terms: usize) -> Result<Self> {
        if !(eps_term > 0.0 && eps_term < 1.0) {
            return Err(Error::Parameter(format!("eps_term must lie in (0,1), got {eps_term}")));
        }
        if max_terms == 0 {
            return Err(Error::Parameter("max_terms must be at least 1".into()));
        }
        Ok(Self { eps_term, max_terms })
    }
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            eps_term: 1e-16,
            max_terms: 10_000,
        }
    }
}

// ---------------------------------------------------------------------------
// q-Pochhammer symbols
// ---------------------------------------------------------------------------

/// Finite q-Pochhammer symbol `(x;q)_n = ∏_{k<n} (1 − x q^k)`.
///
/// Generic over real and complex scalars. The product is accumulated in
/// ascending k, so `qpoch(x,q,n+1) == qpoch(x,q,n) * (1 - x q^n)` bitwise.
pub fn qpoch<T>(x: T, q: f64, n: usize) -> T
where
    T: Copy + One + Sub<Output = T> + Mul<Output = T> + Mul<f64, Output = T>,
{
    let mut acc = T::one();
    for k in 0..n {
        acc = acc * (T::one() - x * q.powi(k as i32));
    }
    acc
}

/// Infinite q-Pochhammer symbol `(x;q)_∞`, truncated once `|x| q^k < eps_term`.
///
/// The neglected factors contribute a relative error of at most
/// `2·eps_term·|x|/(1−q)`.
pub fn qpoch_inf(x: f64, q: f64, tol: &SeriesTolerance) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Parameter(format!("qpoch_inf needs 0 < q < 1, got {q}")));
    }
    let mut acc = 1.0;
    let mut xk = x;
    for _ in 0..tol.max_terms {
        if xk.abs() < tol.eps_term {
            return Ok(acc);
        }
        acc *= 1.0 - xk;
        if acc == 0.0 {
            return Ok(0.0);
        }
        xk *= q;
    }
    Err(Error::Truncation(format!(
        "(x;q)_inf with x={x}, q={q} did not reach tail {:e} within {} factors",
        tol.eps_term, tol.max_terms
    )))
}

/// `(ic;q)_n · (−ic;q)_n`, evaluated in real arithmetic as `(−c²;q²)_n`.
pub fn paired_imag_qpoch(c: f64, q: f64, n: usize) -> f64 {
    let c2 = c * c;
    let q2 = q * q;
    let mut acc = 1.0;
    for k in 0..n {
        acc *= 1.0 + c2 * q2.powi(k as i32);
    }
    acc
}

// ---------------------------------------------------------------------------
// Terminating ₃φ₂
// ---------------------------------------------------------------------------

/// Value of a terminating series together with the sum of the absolute values
/// of its terms (the natural scale for judging cancellation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    pub abs_sum: f64,
    pub terms: usize,
}

fn is_q_power(z: Complex64, target: f64) -> bool {
    (z - target).norm() <= 1e-12 * target.abs().max(1.0)
}

/// Terminating ₃φ₂(a₁,a₂,a₃; b₁,b₂; q, z) summed over k = 0..=n_stop.
pub fn phi32_terminating(num: [Complex64; 3], den: [Complex64; 2], q: f64, z: Complex64, n_stop: usize) -> Result<Complex64> {
    phi32_terminating_detailed(num, den, q, z, n_stop).map(|s| s.value)
}

/// As [`phi32_terminating`], also reporting the absolute term sum.
pub fn phi32_terminating_detailed(
    num: [Complex64; 3],
    den: [Complex64; 2],
    q: f64,
    z: Complex64,
    n_stop: usize,
) -> Result<SeriesSum> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Parameter(format!("phi32 needs 0 < q < 1, got {q}")));
    }
    let witness = q.powi(-(n_stop as i32));
    if !num.iter().any(|&a| is_q_power(a, witness)) {
        return Err(Error::Domain(format!(
            "no numerator parameter equals q^-{n_stop}; series does not terminate"
        )));
    }
    for (j, b) in den.iter().enumerate() {
        for k in 0..n_stop {
            let f = Complex64::one() - b * q.powi(k as i32);
            if f.norm() <= 8.0 * f64::EPSILON * (b * q.powi(k as i32)).norm().max(1.0) {
                return Err(Error::Pole(format!("denominator b{} hits q^-{k}", j + 1)));
            }
        }
    }
    let mut term = Complex64::one();
    let mut sum = ComplexKahan::default();
    let mut abs_sum = KahanSum::new();
    for k in 0..=n_stop {
        sum.add(term);
        abs_sum.add(term.norm());
        if k == n_stop {
            break;
        }
        let qk = q.powi(k as i32);
        let mut ratio = z;
        for a in num {
            ratio *= Complex64::one() - a * qk;
        }
        let mut d = Complex64::new(1.0 - q.powi(k as i32 + 1), 0.0);
        for b in den {
            d *= Complex64::one() - b * qk;
        }
        term = term * ratio / d;
    }
    let value = sum.total();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Domain("terminating series overflowed binary64".into()));
    }
    Ok(SeriesSum {
        value,
        abs_sum: abs_sum.total(),
        terms: n_stop + 1,
    })
}
