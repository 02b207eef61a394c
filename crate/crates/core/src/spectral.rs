//! Sturm-bisection eigensolver for symmetric tridiagonal matrices and
//! spectral-measure extraction by shifted inverse iteration.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::repops::{RepParams, TridiagonalOperator};

/// Bisection steps allowed per eigenvalue.
const BISECTION_CAP: usize = 400;
/// Inverse-iteration sweeps per node.
const INVERSE_ITERATIONS: usize = 3;

/// A general symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Parameter(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Number of eigenvalues strictly below `x` (LDLᵀ inertia count).
    pub fn sturm_count(&self, x: f64) -> usize {
        let guard = f64::MIN_POSITIVE.sqrt() * self.norm_inf().max(1.0);
        let mut count = 0;
        let mut d = self.diag[0] - x;
        for i in 0..self.size() {
            if i > 0 {
                let e = self.offdiag[i - 1];
                d = self.diag[i] - x - e * e / d;
            }
            if d == 0.0 {
                d = -guard;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
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

impl From<&TridiagonalOperator> for SymTridiagonal {
    fn from(op: &TridiagonalOperator) -> Self {
        Self {
            diag: vec![0.0; op.size()],
            offdiag: op.offdiag().to_vec(),
        }
    }
}

/// All eigenvalues in ascending order, each bracketed to absolute width
/// `tol·‖T‖∞` (or until the bracket can no longer be halved).
pub fn eigenvalues_sym(t: &SymTridiagonal, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("eigenvalue tolerance must be positive, got {tol}")));
    }
    let n = t.size();
    // Gershgorin interval
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { t.offdiag[i - 1].abs() } else { 0.0 } + if i + 1 < n { t.offdiag[i].abs() } else { 0.0 };
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    let pad = f64::EPSILON * (lo.abs().max(hi.abs())).max(f64::MIN_POSITIVE) * 4.0;
    lo -= pad;
    hi += pad;
    let width = tol * t.norm_inf();

    (0..n)
        .into_par_iter()
        .map(|j| {
            // the (j+1)-th smallest eigenvalue lies where the count crosses j
            let (mut a, mut b) = (lo, hi);
            for _ in 0..BISECTION_CAP {
                let mid = 0.5 * (a + b);
                if b - a <= width || mid <= a || mid >= b {
                    return Ok(0.5 * (a + b));
                }
                if t.sturm_count(mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            Err(Error::Solver(format!("bisection for eigenvalue {j} did not converge in {BISECTION_CAP} steps")))
        })
        .collect::<Result<Vec<f64>>>()
        .map(|mut v| {
            v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
            v
        })
}

pub fn eigenvalues(op: &TridiagonalOperator, tol: f64) -> Result<Vec<f64>> {
    eigenvalues_sym(&SymTridiagonal::from(op), tol)
}

/// Solves (T − σI)x = b by Gaussian elimination with partial pivoting.
/// Exactly singular pivots are replaced by a tiny multiple of ‖T‖.
fn shifted_solve(t: &SymTridiagonal, sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = t.size();
    let tiny = f64::EPSILON * t.norm_inf().max(f64::MIN_POSITIVE);
    if n == 1 {
        let d = t.diag[0] - sigma;
        return vec![b[0] / if d == 0.0 { tiny } else { d }];
    }
    // row i holds (lower, diag, upper, upper2) after elimination
    let mut dl: Vec<f64> = t.offdiag.clone();
    let mut d: Vec<f64> = t.diag.iter().map(|x| x - sigma).collect();
    let mut du: Vec<f64> = t.offdiag.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut rhs = b.to_vec();
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            rhs[i + 1] -= f * rhs[i];
            dl[i] = 0.0;
        } else {
            // swap rows i and i+1
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = tmp;
            rhs.swap(i, i + 1);
            rhs[i + 1] -= f * rhs[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / d[n - 1];
    x[n - 2] = (rhs[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (rhs[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

fn normalize(v: &mut [f64]) -> bool {
    let big = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if !(big > 0.0 && big.is_finite()) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= big);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Unit eigenvector for the eigenvalue `lam`.
pub fn inverse_iteration(t: &SymTridiagonal, lam: f64) -> Option<Vec<f64>> {
    let n = t.size();
    // a start vector with no special alignment to the parity structure
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.25 * ((i * 7 + 3) % 11) as f64 / 11.0).collect();
    normalize(&mut v);
    for _ in 0..INVERSE_ITERATIONS {
        v = shifted_solve(t, lam, &v);
        if !normalize(&mut v) {
            return None;
        }
    }
    Some(v)
}

/// Eigenvalues with the squared first components of their unit eigenvectors.
///
/// `flagged[j]` marks nodes whose gap to a neighbour is below the solver's
/// resolution or whose inverse iteration failed; their masses are unreliable
/// individually but still included in the total.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    pub nodes: Vec<f64>,
    pub masses: Vec<f64>,
    pub flagged: Vec<bool>,
}

impl SpectralMeasure {
    pub fn total_mass(&self) -> f64 {
        crate::qseries::kahan_sum(&self.masses)
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        self.nodes
            .iter()
            .enumerate()
            .min_by(|(_, u), (_, v)| (*u - x).abs().partial_cmp(&(*v - x).abs()).unwrap_or(Ordering::Equal))
            .map(|(i, _)| i)
    }

    /// Largest |mass(λ) − mass(−λ)| over mirrored node pairs.
    pub fn parity_defect(&self) -> f64 {
        let n = self.nodes.len();
        (0..n / 2)
            .map(|i| (self.masses[i] - self.masses[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}

pub fn spectral_measure_sym(t: &SymTridiagonal, tol: f64) -> Result<SpectralMeasure> {
    let nodes = eigenvalues_sym(t, tol)?;
    let resolution = 1e3 * f64::EPSILON * t.norm_inf();
    let results: Vec<(f64, bool)> = nodes
        .par_iter()
        .enumerate()
        .map(|(j, &lam)| {
            let gap = [j.checked_sub(1).map(|i| nodes[i]), nodes.get(j + 1).copied()]
                .into_iter()
                .flatten()
                .map(|mu| (mu - lam).abs())
                .fold(f64::INFINITY, f64::min);
            match inverse_iteration(t, lam) {
                Some(v) => (v[0] * v[0], gap < resolution),
                None => (0.0, true),
            }
        })
        .collect();
    let (masses, flagged) = results.into_iter().unzip();
    Ok(SpectralMeasure { nodes, masses, flagged })
}

pub fn spectral_measure(op: &TridiagonalOperator, tol: f64) -> Result<SpectralMeasure> {
    spectral_measure_sym(&SymTridiagonal::from(op), tol)
}

/// One analytic node paired with its computed eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedNode {
    pub analytic: f64,
    pub computed: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Ordered by decreasing |analytic node|, the positive node first.
    pub matched: Vec<MatchedNode>,
    /// Eigenvalues too close to the accumulation point 0 to be matched.
    pub unmatched_computed: Vec<f64>,
    pub max_rel_err: f64,
}

/// Matches the `count` largest-|λ| eigenvalues against ±aq^{k+1}.
///
/// Positive eigenvalues are taken in decreasing order and paired with
/// aq, aq², …; negative ones likewise. Eigenvalues below
/// `10·tol·max|λ|` are never matched. Any eigenvalue beyond the spectral
/// radius aq·(1+10·tol) is a spectrum violation.
pub fn match_spectrum(eigs: &[f64], rep: &RepParams, count: usize, tol: f64) -> Result<SpectrumReport> {
    if count == 0 {
        return Err(Error::Parameter("match count must be at least 1".into()));
    }
    let radius = rep.spectral_radius();
    let norm = eigs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(&bad) = eigs.iter().find(|x| x.abs() > radius * (1.0 + 10.0 * tol)) {
        return Err(Error::SpectrumViolation { computed: bad, radius });
    }
    let threshold = 10.0 * tol * norm;

    let mut by_mag: Vec<f64> = eigs.to_vec();
    by_mag.sort_by(|x, y| y.abs().partial_cmp(&x.abs()).unwrap_or(Ordering::Equal).then(y.partial_cmp(x).unwrap_or(Ordering::Equal)));
    let (selected, rest) = by_mag.split_at(count.min(by_mag.len()));

    let mut matched = Vec::new();
    let mut unmatched: Vec<f64> = rest.iter().copied().filter(|x| x.abs() < threshold).collect();
    let (mut kp, mut km) = (0usize, 0usize);
    for &lam in selected {
        if lam.abs() < threshold {
            unmatched.push(lam);
            continue;
        }
        let k = if lam >= 0.0 {
            kp += 1;
            kp - 1
        } else {
            km += 1;
            km - 1
        };
        let analytic = lam.signum() * radius * rep.q().powi(k as i32);
        matched.push(MatchedNode {
            analytic,
            computed: lam,
            rel_err: (lam - analytic).abs() / analytic.abs(),
        });
    }
    matched.sort_by(|x, y| {
        y.analytic
            .abs()
            .partial_cmp(&x.analytic.abs())
            .unwrap_or(Ordering::Equal)
            .then(y.analytic.partial_cmp(&x.analytic).unwrap_or(Ordering::Equal))
    });
    let max_rel_err = matched.iter().map(|m| m.rel_err).fold(0.0, f64::max);
    Ok(SpectrumReport {
        matched,
        unmatched_computed: unmatched,
        max_rel_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repops::{build_operator, node_weight};

    /// Characteristic polynomial det(T − xI) by the three-term recursion.
    fn char_poly(t: &SymTridiagonal, x: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, t.diag[0] - x);
        for i in 1..t.size() {
            let p2 = (t.diag[i] - x) * p1 - t.offdiag[i - 1].powi(2) * p0;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    /// Roots of the characteristic polynomial by sign changes on a fine grid
    /// refined with plain bisection on the determinant itself.
    fn char_roots(t: &SymTridiagonal) -> Vec<f64> {
        let r = t.norm_inf() + 1.0;
        let steps = 200_000;
        let mut roots = Vec::new();
        let mut x0 = -r;
        let mut f0 = char_poly(t, x0);
        for s in 1..=steps {
            let x1 = -r + 2.0 * r * s as f64 / steps as f64;
            let f1 = char_poly(t, x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                let (mut a, mut b, mut fa) = (x0, x1, f0);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    let fm = char_poly(t, m);
                    if fm * fa <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            x0 = x1;
            f0 = f1;
        }
        roots
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*seed >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn two_by_two() {
        let rep = RepParams::new(0.5, 1.0).unwrap();
        let op = build_operator(2, &rep).unwrap();
        let e = eigenvalues(&op, 1e-15).unwrap();
        assert!((e[0] + 1.0 / 3.0).abs() < 1e-15 && (e[1] - 1.0 / 3.0).abs() < 1e-15, "{e:?}");
    }

    #[test]
    fn sturm_matches_determinant_roots() {
        let mut seed = 17u64;
        for size in 1..=12 {
            let diag: Vec<f64> = (0..size).map(|_| 2.0 * lcg(&mut seed) - 1.0).collect();
            let off: Vec<f64> = (0..size - 1).map(|_| 0.1 + lcg(&mut seed)).collect();
            let t = SymTridiagonal::new(diag, off).unwrap();
            let bis = eigenvalues_sym(&t, 1e-15).unwrap();
            let roots = char_roots(&t);
            assert_eq!(bis.len(), roots.len(), "size {size}");
            for (x, y) in bis.iter().zip(&roots) {
                assert!((x - y).abs() < 1e-10, "size {size}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn spectrum_symmetric_about_zero() {
        for &(q, a) in &[(0.3, 0.25), (0.5, 1.0), (0.9, 4.0)] {
            let rep = RepParams::new(q, a).unwrap();
            let e = eigenvalues(&build_operator(81, &rep).unwrap(), 1e-15).unwrap();
            for i in 0..e.len() {
                assert!((e[i] + e[e.len() - 1 - i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn largest_eigenvalues_hit_the_grid() {
        let rep = RepParams::new(0.5, 1.0).unwrap();
        let e = eigenvalues(&build_operator(80, &rep).unwrap(), 1e-15).unwrap();
        let rpt = match_spectrum(&e, &rep, 6, 1e-8).unwrap();
        let want = [0.5, -0.5, 0.25, -0.25, 0.125, -0.125];
        for (m, w) in rpt.matched.iter().zip(want) {
            assert_eq!(m.analytic, w);
        }
        assert!(rpt.max_rel_err <= 1e-8, "{}", rpt.max_rel_err);
    }

    #[test]
    fn eigenvalues_interlace() {
        let rep = RepParams::new(0.5, 1.0).unwrap();
        for n in [10, 30, 60] {
            let big = eigenvalues(&build_operator(n, &rep).unwrap(), 1e-15).unwrap();
            let small = eigenvalues(&build_operator(n - 1, &rep).unwrap(), 1e-15).unwrap();
            for (i, s) in small.iter().enumerate() {
                // strict in exact arithmetic; converged brackets may touch to rounding
                let slack = 1e-14;
                assert!(big[i] - slack <= *s && *s <= big[i + 1] + slack, "n={n} i={i}");
                if *s - big[i] > slack && big[i + 1] - *s > slack {
                    assert!(big[i] < *s && *s < big[i + 1]);
                }
            }
        }
    }

    #[test]
    fn measure_mass_ratio_matches_weights() {
        let rep = RepParams::new(0.5, 1.0).unwrap();
        let m = spectral_measure(&build_operator(80, &rep).unwrap(), 1e-15).unwrap();
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
        assert!(m.parity_defect() < 1e-10);
        let i0 = m.nearest(0.5).unwrap();
        let i1 = m.nearest(0.25).unwrap();
        let ratio = m.masses[i0] / m.masses[i1];
        assert!((ratio - 1.2).abs() < 1e-10, "{ratio}");
        assert!((ratio - node_weight(0, &rep) / node_weight(1, &rep)).abs() < 1e-10);
    }

    #[test]
    fn violation_outside_radius() {
        let rep = RepParams::new(0.5, 1.0).unwrap();
        let err = match_spectrum(&[-0.1, 0.51], &rep, 1, 1e-8).unwrap_err();
        assert!(matches!(err, Error::SpectrumViolation { .. }));
    }
}
