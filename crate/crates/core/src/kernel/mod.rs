//! Numeric kernel method for meanders: structural constants, small and large
//! branches of the kernel `1 - z S(u)`, the Puiseux behaviour of the dominant small
//! branch, and the determinantal solution for the boundary series `G_k(z)`.

pub mod linalg;
pub mod roots;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ratio_to_f64, serde_ratio};
use crate::steps::{characteristics, eval_step_polynomial_unchecked, StepSet};
use crate::tolerances::{KernelTolerances, Tolerances};
use crate::Real;

use linalg::{condition_1, det, minor, Lu, Matrix};
use roots::polynomial_roots;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    NegativeDrift,
    ZeroDrift,
    PositiveDrift,
}

impl Regime {
    pub fn of(drift: &BigRational) -> Regime {
        if drift.is_zero() {
            Regime::ZeroDrift
        } else if drift.is_negative() {
            Regime::NegativeDrift
        } else {
            Regime::PositiveDrift
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "F: Serialize"))]
pub struct KernelProfile<F> {
    pub c: u64,
    pub d: u64,
    pub period: u64,
    #[serde(serialize_with = "serde_ratio")]
    pub gamma: BigRational,
    #[serde(serialize_with = "serde_ratio")]
    pub sigma2: BigRational,
    pub tau: F,
    pub rho: F,
    pub beta: F,
    pub regime: Regime,
}

pub type KernelProfileF64 = KernelProfile<f64>;

fn c_of<F: Real>(v: F) -> Complex<F> {
    Complex::new(v, F::zero())
}

/// `S(u)` at a complex point.
pub fn eval_step_complex<F: Real>(s: &StepSet, u: Complex<F>) -> Complex<F> {
    s.weights().iter().fold(c_of(F::zero()), |acc, (&i, w)| acc + u.powi(i as i32) * F::from_ratio(w))
}

/// Ascending coefficients of `u^(c+1) S'(u)`; the constant term is `-c s_{-c} < 0`.
fn derivative_polynomial<F: Real>(s: &StepSet) -> Vec<F> {
    let c = s.c() as i64;
    let mut coeffs = vec![F::zero(); (c + s.d() as i64 + 1) as usize];
    for (&i, w) in s.weights() {
        coeffs[(i + c) as usize] = F::c(i as f64) * F::from_ratio(w);
    }
    coeffs
}

fn eval_real<F: Real>(coeffs: &[F], x: F) -> (F, F) {
    let mut p = F::zero();
    let mut dp = F::zero();
    for &a in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

/// `tau` by bisection on `u^(c+1) S'(u)` with a growing bracket, then Newton polish.
pub fn critical_point<F: Real>(s: &StepSet, root_abs: F) -> Result<F> {
    let p = derivative_polynomial::<F>(s);
    let mut lo = F::zero();
    let mut hi = F::one();
    let mut grow = 0;
    while eval_real(&p, hi).0 <= F::zero() {
        lo = hi;
        hi = hi * F::c(2.0);
        grow += 1;
        if grow > 200 || !hi.is_finite() {
            return Err(Error::BracketFailure);
        }
    }
    for _ in 0..400 {
        let mid = (lo + hi) / F::c(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval_real(&p, mid).0 <= F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= root_abs * F::c(1e-3) {
            break;
        }
    }
    let mut tau = (lo + hi) / F::c(2.0);
    for _ in 0..3 {
        let (v, dv) = eval_real(&p, tau);
        if dv == F::zero() {
            break;
        }
        let next = tau - v / dv;
        if next > lo - root_abs && next < hi + root_abs {
            tau = next;
        }
    }
    // narrower float types cannot reach the f64 tolerance; accept their resolution
    if (hi - lo) > root_abs.max(F::epsilon() * F::c(64.0) * hi) {
        return Err(Error::BracketFailure);
    }
    Ok(tau)
}

/// `(tau, rho, beta)` and the drift data of a step set.
pub fn structural_constants<F: Real>(s: &StepSet) -> Result<KernelProfile<F>> {
    let tol = &Tolerances::embedded().kernel;
    let ch = characteristics(s);
    let tau = critical_point::<F>(s, F::c(tol.root_abs))?;
    let s0 = eval_step_polynomial_unchecked(s, tau, 0);
    let s2 = eval_step_polynomial_unchecked(s, tau, 2);
    if s2 <= F::zero() {
        return Err(Error::InternalInconsistency("S'' is not positive at the critical point".into()));
    }
    Ok(KernelProfile {
        c: s.c(),
        d: s.d(),
        period: ch.period,
        regime: Regime::of(&ch.drift),
        gamma: ch.drift,
        sigma2: ch.variance,
        tau,
        rho: F::one() / s0,
        beta: (F::c(2.0) * s0 / s2).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchSet<F> {
    pub z: F,
    /// small branches, `small[0]` the dominant real positive one
    pub small: Vec<Complex<F>>,
    /// large branches by increasing modulus
    pub large: Vec<Complex<F>>,
    /// relative gap `(|v_1| - max |u_i|) / |v_1|`
    pub gap: F,
    pub max_residual: F,
}

pub type BranchSetF64 = BranchSet<f64>;

impl<F: Real> BranchSet<F> {
    pub fn u1(&self) -> F {
        self.small[0].re
    }

    /// Smallest pairwise distance between small branches (`None` when there is only one).
    pub fn min_small_distance(&self) -> Option<F> {
        let mut best: Option<F> = None;
        for i in 0..self.small.len() {
            for j in i + 1..self.small.len() {
                let dd = (self.small[i] - self.small[j]).norm();
                best = Some(best.map_or(dd, |b: F| b.min(dd)));
            }
        }
        best
    }

    /// Non-real small branches pair up with their conjugates.
    pub fn conjugate_closed(&self, tol: F) -> bool {
        self.small.iter().all(|u| {
            u.im.abs() <= tol * u.norm() || self.small.iter().any(|v| (v - u.conj()).norm() <= tol * u.norm().max(F::one()))
        })
    }

    pub fn to_json(&self) -> serde_json::Value
    where
        F: Into<f64>,
    {
        let pair = |c: &Complex<F>| serde_json::json!([c.re.into(), c.im.into()]);
        serde_json::json!({
            "z": self.z.into(),
            "small": self.small.iter().map(pair).collect::<Vec<_>>(),
            "large": self.large.iter().map(pair).collect::<Vec<_>>(),
            "gap": self.gap.into(),
            "max_residual": self.max_residual.into(),
        })
    }
}

/// Ascending coefficients of `u^c (1 - z S(u))`.
fn kernel_polynomial<F: Real>(s: &StepSet, z: F) -> Vec<F> {
    let c = s.c() as i64;
    let mut coeffs = vec![F::zero(); (c + s.d() as i64 + 1) as usize];
    coeffs[c as usize] = F::one();
    for (&i, w) in s.weights() {
        let slot = &mut coeffs[(i + c) as usize];
        *slot = *slot - z * F::from_ratio(w);
    }
    coeffs
}

/// All `c + d` roots of the kernel at `0 < z < rho`, split into small and large branches.
pub fn branches_at<F: Real>(s: &StepSet, z: F) -> Result<BranchSet<F>> {
    let profile = structural_constants::<F>(s)?;
    branches_with(s, z, profile.rho, &Tolerances::embedded().kernel)
}

pub fn branches_with<F: Real>(s: &StepSet, z: F, rho: F, tol: &KernelTolerances) -> Result<BranchSet<F>> {
    if !(z > F::zero() && z < rho) {
        return Err(Error::Precondition(format!("z = {z} must lie in (0, rho = {rho})")));
    }
    let mut all = polynomial_roots(&kernel_polynomial(s, z))?;
    all.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal));
    let c = s.c() as usize;
    let (small, large) = all.split_at(c);
    let mut small = small.to_vec();
    let large = large.to_vec();
    let u_c = small[c - 1].norm();
    let v_1 = large[0].norm();
    let gap = (v_1 - u_c) / v_1;
    if gap < F::c(tol.classification_gap) {
        return Err(Error::ClassificationAmbiguity { z: z.to_f64().unwrap_or(f64::NAN), gap: gap.to_f64().unwrap_or(f64::NAN) });
    }

    let real_tol = F::c(1e-8);
    let dominant = small
        .iter()
        .enumerate()
        .filter(|(_, u)| u.re > F::zero() && u.im.abs() <= real_tol * u.norm())
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::RootFindFailure(format!("no positive real small branch at z = {z}")))?;
    let mut u1 = small.remove(dominant);
    u1.im = F::zero();
    small.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    small.insert(0, u1);

    let max_residual = small
        .iter()
        .chain(&large)
        .map(|&u| (c_of(F::one()) - eval_step_complex(s, u) * z).norm())
        .fold(F::zero(), F::max);
    if max_residual > F::c(tol.residual) {
        return Err(Error::RootFindFailure(format!("kernel residual {max_residual} at z = {z}")));
    }
    Ok(BranchSet { z, small, large, gap, max_residual })
}

/// `t_i(u) = z u^c r_i(u) = z sum_{j=i+1..c} s_{-j} u^(c+i-j)`
fn boundary_coefficient<F: Real>(s: &StepSet, z: F, i: usize, u: Complex<F>) -> Complex<F> {
    let c = s.c() as i64;
    let mut acc = c_of(F::zero());
    for j in (i as i64 + 1)..=c {
        let w = s.weight(-j);
        if !w.is_zero() {
            acc = acc + u.powi((c + i as i64 - j) as i32) * F::from_ratio(&w);
        }
    }
    acc * z
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "F: Serialize"))]
pub struct CatalyticSolution<F> {
    pub z: F,
    /// `G_0(z) .. G_{c-1}(z)`
    pub g_values: Vec<F>,
    /// `(u, F(z, 1, u))`
    pub f_at: Vec<(F, F)>,
    pub condition: F,
    /// largest relative gap between the direct solve and the Cramer / Laplace forms
    pub cramer_deviation: F,
    pub laplace_deviation: F,
    /// relative gap between `det M` and `(s_{-c} z)^c` times the Vandermonde determinant
    pub vandermonde_deviation: F,
    pub cross_check_ok: bool,
}

/// Boundary series `G_k(z)` of meanders (weighted counts of meanders ending at
/// altitude `k`), and optionally the full meander series `F(z, 1, u)`.
pub fn solve_meander_gf<F: Real>(s: &StepSet, z: F, u_eval: &[F]) -> Result<CatalyticSolution<F>> {
    let tol = &Tolerances::embedded().kernel;
    let profile = structural_constants::<F>(s)?;
    let branches = branches_with(s, z, profile.rho, tol)?;
    solve_with_branches(s, &branches, u_eval, tol)
}

pub fn solve_with_branches<F: Real>(
    s: &StepSet,
    branches: &BranchSet<F>,
    u_eval: &[F],
    tol: &KernelTolerances,
) -> Result<CatalyticSolution<F>> {
    let z = branches.z;
    let c = s.c() as usize;
    let m: Matrix<F> = branches
        .small
        .iter()
        .map(|&u| (0..c).map(|i| boundary_coefficient(s, z, i, u)).collect())
        .collect();
    let y: Vec<Complex<F>> = branches.small.iter().map(|u| u.powi(c as i32)).collect();

    let condition = condition_1(&m);
    if !(condition <= F::c(tol.condition_max)) {
        return Err(Error::IllConditioned(condition.to_f64().unwrap_or(f64::INFINITY)));
    }
    let lu = Lu::new(&m);
    let x = lu.solve(&y).ok_or(Error::IllConditioned(f64::INFINITY))?;

    // Cramer and Laplace forms of the same solution
    let det_m = lu.det();
    let mut cramer_dev = F::zero();
    let mut laplace_dev = F::zero();
    // deviations relative to the largest component: some G_k vanish identically for periodic sets
    let scale = x.iter().map(|v| v.norm()).fold(F::min_positive_value(), F::max);
    for k in 0..c {
        let mut mk = m.clone();
        for (row, yl) in mk.iter_mut().zip(&y) {
            row[k] = *yl;
        }
        let cramer = det(&mk) / det_m;
        let mut laplace = c_of(F::zero());
        for (l, yl) in y.iter().enumerate() {
            let sign = if (k + l) % 2 == 0 { F::one() } else { -F::one() };
            laplace = laplace + *yl * det(&minor(&m, l, k)) * sign;
        }
        laplace = laplace / det_m;
        cramer_dev = cramer_dev.max((cramer - x[k]).norm() / scale);
        laplace_dev = laplace_dev.max((laplace - x[k]).norm() / scale);
    }
    let s_c = F::from_ratio(&s.weight(-(c as i64)));
    let mut vdm = c_of((s_c * z).powi(c as i32));
    for i in 0..c {
        for j in i + 1..c {
            vdm = vdm * (branches.small[j] - branches.small[i]);
        }
    }
    let vandermonde_deviation = (det_m - vdm).norm() / vdm.norm().max(F::min_positive_value());

    let g_values: Vec<F> = x.iter().map(|v| v.re).collect();
    let imag = x.iter().map(|v| v.im.abs() / scale).fold(F::zero(), F::max);
    let check = F::c(tol.cross_check_rel);
    let cross_check_ok = cramer_dev <= check && laplace_dev <= check && vandermonde_deviation <= check && imag <= check;

    let f_at = u_eval
        .iter()
        .map(|&u| (u, meander_series_at(s, z, u, &g_values)))
        .collect();
    Ok(CatalyticSolution {
        z,
        g_values,
        f_at,
        condition,
        cramer_deviation: cramer_dev,
        laplace_deviation: laplace_dev,
        vandermonde_deviation,
        cross_check_ok,
    })
}

/// `F(z,1,u) = (u^c - sum_i t_i(u) G_i) / (u^c (1 - z S(u)))` for real `u > 0`.
pub fn meander_series_at<F: Real>(s: &StepSet, z: F, u: F, g: &[F]) -> F {
    let c = s.c() as i32;
    let uc = u.powi(c);
    let mut num = uc;
    for (i, gi) in g.iter().enumerate() {
        num = num - boundary_coefficient(s, z, i, c_of(u)).re * *gi;
    }
    num / (uc * (F::one() - z * eval_step_polynomial_unchecked(s, u, 0)))
}

/// Partial sums `sum_{m<=m_max} [z^m] G_k z^m` for `k < c` from exact meander counts.
pub fn boundary_partial_sums(s: &StepSet, z: f64, m_max: usize) -> Vec<f64> {
    let counts = crate::enumerate::meander_altitude_counts(s, m_max, s.c() as usize - 1);
    let mut sums = vec![0.0; s.c() as usize];
    let mut zp = 1.0;
    for row in &counts {
        for (k, v) in row.iter().enumerate() {
            sums[k] += ratio_to_f64(v) * zp;
        }
        zp *= z;
    }
    sums
}

/// Upper bound on `sum_{m > m_max} [z^m] G_k z^m`: every coefficient is at most
/// `S(u*)^m / u*^k`, summed as a geometric tail with `u* = tau`.
pub fn truncation_bound(s: &StepSet, z: f64, m_max: usize, k: usize) -> Result<f64> {
    let profile = structural_constants::<f64>(s)?;
    let u = profile.tau;
    let ratio = z * eval_step_polynomial_unchecked(s, u, 0);
    if ratio >= 1.0 {
        return Err(Error::Precondition(format!("z = {z} outside the convergence disc")));
    }
    Ok(u.powi(-(k as i32)) * ratio.powi(m_max as i32 + 1) / (1.0 - ratio))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PuiseuxRow {
    pub z: f64,
    pub u1: f64,
    /// `(tau - u_1(z)) / sqrt(1 - z/rho)`
    pub amplitude: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PuiseuxReport {
    pub beta: f64,
    pub rows: Vec<PuiseuxRow>,
    pub max_deviation: f64,
    pub decreasing: bool,
    pub success: bool,
}

/// Compares `(tau - u_1(z)) / sqrt(1 - z/rho)` with `beta` on a grid in `(0.8 rho, rho)`.
pub fn verify_puiseux(s: &StepSet, grid: &[f64]) -> Result<PuiseuxReport> {
    let tol = &Tolerances::embedded().kernel;
    let p = structural_constants::<f64>(s)?;
    if grid.is_empty() || grid.iter().any(|&z| !(z > 0.8 * p.rho && z < p.rho)) {
        return Err(Error::Precondition(format!("grid must lie in (0.8 rho, rho) = ({}, {})", 0.8 * p.rho, p.rho)));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rows = grid
        .par_iter()
        .map(|&z| {
            let b = branches_with(s, z, p.rho, tol)?;
            let amplitude = (p.tau - b.u1()) / (1.0 - z / p.rho).sqrt();
            Ok(PuiseuxRow { z, u1: b.u1(), amplitude, deviation: (amplitude - p.beta).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let decreasing = rows.windows(2).all(|w| w[1].deviation < w[0].deviation);
    let last = rows.last().map_or(f64::INFINITY, |r| r.deviation);
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(PuiseuxReport {
        beta: p.beta,
        success: decreasing && last < tol.puiseux_rel * p.beta,
        rows,
        max_deviation,
        decreasing,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionRow {
    pub z: f64,
    pub small_distinct: Option<f64>,
    pub modulus_gap: Option<f64>,
    pub det_proxy: Option<f64>,
    pub conjugate_pairs: Option<bool>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub tau: f64,
    pub rho: f64,
    pub beta: f64,
    pub regime: Regime,
    pub period: u64,
    pub aperiodic: bool,
    pub checks: Vec<AssumptionRow>,
    pub warnings: Vec<String>,
    pub all_passed: bool,
}

/// Per-grid-point audit of the analytic assumptions behind the kernel solution.
pub fn assumption_report(s: &StepSet, grid: &[f64]) -> Result<AssumptionReport> {
    let tol = Tolerances::embedded().kernel.clone();
    let p = structural_constants::<f64>(s)?;
    let checks: Vec<AssumptionRow> = grid
        .par_iter()
        .map(|&z| audit_point(s, z, p.rho, &tol))
        .collect();
    let mut warnings = Vec::new();
    if p.period != 1 {
        warnings.push(format!(
            "step set is periodic (period {}); the dominant singularity is not unique",
            p.period
        ));
    }
    let failed = checks.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        warnings.push(format!("{failed} grid point(s) failed a check"));
    }
    Ok(AssumptionReport {
        tau: p.tau,
        rho: p.rho,
        beta: p.beta,
        regime: p.regime,
        period: p.period,
        aperiodic: p.period == 1,
        all_passed: failed == 0,
        checks,
        warnings,
    })
}

fn audit_point(s: &StepSet, z: f64, rho: f64, tol: &KernelTolerances) -> AssumptionRow {
    let failed = |e: Error| AssumptionRow {
        z,
        small_distinct: None,
        modulus_gap: None,
        det_proxy: None,
        conjugate_pairs: None,
        passed: false,
        error: Some(format!("{}: {e}", e.code())),
    };
    let b = match branches_with(s, z, rho, tol) {
        Ok(b) => b,
        Err(e) => return failed(e),
    };
    if let Err(e) = solve_with_branches(s, &b, &[], tol) {
        return failed(e);
    }
    let c = s.c() as usize;
    let m: Matrix<f64> = b.small.iter().map(|&u| (0..c).map(|i| boundary_coefficient(s, z, i, u)).collect()).collect();
    let mut vdm = 1.0;
    for i in 0..c {
        for j in i + 1..c {
            vdm *= (b.small[j] - b.small[i]).norm();
        }
    }
    let g = ratio_to_f64(&s.weight(-(c as i64))) * z;
    let det_proxy = det(&m).norm() / (g.abs().powi(c as i32) * vdm);
    let distinct = b.min_small_distance();
    let conj = b.conjugate_closed(1e-8);
    let passed = distinct.is_none_or(|d| d > tol.classification_gap)
        && b.gap > tol.classification_gap
        && det_proxy > 0.5
        && conj;
    AssumptionRow {
        z,
        small_distinct: distinct,
        modulus_gap: Some(b.gap),
        det_proxy: Some(det_proxy),
        conjugate_pairs: Some(conj),
        passed,
        error: None,
    }
}

/// `n` points evenly spaced strictly inside `(a, b)`.
pub fn open_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| a + (b - a) * i as f64 / (n + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steps::{parse_step_set, SpecFormat};

    fn set(spec: &str) -> StepSet {
        parse_step_set(spec, SpecFormat::Compact).unwrap()
    }

    #[test]
    fn constants() {
        let b = structural_constants::<f64>(&StepSet::bernoulli()).unwrap();
        assert!((b.tau - 1.0).abs() < 1e-12 && (b.rho - 0.5).abs() < 1e-12);
        assert!((b.beta - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(b.regime, Regime::ZeroDrift);
        let m = structural_constants::<f64>(&StepSet::motzkin()).unwrap();
        assert!((m.rho - 1.0 / 3.0).abs() < 1e-12 && (m.beta - 3f64.sqrt()).abs() < 1e-12);
        let t = structural_constants::<f64>(&set("-2:1,-1:1,1:1")).unwrap();
        assert!(eval_step_polynomial_unchecked(&set("-2:1,-1:1,1:1"), t.tau, 1).abs() < 1e-12);
        let neg = structural_constants::<f64>(&set("-1:2,0:1,1:1")).unwrap();
        assert!((neg.tau - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(neg.regime, Regime::NegativeDrift);
        let f32p = structural_constants::<f32>(&StepSet::motzkin()).unwrap();
        assert!((f32p.beta - 3f32.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn bernoulli_branch_closed_form() {
        let b = branches_at(&StepSet::bernoulli(), 0.25).unwrap();
        let exact = (1.0 - (1.0f64 - 0.25).sqrt()) / 0.5;
        assert!((b.u1() - exact).abs() < 1e-12);
        let tiny = branches_at(&StepSet::bernoulli(), 1e-4).unwrap();
        assert!((tiny.u1() - 1e-4).abs() < 1e-11);
        assert!(branches_at(&StepSet::bernoulli(), 0.5).is_err());
    }

    #[test]
    fn two_small_branches() {
        let s = set("-2:1,-1:1,1:1");
        let b = branches_at(&s, 0.2).unwrap();
        assert_eq!((b.small.len(), b.large.len()), (2, 1));
        assert!(b.max_residual < 1e-10);
    }

    #[test]
    fn catalan_partial_sums() {
        let sol = solve_meander_gf(&StepSet::bernoulli(), 0.25, &[]).unwrap();
        let sums = boundary_partial_sums(&StepSet::bernoulli(), 0.25, 80);
        assert!((sol.g_values[0] - sums[0]).abs() < 1e-10);
        assert!(sol.cross_check_ok);
    }

    #[test]
    fn full_series_at_u() {
        let s = StepSet::motzkin();
        let z: f64 = 0.2;
        let sol = solve_meander_gf(&s, z, &[1.0, 0.5]).unwrap();
        let counts = crate::enumerate::meander_altitude_counts(&s, 120, 240);
        for &(u, f) in &sol.f_at {
            let u: f64 = u;
            let series: f64 = counts
                .iter()
                .enumerate()
                .map(|(m, row)| {
                    row.iter().enumerate().map(|(k, v)| ratio_to_f64(v) * u.powi(k as i32)).sum::<f64>() * z.powi(m as i32)
                })
                .sum();
            assert!((f - series).abs() < 1e-9 * series, "u={u}: {f} vs {series}");
        }
    }

    #[test]
    fn near_origin() {
        let s = set("-2:1,-1:1,1:1");
        let sol = solve_meander_gf(&s, 1e-6, &[]).unwrap();
        assert!((sol.g_values[0] - 1.0).abs() < 1e-5);
        assert!(sol.g_values[1].abs() < 1e-5);
    }

    #[test]
    fn puiseux_grid() {
        let r = verify_puiseux(&StepSet::motzkin(), &[0.30, 0.32, 0.333]).unwrap();
        assert!(r.decreasing);
        let b = verify_puiseux(&StepSet::bernoulli(), &[0.49]).unwrap();
        assert!((b.rows[0].amplitude - 2f64.sqrt()).abs() < 0.1 * 2f64.sqrt());
        assert!(matches!(verify_puiseux(&StepSet::motzkin(), &[0.1]), Err(Error::Precondition(_))));
    }

    #[test]
    fn audits() {
        let r = assumption_report(&StepSet::motzkin(), &open_grid(0.0, 1.0 / 3.0, 10)).unwrap();
        assert!(r.all_passed && r.aperiodic && r.warnings.is_empty());
        let b = assumption_report(&StepSet::bernoulli(), &open_grid(0.0, 0.5, 4)).unwrap();
        assert!(!b.aperiodic && !b.warnings.is_empty());
        let p = assumption_report(&set("-2:1,2:1"), &open_grid(0.0, 0.5, 4)).unwrap();
        assert_eq!(p.period, 4);
        assert!(!p.warnings.is_empty());
    }
}
