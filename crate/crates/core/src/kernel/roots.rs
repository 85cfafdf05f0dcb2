//! Polynomial roots by the Aberth–Ehrlich iteration.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Real;

/// Evaluate `p` (ascending coefficients) and `p'` at `x` by Horner.
pub fn horner<F: Real>(coeffs: &[F], x: Complex<F>) -> (Complex<F>, Complex<F>) {
    let mut p = Complex::new(F::zero(), F::zero());
    let mut dp = p;
    for &a in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + Complex::new(a, F::zero());
    }
    (p, dp)
}

/// All complex roots of the polynomial with ascending real coefficients `coeffs`.
/// The leading coefficient must be nonzero.
pub fn polynomial_roots<F: Real>(coeffs: &[F]) -> Result<Vec<Complex<F>>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 || coeffs[n] == F::zero() {
        return Err(Error::RootFindFailure("degenerate polynomial".into()));
    }
    let lead = coeffs[n];
    let monic: Vec<F> = coeffs.iter().map(|&a| a / lead).collect();

    // start on circles whose radii follow the Newton polygon roughly: geometric
    // spread between the smallest and largest root bounds
    let upper = (0..n)
        .filter(|&i| monic[i] != F::zero())
        .map(|i| monic[i].abs().powf(F::one() / F::c((n - i) as f64)))
        .fold(F::zero(), F::max)
        * F::c(2.0);
    let first_nz = (0..=n).find(|&i| monic[i] != F::zero()).unwrap_or(0);
    let lower = if first_nz == 0 {
        (1..=n)
            .filter(|&i| monic[i] != F::zero())
            .map(|i| (monic[0] / monic[i]).abs().powf(F::one() / F::c(i as f64)))
            .fold(F::infinity(), F::min)
            * F::c(0.5)
    } else {
        F::zero()
    };
    let mut z: Vec<Complex<F>> = (0..n)
        .map(|k| {
            let frac = if n > 1 { F::c(k as f64 / (n - 1) as f64) } else { F::zero() };
            let radius = if lower > F::zero() && upper > lower {
                lower * (upper / lower).powf(frac)
            } else {
                upper.max(F::one())
            };
            let angle = F::c(2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4);
            Complex::from_polar(radius, angle)
        })
        .collect();

    let eps = F::epsilon() * F::c(8.0);
    let mut converged = false;
    for _ in 0..1000 {
        let mut max_step = F::zero();
        for k in 0..n {
            let (p, dp) = horner(&monic, z[k]);
            if p.norm() == F::zero() {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex::new(F::zero(), F::zero());
            for j in 0..n {
                if j != k {
                    sum = sum + (z[k] - z[j]).inv();
                }
            }
            let w = ratio / (Complex::new(F::one(), F::zero()) - ratio * sum);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[k] = z[k] - w;
            let rel = w.norm() / z[k].norm().max(F::min_positive_value());
            max_step = max_step.max(rel);
        }
        if max_step <= eps {
            converged = true;
            break;
        }
    }
    // a few Newton polishing steps absorb the last ulps
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&monic, *root);
            if dp.norm() == F::zero() {
                break;
            }
            let next = *root - p / dp;
            if next.re.is_finite() && next.im.is_finite() {
                *root = next;
            }
        }
    }
    if !converged {
        let scale = monic.iter().fold(F::zero(), |a, &c| a + c.abs());
        let worst = z
            .iter()
            .map(|&r| horner(&monic, r).0.norm() / (scale * r.norm().max(F::one()).powi(n as i32)))
            .fold(F::zero(), F::max);
        if worst > F::c(1e-12) {
            return Err(Error::RootFindFailure(format!("Aberth iteration stalled (scaled residual {worst})")));
        }
    }
    Ok(z)
}
