//! The rational functions `S, r_0, r_1, W` of the column-convex polygon model, held
//! as integer polynomial pairs in `(z, u)`, and the critical point `(rho, tau)`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Polynomial in `(z, u)` with integer coefficients, keyed by `(deg_z, deg_u)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiPoly {
    pub terms: BTreeMap<(u32, u32), BigInt>,
}

impl BiPoly {
    pub fn from_terms(terms: &[((u32, u32), i64)]) -> Self {
        let mut p = BiPoly::default();
        for &(k, v) in terms {
            p.add_term(k, &BigInt::from(v));
        }
        p
    }

    pub fn constant(v: i64) -> Self {
        Self::from_terms(&[((0, 0), v)])
    }

    fn add_term(&mut self, k: (u32, u32), v: &BigInt) {
        let e = self.terms.entry(k).or_insert_with(BigInt::zero);
        *e += v;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn coeff(&self, dz: u32, du: u32) -> BigInt {
        self.terms.get(&(dz, du)).cloned().unwrap_or_default()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(BiPoly::constant(1), |acc, _| &acc * self)
    }

    pub fn d_u(&self) -> Self {
        let mut p = BiPoly::default();
        for (&(a, b), v) in &self.terms {
            if b > 0 {
                p.add_term((a, b - 1), &(v * b));
            }
        }
        p
    }

    pub fn d_z(&self) -> Self {
        let mut p = BiPoly::default();
        for (&(a, b), v) in &self.terms {
            if a > 0 {
                p.add_term((a - 1, b), &(v * a));
            }
        }
        p
    }

    pub fn eval(&self, z: f64, u: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), v)| v.to_f64().unwrap_or(f64::NAN) * z.powi(a as i32) * u.powi(b as i32))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut p = self.clone();
        for (&k, v) in &rhs.terms {
            p.add_term(k, v);
        }
        p
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(&k, v)| (k, -v)).collect() }
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut p = BiPoly::default();
        for (&(a, b), v) in &self.terms {
            for (&(c, d), w) in &rhs.terms {
                p.add_term((a + c, b + d), &(v * w));
            }
        }
        p
    }
}

/// `num / den` with `den(0, 0) = ±1` so that power-series expansion stays integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    pub num: BiPoly,
    pub den: BiPoly,
}

impl RationalFn {
    pub fn new(num: BiPoly, den: BiPoly) -> Self {
        RationalFn { num, den }
    }

    pub fn eval(&self, z: f64, u: f64) -> f64 {
        self.num.eval(z, u) / self.den.eval(z, u)
    }

    pub fn d_u(&self) -> Self {
        RationalFn {
            num: &(&self.num.d_u() * &self.den) - &(&self.num * &self.den.d_u()),
            den: &self.den * &self.den,
        }
    }

    pub fn d_z(&self) -> Self {
        RationalFn {
            num: &(&self.num.d_z() * &self.den) - &(&self.num * &self.den.d_z()),
            den: &self.den * &self.den,
        }
    }

    /// Dense coefficients `c[j][k] = [z^j u^k]` of the expansion at the origin for
    /// `j <= max_z`, `k <= max_u`.
    pub fn series(&self, max_z: usize, max_u: usize) -> Vec<Vec<BigInt>> {
        let d00 = self.den.coeff(0, 0);
        assert!(d00 == BigInt::from(1) || d00 == BigInt::from(-1), "denominator must be a unit at the origin");
        let mut c = vec![vec![BigInt::zero(); max_u + 1]; max_z + 1];
        for j in 0..=max_z {
            for k in 0..=max_u {
                let mut v = self.num.coeff(j as u32, k as u32);
                for (&(a, b), w) in &self.den.terms {
                    let (a, b) = (a as usize, b as usize);
                    if (a, b) == (0, 0) || a > j || b > k {
                        continue;
                    }
                    v -= w * &c[j - a][k - b];
                }
                c[j][k] = v * &d00;
            }
        }
        c
    }
}

/// The four rational functions of the column-convex polygon functional equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CCKernelData {
    pub s: RationalFn,
    pub r0: RationalFn,
    pub r1: RationalFn,
    pub w: RationalFn,
}

impl CCKernelData {
    pub fn new() -> Self {
        let one_minus_u = BiPoly::from_terms(&[((0, 0), 1), ((0, 1), -1)]);
        let one_minus_zu = BiPoly::from_terms(&[((0, 0), 1), ((1, 1), -1)]);
        let one_minus_z = BiPoly::from_terms(&[((0, 0), 1), ((1, 0), -1)]);
        let u2 = BiPoly::from_terms(&[((0, 2), 1)]);
        let s = RationalFn::new(&u2 * &one_minus_z.pow(2), &one_minus_u.pow(2) * &one_minus_zu.pow(2));
        // z u^2 (2z - zu - 1)
        let r0_num = BiPoly::from_terms(&[((2, 2), 2), ((2, 3), -1), ((1, 2), -1)]);
        let r0 = RationalFn::new(r0_num, &one_minus_u.pow(2) * &one_minus_zu);
        let r1 = RationalFn::new(BiPoly::from_terms(&[((1, 1), 1)]), one_minus_u);
        let w = RationalFn::new(BiPoly::from_terms(&[((2, 1), 1)]), one_minus_zu.clone());
        CCKernelData { s, r0, r1, w }
    }

    /// Common denominator `(1-u)^2 (1-zu)^2`.
    pub fn q(&self) -> BiPoly {
        self.s.den.clone()
    }
}

impl Default for CCKernelData {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CCProfile {
    pub rho: f64,
    pub tau: f64,
    /// `sqrt(2 S / S_uu)` at `(rho, tau)`
    pub beta: f64,
    /// amplitude of `tau - u_1(z) ~ a sqrt(1 - z/rho)` once the z-dependence of `S` is included
    pub puiseux_amplitude: f64,
    pub s_uu: f64,
    pub residual: f64,
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `1 - z S(z,u) = 0`, `S_u(z,u) = 0` for the critical point `(rho, tau)`.
pub fn cc_structural_constants() -> Result<CCProfile> {
    let data = CCKernelData::new();
    let s = &data.s;
    let su = s.d_u();
    let suu = su.d_u();
    let sz = s.d_z();
    let suz = su.d_z();

    // S(z, .) blows up at u = 1 and u = 1/z; its minimiser lies between
    let argmin = |z: f64| {
        // stay clear of the poles, where the polynomial evaluation loses every digit
        let margin = 1e-6 * (1.0 / z - 1.0);
        bisect(1.0 + margin, 1.0 / z - margin, |u| su.eval(z, u))
    };
    let g = |z: f64| z * s.eval(z, argmin(z)) - 1.0;
    if !(g(1e-3) < 0.0 && g(0.3) > 0.0) {
        return Err(Error::RootFindFailure("critical point not bracketed".into()));
    }
    let mut z = bisect(1e-3, 0.3, g);
    let mut u = argmin(z);

    // Newton on the pair of equations
    for _ in 0..5 {
        let f1 = 1.0 - z * s.eval(z, u);
        let f2 = su.eval(z, u);
        let j11 = -s.eval(z, u) - z * sz.eval(z, u);
        let j12 = -z * su.eval(z, u);
        let j21 = suz.eval(z, u);
        let j22 = suu.eval(z, u);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 {
            break;
        }
        let dz = (f1 * j22 - f2 * j12) / det;
        let du = (j11 * f2 - j21 * f1) / det;
        if !(dz.is_finite() && du.is_finite()) {
            break;
        }
        z -= dz;
        u -= du;
    }
    let residual = (1.0 - z * s.eval(z, u)).abs().max(su.eval(z, u).abs());
    if !(residual < 1e-10) {
        return Err(Error::RootFindFailure(format!("critical point residual {residual}")));
    }
    let s0 = s.eval(z, u);
    let s_uu = suu.eval(z, u);
    if !(s_uu > 0.0) {
        return Err(Error::RootFindFailure("S_uu is not positive at the critical point".into()));
    }
    Ok(CCProfile {
        rho: z,
        tau: u,
        beta: (2.0 * s0 / s_uu).sqrt(),
        puiseux_amplitude: (2.0 * (s0 + z * sz.eval(z, u)) / s_uu).sqrt(),
        s_uu,
        residual,
    })
}
