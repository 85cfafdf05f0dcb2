//! Scalars of the form `r * 2^(a/2) * pi^(b/2)` with `r` rational.

use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factorial, ratio_to_f64, render};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactRadical {
    coeff: BigRational,
    half_pow2: i64,
    half_powpi: i64,
}

impl ExactRadical {
    pub fn new(coeff: BigRational, half_pow2: i64, half_powpi: i64) -> Self {
        let mut r = ExactRadical { coeff, half_pow2, half_powpi };
        r.normalize();
        r
    }

    pub fn rational(coeff: BigRational) -> Self {
        Self::new(coeff, 0, 0)
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    /// `2^(e/2)`
    pub fn sqrt2_pow(e: i64) -> Self {
        Self::new(BigRational::one(), e, 0)
    }

    /// `pi^(e/2)`
    pub fn sqrt_pi_pow(e: i64) -> Self {
        Self::new(BigRational::one(), 0, e)
    }

    fn normalize(&mut self) {
        if self.coeff.is_zero() {
            self.half_pow2 = 0;
            self.half_powpi = 0;
            return;
        }
        let whole = self.half_pow2.div_euclid(2);
        self.half_pow2 -= 2 * whole;
        let p = BigInt::one() << whole.unsigned_abs();
        self.coeff = if whole >= 0 { &self.coeff * p } else { &self.coeff / p };
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn half_pow2(&self) -> i64 {
        self.half_pow2
    }

    pub fn half_powpi(&self) -> i64 {
        self.half_powpi
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    /// Sum of two radicals with the same irrational part.
    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if self.half_pow2 != rhs.half_pow2 || self.half_powpi != rhs.half_powpi {
            return Err(Error::InternalInconsistency(format!("cannot add {self} and {rhs}")));
        }
        Ok(Self::new(&self.coeff + &rhs.coeff, self.half_pow2, self.half_powpi))
    }

    pub fn to_f64(&self) -> f64 {
        let c = ratio_to_f64(&self.coeff);
        c * std::f64::consts::SQRT_2.powi(self.half_pow2 as i32)
            * std::f64::consts::PI.sqrt().powi(self.half_powpi as i32)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InternalInconsistency("division by zero radical".into()));
        }
        Ok(Self::new(self.coeff.recip(), -self.half_pow2, -self.half_powpi))
    }
}

impl Mul for &ExactRadical {
    type Output = ExactRadical;
    fn mul(self, rhs: &ExactRadical) -> ExactRadical {
        ExactRadical::new(
            &self.coeff * &rhs.coeff,
            self.half_pow2 + rhs.half_pow2,
            self.half_powpi + rhs.half_powpi,
        )
    }
}

impl Mul for ExactRadical {
    type Output = ExactRadical;
    fn mul(self, rhs: ExactRadical) -> ExactRadical {
        &self * &rhs
    }
}

impl Div for &ExactRadical {
    type Output = ExactRadical;
    /// Panics on a zero divisor; use [`ExactRadical::recip`] to get an error instead.
    fn div(self, rhs: &ExactRadical) -> ExactRadical {
        self * &rhs.recip().expect("division by zero radical")
    }
}

impl Neg for ExactRadical {
    type Output = ExactRadical;
    fn neg(self) -> ExactRadical {
        ExactRadical::new(-self.coeff, self.half_pow2, self.half_powpi)
    }
}

impl fmt::Display for ExactRadical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.coeff))?;
        if self.half_pow2 != 0 {
            write!(f, " * 2^({}/2)", self.half_pow2)?;
        }
        if self.half_powpi != 0 {
            write!(f, " * pi^({}/2)", self.half_powpi)?;
        }
        Ok(())
    }
}

impl Serialize for ExactRadical {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExactRadical", 5)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("coeff", &render(&self.coeff))?;
        st.serialize_field("half_pow2", &self.half_pow2)?;
        st.serialize_field("half_powpi", &self.half_powpi)?;
        st.serialize_field("value", &self.to_f64())?;
        st.end()
    }
}

/// `Gamma(x/2)` for an integer `x`; errors at the poles `x = 0, -2, -4, ...`.
pub fn gamma_half(x: i64) -> Result<ExactRadical> {
    if x <= 0 && x % 2 == 0 {
        return Err(Error::OrderOutOfRange(format!("Gamma pole at {}", x / 2)));
    }
    if x > 0 && x % 2 == 0 {
        return Ok(ExactRadical::rational(BigRational::from_integer(factorial(x as u64 / 2 - 1))));
    }
    if x > 0 {
        let k = (x as u64 - 1) / 2;
        let num = factorial(2 * k);
        let den = (BigInt::one() << (2 * k)) * factorial(k);
        return Ok(ExactRadical::new(BigRational::new(num, den), 0, 1));
    }
    // negative half-integers: Gamma(y) = Gamma(y + 1) / y
    let up = gamma_half(x + 2)?;
    Ok(&up * &ExactRadical::rational(BigRational::new(BigInt::from(2), BigInt::from(x))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn normal_form() {
        assert_eq!(ExactRadical::new(int(3), 4, 1), ExactRadical::new(int(12), 0, 1));
        assert_eq!(ExactRadical::new(int(1), -1, 0), ExactRadical::new(ratio(1, 2), 1, 0));
        assert_eq!(ExactRadical::new(int(0), 3, 5), ExactRadical::zero());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_half(-1).unwrap(), ExactRadical::new(int(-2), 0, 1));
        assert_eq!(gamma_half(1).unwrap(), ExactRadical::sqrt_pi_pow(1));
        assert_eq!(gamma_half(5).unwrap(), ExactRadical::new(ratio(3, 4), 0, 1));
        assert_eq!(gamma_half(8).unwrap(), ExactRadical::rational(int(6)));
        assert_eq!(gamma_half(-3).unwrap(), ExactRadical::new(ratio(4, 3), 0, 1));
        assert!(gamma_half(0).is_err());
        assert!(gamma_half(-4).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = ExactRadical::new(ratio(1, 4), 1, 1);
        assert!((a.to_f64() - (std::f64::consts::PI / 8.0).sqrt()).abs() < 1e-15);
        assert_eq!(&a * &a, ExactRadical::new(ratio(1, 8), 0, 2));
        assert_eq!(a.checked_add(&a).unwrap(), ExactRadical::new(ratio(1, 2), 1, 1));
        assert!(a.checked_add(&ExactRadical::one()).is_err());
        assert_eq!(a.to_string(), "1/4 * 2^(1/2) * pi^(1/2)");
        assert_eq!(&a / &a, ExactRadical::one());
    }
}
