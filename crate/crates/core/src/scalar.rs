//! Scalar abstractions shared by the enumeration engines and the numeric kernel code.
//!
//! Exact counting runs over [`BigInt`]; rational tables use [`BigRational`]; quick
//! numeric passes use `f64`/`f32`. The kernel method only needs a real float type.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, ToPrimitive, Zero};

/// Ring element accumulated by the dynamic programs.
pub trait Weight: Clone + Debug + PartialEq + Send + Sync + Zero + One {
    fn from_u64(v: u64) -> Self;
    fn from_i64(v: i64) -> Self {
        let a = Self::from_u64(v.unsigned_abs());
        if v < 0 {
            Self::zero().sub_ref(&a)
        } else {
            a
        }
    }
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn add_assign_ref(&mut self, rhs: &Self);

    fn add_mul(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }

    /// Rough heap footprint, used only for memory-budget estimates.
    fn approx_bytes(bits_hint: u64) -> u64;
}

impl Weight for BigInt {
    fn from_u64(v: u64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.clone()
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn approx_bytes(bits_hint: u64) -> u64 {
        32 + bits_hint.div_ceil(64) * 8
    }
}

impl Weight for BigRational {
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn approx_bytes(bits_hint: u64) -> u64 {
        64 + 2 * bits_hint.div_ceil(64) * 8
    }
}

macro_rules! float_weight {
    ($t:ty) => {
        impl Weight for $t {
            fn from_u64(v: u64) -> Self {
                v as $t
            }
            fn from_bigint(v: &BigInt) -> Self {
                v.to_f64().unwrap_or(f64::INFINITY) as $t
            }
            fn mul_ref(&self, rhs: &Self) -> Self {
                self * rhs
            }
            fn sub_ref(&self, rhs: &Self) -> Self {
                self - rhs
            }
            fn add_assign_ref(&mut self, rhs: &Self) {
                *self += rhs;
            }
            fn approx_bytes(_bits_hint: u64) -> u64 {
                std::mem::size_of::<$t>() as u64
            }
        }
    };
}
float_weight!(f64);
float_weight!(f32);

/// Real scalar used by the kernel-method numerics.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn from_ratio(r: &BigRational) -> Self {
        Self::from_f64(crate::exact::ratio_to_f64(r)).unwrap_or_else(Self::nan)
    }
    fn c(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}
