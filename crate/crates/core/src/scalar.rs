//! Scalar abstractions.
//!
//! Floating-point analysis code is written against [`Real`] so it runs on
//! `f32` or `f64`. The interval construction behind the staircase only needs
//! field arithmetic and ordering, so it is written against [`Exact`], which
//! also admits `BigRational`.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + Serialize
        + DeserializeOwned
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("index representable in scalar type")
}

#[inline]
pub fn to_f64<T: ToPrimitive>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Ordered field scalar used by the interval construction.
pub trait Exact:
    Num + Clone + PartialOrd + Debug + Send + Sync + FromPrimitive + ToPrimitive + 'static
{
    /// Exact `p/q` string when the value is a dyadic rational, otherwise a
    /// decimal with 17 significant digits.
    fn to_exact_string(&self) -> String;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer") / Self::from_i64(den).expect("integer")
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

fn dyadic_string(mantissa: u64, exponent: i16, sign: i8) -> String {
    let sign = if sign < 0 && mantissa != 0 { "-" } else { "" };
    if mantissa == 0 {
        return "0".to_string();
    }
    let mut m = mantissa;
    let mut e = exponent as i32;
    while m % 2 == 0 && e < 0 {
        m /= 2;
        e += 1;
    }
    if e >= 0 {
        let v = BigInt::from(m) << (e as usize);
        format!("{sign}{v}")
    } else {
        let den = BigInt::one() << ((-e) as usize);
        format!("{sign}{m}/{den}")
    }
}

impl Exact for f64 {
    fn to_exact_string(&self) -> String {
        if !self.is_finite() {
            return format!("{self:.17e}");
        }
        let (m, e, s) = Float::integer_decode(*self);
        dyadic_string(m, e, s)
    }
}

impl Exact for f32 {
    fn to_exact_string(&self) -> String {
        if !self.is_finite() {
            return format!("{self:.17e}");
        }
        let (m, e, s) = Float::integer_decode(*self);
        dyadic_string(m, e, s)
    }
}

impl Exact for BigRational {
    fn to_exact_string(&self) -> String {
        let den = self.denom();
        let is_pow2 = den.is_positive() && (den & (den - BigInt::one())).is_zero();
        if is_pow2 {
            if den.is_one() {
                self.numer().to_string()
            } else {
                format!("{}/{}", self.numer(), den)
            }
        } else {
            format!("{:.16e}", to_f64(self.clone()))
        }
    }
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(items: I) -> T {
    let mut acc = CompensatedSum::new();
    for x in items {
        acc.add(x);
    }
    acc.value()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = from_usize::<T>(xs.len());
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)));
    let sxx = compensated_sum(xs.iter().map(|&x| (x - mx) * (x - mx)));
    sxy / sxx
}
