//! Wigner 3j symbols for integer angular momenta via the Racah single-sum
//! formula, with exact big-integer arithmetic under the final square root.
//!
//! The alternating sum and the radicand are both accumulated as exact
//! rationals, so there is no cancellation loss; only the terminal
//! `sqrt`/product is floating point. Accurate far beyond the `j <= 40`
//! range this crate needs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arguments of a 3j symbol with integer momenta.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Wigner3jArg {
    pub j1: u32,
    pub j2: u32,
    pub j3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl Wigner3jArg {
    pub fn new(j1: u32, j2: u32, j3: u32, m1: i32, m2: i32, m3: i32) -> Self {
        Wigner3jArg {
            j1,
            j2,
            j3,
            m1,
            m2,
            m3,
        }
    }
}

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Wigner 3j symbol. Selection-rule failures (|m| > j, m1+m2+m3 != 0, or a
/// violated triangle inequality) return 0.
pub fn wigner3j(a: Wigner3jArg) -> f64 {
    let (j1, j2, j3) = (a.j1 as i64, a.j2 as i64, a.j3 as i64);
    let (m1, m2, m3) = (a.m1 as i64, a.m2 as i64, a.m3 as i64);
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if m1 + m2 + m3 != 0 {
        return 0.0;
    }
    if j3 < (j1 - j2).abs() || j3 > j1 + j2 {
        return 0.0;
    }

    // radicand: triangle coefficient times the (j +- m)! factorials
    let radicand = BigRational::new(
        factorial(j1 + j2 - j3)
            * factorial(j1 - j2 + j3)
            * factorial(-j1 + j2 + j3)
            * factorial(j1 + m1)
            * factorial(j1 - m1)
            * factorial(j2 + m2)
            * factorial(j2 - m2)
            * factorial(j3 + m3)
            * factorial(j3 - m3),
        factorial(j1 + j2 + j3 + 1),
    );

    let t_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let t_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let denom = factorial(t)
            * factorial(j1 + j2 - j3 - t)
            * factorial(j1 - m1 - t)
            * factorial(j2 + m2 - t)
            * factorial(j3 - j2 + m1 + t)
            * factorial(j3 - j1 - m2 + t);
        let term = BigRational::new(BigInt::one(), denom);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }

    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    // exact up to this point; one rounding each for the ratio and the sqrt
    let sum_f = ratio_to_f64(&sum);
    let rad_f = ratio_to_f64(&radicand);
    phase * sum_f * rad_f.sqrt()
}

/// Convert an exact rational to f64 without overflowing on huge factorials.
fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // scale numerator and denominator down together
    let bits = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
    let numer = r.numer() >> bits;
    let denom = r.denom() >> bits;
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * (numer.magnitude().to_f64().unwrap_or(f64::MAX)
        / denom.magnitude().to_f64().unwrap_or(f64::MAX))
        .abs()
}
