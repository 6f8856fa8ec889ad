//! Double-double arithmetic (about 106 significant bits).
//!
//! Only used to evaluate models for finite-difference cross-checks: with the
//! rounding floor pushed to ~1e-32, a central difference exposes its pure
//! `O(η²)` truncation error and the Richardson ratio between two step sizes
//! can be measured cleanly.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use super::dual::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

// 2π and π/2 split into leading and trailing doubles.
const TWO_PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::TAU,
    lo: 2.449_293_598_294_706_4e-16,
};
const HALF_PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123_233_995_736_766e-17,
};
const LN_2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Self::new(self.hi * f, self.lo * f)
    }

    // Taylor series for |x| <= π/4; returns (sin x, cos x).
    fn sin_cos_reduced(x: Self) -> (Self, Self) {
        let x2 = x * x;
        let mut sin = x;
        let mut cos = Self::one();
        let mut term_s = x;
        let mut term_c = Self::one();
        for k in 1..30 {
            let kk = k as f64;
            term_s = -(term_s * x2) / ((2.0 * kk) * (2.0 * kk + 1.0));
            term_c = -(term_c * x2) / ((2.0 * kk - 1.0) * (2.0 * kk));
            sin += term_s;
            cos += term_c;
            if term_s.hi.abs() < 1e-34 && term_c.hi.abs() < 1e-34 {
                break;
            }
        }
        (sin, cos)
    }

    fn sin_cos(self) -> (Self, Self) {
        // Reduce modulo 2π, then to a quadrant.
        let n = (self / TWO_PI).hi.round();
        let r = self - TWO_PI * n;
        let q = (r / HALF_PI).hi.round();
        let t = r - HALF_PI * q;
        let (s, c) = Self::sin_cos_reduced(t);
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::new(x, 0.0)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        Self::renorm(p, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * q1;
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * q2;
        let q3 = r.hi / rhs.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self::new(q1, q2) + Self::from(q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.hi, -self.lo)
    }
}

impl Add<f64> for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        self + Self::from(rhs)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        self - Self::from(rhs)
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        let (p, e) = two_prod(self.hi, rhs);
        Self::renorm(p, e + self.lo * rhs)
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self / Self::from(rhs)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Scalar for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        Self::from(x)
    }

    fn value(&self) -> f64 {
        self.to_f64()
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from(self.hi.sqrt());
        }
        // One Newton step on the double estimate doubles the precision.
        let x = self.hi.sqrt();
        let xd = Self::from(x);
        let r = self - xd * xd;
        xd + r / (x * 2.0)
    }

    fn exp(self) -> Self {
        // exp(x) = 2^k · exp(r)^(2^10), |r| small.
        let k = (self.hi / LN_2.hi).round();
        let r = (self - LN_2 * k).ldexp(-10);
        let mut sum = Self::one();
        let mut term = Self::one();
        for i in 1..25 {
            term = term * r / (i as f64);
            sum += term;
            if term.abs().hi < 1e-34 {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    fn ln(self) -> Self {
        // Newton on exp(y) = x from the double estimate.
        let mut y = Self::from(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - 1.0;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beyond_double_precision() {
        let third = DoubleDouble::from(1.0) / DoubleDouble::from(3.0);
        let back = third * 3.0 - 1.0;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn pythagorean_identity_to_extended_precision() {
        for &x in &[0.1, 0.7, 2.3, -4.1, 12.0] {
            let d = DoubleDouble::from(x);
            let s = d.sin();
            let c = d.cos();
            let err = s * s + c * c - 1.0;
            assert!(err.to_f64().abs() < 1e-30, "x={x}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn sqrt_exp_ln() {
        let two = DoubleDouble::from(2.0);
        let r = two.sqrt();
        assert!((r * r - 2.0).to_f64().abs() < 1e-30);
        let e = DoubleDouble::from(1.5).exp();
        assert!((e.to_f64() - 1.5f64.exp()).abs() < 1e-14);
        let l = e.ln();
        assert!((l - 1.5).to_f64().abs() < 1e-27);
    }
}
