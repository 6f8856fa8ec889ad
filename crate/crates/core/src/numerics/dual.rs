//! Forward-mode dual numbers.
//!
//! Every model in the crate is written once against the [`Scalar`] trait and
//! then evaluated with `f64` for values, [`Dual<f64>`] for first derivatives
//! and `Dual<Dual<f64>>` for second derivatives. A `Dual` carries a single
//! tangent direction; gradients and Jacobians are assembled one seeded
//! direction at a time, which is cheap at the dimensions used here.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Real-like number type that models are generic over.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(x: f64) -> Self;

    /// Primal value, stripping every tangent layer.
    fn value(&self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Self::one() / self.powi(-n);
        }
        let mut acc = Self::one();
        for _ in 0..n {
            acc *= self;
        }
        acc
    }

    fn recip(self) -> Self {
        Self::one() / self
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Dual number `re + eps·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Self { re, eps }
    }

    /// Independent variable: unit tangent.
    pub fn variable(re: S) -> Self {
        Self { re, eps: S::one() }
    }

    pub fn constant(re: S) -> Self {
        Self { re, eps: S::zero() }
    }

    /// Lift a point and a tangent direction into dual numbers.
    pub fn seed(x: &[S], direction: &[S]) -> Vec<Self> {
        assert_eq!(x.len(), direction.len(), "seed direction length mismatch");
        x.iter()
            .zip(direction)
            .map(|(&re, &eps)| Self { re, eps })
            .collect()
    }

    /// Lift a point with the tangent set to the `k`-th unit vector.
    pub fn seed_axis(x: &[S], k: usize) -> Vec<Self> {
        x.iter()
            .enumerate()
            .map(|(i, &re)| Self {
                re,
                eps: if i == k { S::one() } else { S::zero() },
            })
            .collect()
    }

    pub fn lift(x: &[S]) -> Vec<Self> {
        x.iter().map(|&re| Self::constant(re)).collect()
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.re * rhs.re, self.eps * rhs.re + self.re * rhs.eps)
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.re.recip();
        let re = self.re * inv;
        Self::new(re, (self.eps - re * rhs.eps) * inv)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<S: Scalar> Add<f64> for Dual<S> {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        Self::new(self.re + rhs, self.eps)
    }
}

impl<S: Scalar> Sub<f64> for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        Self::new(self.re - rhs, self.eps)
    }
}

impl<S: Scalar> Mul<f64> for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.re * rhs, self.eps * rhs)
    }
}

impl<S: Scalar> Div<f64> for Dual<S> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        Self::new(self.re / rhs, self.eps / rhs)
    }
}

impl<S: Scalar> AddAssign for Dual<S> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<S: Scalar> SubAssign for Dual<S> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<S: Scalar> MulAssign for Dual<S> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn from_f64(x: f64) -> Self {
        Self::constant(S::from_f64(x))
    }

    fn value(&self) -> f64 {
        self.re.value()
    }

    fn sin(self) -> Self {
        Self::new(self.re.sin(), self.eps * self.re.cos())
    }

    fn cos(self) -> Self {
        Self::new(self.re.cos(), -(self.eps * self.re.sin()))
    }

    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        Self::new(r, self.eps / (r * 2.0))
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        Self::new(e, self.eps * e)
    }

    fn ln(self) -> Self {
        Self::new(self.re.ln(), self.eps / self.re)
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let lower = self.re.powi(n - 1);
        Self::new(lower * self.re, self.eps * lower * (n as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Dual::variable(3.0);
        let y = x * x * x;
        assert_eq!(y.re, 27.0);
        assert_eq!(y.eps, 27.0);
    }

    #[test]
    fn quotient_and_transcendentals() {
        let x = Dual::variable(0.7_f64);
        let y = x.sin() / x;
        let expected = (0.7_f64.cos() * 0.7 - 0.7_f64.sin()) / 0.49;
        assert!((y.eps - expected).abs() < 1e-15);

        let z = x.exp().ln();
        assert!((z.re - 0.7).abs() < 1e-15);
        assert!((z.eps - 1.0).abs() < 1e-15);

        let w = (x * x).sqrt();
        assert!((w.eps - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nested_duals_give_second_derivative() {
        // d²/dx² sin(x) = -sin(x)
        let x0 = 0.4_f64;
        let inner = Dual::variable(x0);
        let x = Dual::new(inner, Dual::constant(1.0));
        let y = x.sin();
        assert!((y.eps.eps + x0.sin()).abs() < 1e-15);
        assert!((y.re.eps - x0.cos()).abs() < 1e-15);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Dual::variable(1.3_f64);
        let a = x.powi(4);
        let b = x * x * x * x;
        assert!((a.re - b.re).abs() < 1e-14);
        assert!((a.eps - b.eps).abs() < 1e-14);
        let c = x.powi(-2);
        assert!((c.eps + 2.0 / 1.3_f64.powi(3)).abs() < 1e-14);
    }
}
