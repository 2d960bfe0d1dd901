//! Truncated power series in one variable and the operator `φ_r`.
//!
//! A [`TruncatedSeries`] of order `K` stores the coefficients of `H^0..=H^K`;
//! everything beyond `H^K` is unknown and dropped. Binary operations work at
//! the smaller of the two orders. Coefficients are generic over [`Coeff`] so
//! the same code runs in `f64` and in exact [`BigRational`] arithmetic.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficient field of a series.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(r: Rational64) -> Self;
}

impl Coeff for f64 {
    fn from_ratio(r: Rational64) -> Self {
        *r.numer() as f64 / *r.denom() as f64
    }
}

impl Coeff for BigRational {
    fn from_ratio(r: Rational64) -> Self {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }
}

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T: Coeff = f64> {
    coeffs: Vec<T>,
}

impl From<Vec<f64>> for TruncatedSeries<f64> {
    fn from(v: Vec<f64>) -> Self {
        if v.is_empty() {
            Self::zero(0)
        } else {
            Self { coeffs: v }
        }
    }
}

impl From<TruncatedSeries<f64>> for Vec<f64> {
    fn from(s: TruncatedSeries<f64>) -> Self {
        s.coeffs
    }
}

impl Serialize for TruncatedSeries<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vec::<f64>::deserialize(d).map(Self::from)
    }
}

impl<T: Coeff> TruncatedSeries<T> {
    /// Series of order `order`; `coeffs` is zero-padded or cut to `order + 1` terms.
    pub fn new(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        Self { coeffs }
    }

    /// Series whose order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// `c·H^k` truncated at `order`.
    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Same series at a different order (padding with zeros or dropping terms).
    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs.clone(), order)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn eval(&self, h: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, a| acc * h.clone() + a.clone())
    }

    /// `d/dH`; the result is known to one order less.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..self.coeffs.len())
            .map(|k| self.coeffs[k].clone() * T::from_ratio(Rational64::from_integer(k as i64)))
            .collect();
        Self { coeffs }
    }

    /// `H·self`; the order grows by one because the new constant term is exact.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(T::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// `φ_r(A) = H A'(H) + r A(H)`: coefficient `k` becomes `(k + r) A_k`.
    pub fn phi_r_apply(&self, r: Rational64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a.clone() * T::from_ratio(r + Rational64::from_integer(k as i64)))
            .collect();
        Self { coeffs }
    }

    /// Inverse of [`phi_r_apply`](Self::phi_r_apply); defined only for `r ∉ ℤ`.
    pub fn phi_r_invert(&self, r: Rational64) -> Result<Self> {
        if r.is_integer() {
            return Err(Error::InvalidInput(format!(
                "phi_r is not invertible for integral r = {r}"
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a.clone() / T::from_ratio(r + Rational64::from_integer(k as i64)))
            .collect();
        Ok(Self { coeffs })
    }

    /// `self ∘ inner`, requiring `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeff(0).is_zero() {
            return Err(Error::InvalidInput(
                "inner series of a composition must vanish at 0".into(),
            ));
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Self::zero(order);
        for a in self.coeffs[..=order].iter().rev() {
            acc = &(&acc * &inner) + &Self::constant(a.clone(), order);
        }
        Ok(acc)
    }

    fn binary(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Self {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|k| f(self.coeffs[k].clone(), rhs.coeffs[k].clone()))
            .collect();
        Self { coeffs }
    }
}

impl TruncatedSeries<BigRational> {
    pub fn to_f64(&self) -> TruncatedSeries<f64> {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.to_f64().unwrap_or(f64::NAN))
                .collect(),
        }
    }
}

impl TruncatedSeries<f64> {
    /// Drops trailing zero coefficients (keeping at least one).
    pub fn trimmed(&self) -> Vec<f64> {
        let mut v = self.coeffs.clone();
        while v.len() > 1 && v.last() == Some(&0.0) {
            v.pop();
        }
        v
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other)
            .coeffs
            .iter()
            .fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `A^p` for `A(0) > 0`, by the Miller recurrence
    /// `n a₀ b_n = Σ_{k=1..n} (p k − n + k) a_k b_{n−k}`.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let a = &self.coeffs;
        if a[0] <= 0.0 {
            return Err(Error::InvalidInput(
                "real power of a series needs a positive constant term".into(),
            ));
        }
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].powf(p);
        for n in 1..a.len() {
            let s: f64 = (1..=n)
                .map(|k| (p * k as f64 - (n - k) as f64) * a[k] * b[n - k])
                .sum();
            b[n] = s / (n as f64 * a[0]);
        }
        Ok(Self { coeffs: b })
    }

    pub fn recip(&self) -> Result<Self> {
        if self.coeffs[0] == 0.0 {
            return Err(Error::InvalidInput("series is not invertible".into()));
        }
        let a = &self.coeffs;
        let mut b = vec![0.0; a.len()];
        b[0] = 1.0 / a[0];
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|k| a[k] * b[n - k]).sum();
            b[n] = -s / a[0];
        }
        Ok(Self { coeffs: b })
    }

    /// `exp(A)`, from `B' = A' B`.
    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].exp();
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|k| k as f64 * a[k] * b[n - k]).sum();
            b[n] = s / n as f64;
        }
        Self { coeffs: b }
    }

    /// `ln(A)` for `A(0) > 0`, from `A B' = A'`.
    pub fn ln(&self) -> Result<Self> {
        let a = &self.coeffs;
        if a[0] <= 0.0 {
            return Err(Error::InvalidInput(
                "logarithm of a series needs a positive constant term".into(),
            ));
        }
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].ln();
        for n in 1..a.len() {
            let s: f64 = (1..n).map(|k| k as f64 * b[k] * a[n - k]).sum();
            b[n] = (n as f64 * a[n] - s) / (n as f64 * a[0]);
        }
        Ok(Self { coeffs: b })
    }

    /// Compositional inverse of `h` with `h(0) = 0`, `h'(0) ≠ 0`.
    pub fn revert(&self) -> Result<Self> {
        let h1 = self.coeff(1);
        if self.coeffs[0] != 0.0 || h1 == 0.0 || self.order() == 0 {
            return Err(Error::InvalidInput(
                "reversion needs h(0) = 0 and h'(0) != 0".into(),
            ));
        }
        let order = self.order();
        // h(H) = H·q(H); solve H = u / q(H) by fixed-point iteration, one
        // correct order per sweep.
        let q = Self::from_coeffs(self.coeffs[1..].to_vec()).truncate(order);
        let u = Self::monomial(1.0, 1, order);
        let mut v = u.scale(&(1.0 / h1));
        for _ in 0..=order {
            v = &u * &q.compose(&v)?.recip()?;
        }
        Ok(v)
    }
}

impl<T: Coeff> Add for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn add(self, rhs: Self) -> TruncatedSeries<T> {
        self.binary(rhs, |a, b| a + b)
    }
}

impl<T: Coeff> Sub for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn sub(self, rhs: Self) -> TruncatedSeries<T> {
        self.binary(rhs, |a, b| a - b)
    }
}

impl<T: Coeff> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn mul(self, rhs: Self) -> TruncatedSeries<T> {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![T::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=order - i].iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        TruncatedSeries { coeffs }
    }
}

impl<T: Coeff> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> TruncatedSeries<T> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().cloned().map(Neg::neg).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Coeff> $tr for TruncatedSeries<T> {
            type Output = TruncatedSeries<T>;
            fn $m(self, rhs: Self) -> TruncatedSeries<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Which arithmetic to apply in [`series_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

pub fn series_arith<T: Coeff>(
    lhs: &TruncatedSeries<T>,
    rhs: &TruncatedSeries<T>,
    op: SeriesOp,
) -> TruncatedSeries<T> {
    match op {
        SeriesOp::Add => lhs + rhs,
        SeriesOp::Sub => lhs - rhs,
        SeriesOp::Mul => lhs * rhs,
    }
}

/// `a(H) H^{-1/6} + b(H) H^{1/6} + c(H)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxTriple {
    pub a: TruncatedSeries,
    pub b: TruncatedSeries,
    pub c: TruncatedSeries,
}

impl PuiseuxTriple {
    pub fn eval(&self, h: f64) -> f64 {
        let s = h.powf(1.0 / 6.0);
        self.a.eval(h) / s + self.b.eval(h) * s + self.c.eval(h)
    }

    /// Coefficients in basis order `a_0..a_K, b_0..b_K, c_0..c_K`.
    pub fn flatten(&self) -> Vec<f64> {
        [&self.a, &self.b, &self.c]
            .iter()
            .flat_map(|s| s.coeffs().iter().copied())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(v.to_vec())
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&s(&[1.0, 1.0]) + &s(&[1.0, -1.0]), s(&[2.0, 0.0]));
        let p = &s(&[1.0, 1.0, 0.0]) * &s(&[1.0, -1.0, 0.0]);
        assert_eq!(p, s(&[1.0, 0.0, -1.0]));
        let hh = &s(&[0.0, 1.0]) * &s(&[0.0, 1.0]);
        assert_eq!(hh, s(&[0.0, 0.0]));
        let mixed = &s(&[1.0, 2.0, 3.0]) + &s(&[1.0]);
        assert_eq!(mixed.order(), 0);
    }

    #[test]
    fn phi_r_examples() {
        let r56 = Rational64::new(5, 6);
        let r76 = Rational64::new(7, 6);
        assert_eq!(s(&[1.0]).phi_r_apply(r56), s(&[5.0 / 6.0]));
        assert_eq!(s(&[0.0, 1.0]).phi_r_apply(r56), s(&[0.0, 11.0 / 6.0]));
        assert_eq!(s(&[1.0, 1.0]).phi_r_apply(r76), s(&[7.0 / 6.0, 13.0 / 6.0]));
        let c1 = -1.49;
        let inv = s(&[c1]).phi_r_invert(r76).unwrap();
        assert!((inv.coeff(0) - 6.0 / 7.0 * c1).abs() < 1e-15);
        assert!(s(&[1.0]).phi_r_invert(Rational64::from_integer(0)).is_err());
        assert!(s(&[1.0]).phi_r_invert(Rational64::from_integer(-3)).is_err());
    }

    #[test]
    fn exact_roundtrip() {
        let a: TruncatedSeries<BigRational> = TruncatedSeries::from_coeffs(
            (1..6)
                .map(|k| BigRational::from_ratio(Rational64::new(k * 7 - 11, k + 2)))
                .collect(),
        );
        for r in [Rational64::new(5, 6), Rational64::new(7, 6), Rational64::new(-13, 6)] {
            let back = a.phi_r_apply(r).phi_r_invert(r).unwrap();
            assert_eq!(back, a);
        }
    }

    #[test]
    fn power_log_exp_agree() {
        let a = s(&[2.0, 0.5, -0.25, 0.125, 1.0]);
        let p = 6.0 / 5.0;
        let direct = a.powf(p).unwrap();
        let via = a.ln().unwrap().scale(&p).exp();
        assert!(direct.max_abs_diff(&via) < 1e-13);
        let inv = a.powf(-1.0).unwrap();
        assert!(inv.max_abs_diff(&a.recip().unwrap()) < 1e-14);
        let one = &a * &inv;
        assert!(one.max_abs_diff(&s(&[1.0, 0.0, 0.0, 0.0, 0.0])) < 1e-14);
    }

    #[test]
    fn compose_and_revert() {
        let h = s(&[0.0, 2.0, 1.0, -0.5, 0.3]);
        let inv = h.revert().unwrap();
        let id = h.compose(&inv).unwrap();
        assert!(id.max_abs_diff(&s(&[0.0, 1.0, 0.0, 0.0, 0.0])) < 1e-13);
        let id2 = inv.compose(&h).unwrap();
        assert!(id2.max_abs_diff(&s(&[0.0, 1.0, 0.0, 0.0, 0.0])) < 1e-13);
        assert!(s(&[1.0, 1.0]).compose(&s(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn json_is_plain_array() {
        let a = s(&[1.0, 0.5]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1.0,0.5]");
        let b: TruncatedSeries = serde_json::from_str("[0,0.4]").unwrap();
        assert_eq!(b, s(&[0.0, 0.4]));
    }
}
