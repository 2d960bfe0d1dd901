//! Sparse real polynomials in a fixed number of variables.
//!
//! `Poly<3>` is used for densities and Hamiltonians in `(x, y, λ)` and
//! `Poly<2>` for base maps in `(h, f)`. Terms are kept merged and sorted, so
//! equal polynomials compare equal and evaluation order is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Clone, PartialEq, Default)]
pub struct Poly<const N: usize> {
    terms: Vec<([u32; N], f64)>,
}

pub type Poly3 = Poly<3>;
pub type Poly2 = Poly<2>;

impl<const N: usize> fmt::Debug for Poly<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, p) in e.iter().enumerate() {
                if *p > 0 {
                    write!(f, "·v{v}^{p}")?;
                }
            }
        }
        Ok(())
    }
}

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms([([0; N], c)])
    }

    /// The coordinate function `v_i`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; N];
        e[i] = 1;
        Self::from_terms([(e, 1.0)])
    }

    pub fn monomial(c: f64, e: [u32; N]) -> Self {
        Self::from_terms([(e, c)])
    }

    /// Sums like terms and drops exact zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; N], f64)>) -> Self {
        let mut map: BTreeMap<[u32; N], f64> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert(0.0) += c;
        }
        Self {
            terms: map.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        }
    }

    pub fn terms(&self) -> &[([u32; N], f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: [u32; N]) -> f64 {
        self.terms
            .iter()
            .find(|(t, _)| *t == e)
            .map_or(0.0, |(_, c)| *c)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0)
    }

    pub fn eval(&self, p: [f64; N]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(p.iter())
                    .fold(*c, |acc, (k, x)| acc * x.powi(*k as i32))
            })
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c * s)))
    }

    /// `∂/∂v_var`.
    pub fn deriv(&self, var: usize) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
            let mut e2 = *e;
            e2[var] -= 1;
            (e2, c * e[var] as f64)
        }))
    }

    /// Antiderivative in `v_var` vanishing on `v_var = 0`.
    pub fn antideriv(&self, var: usize) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| {
            let mut e2 = *e;
            e2[var] += 1;
            (e2, c / e2[var] as f64)
        }))
    }

    /// Substitutes `v_var = value`.
    pub fn fix(&self, var: usize, value: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| {
            let mut e2 = *e;
            e2[var] = 0;
            (e2, c * value.powi(e[var] as i32))
        }))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// `self(q_0, …, q_{N−1})` with each `q_i` a polynomial in `M` variables.
    pub fn compose<const M: usize>(&self, q: &[Poly<M>; N]) -> Poly<M> {
        let mut cache: Vec<Vec<Poly<M>>> = q.iter().map(|p| vec![Poly::constant(1.0), p.clone()]).collect();
        let mut out = Poly::<M>::zero();
        for (e, c) in &self.terms {
            let mut t = Poly::<M>::constant(*c);
            for (i, k) in e.iter().enumerate() {
                let k = *k as usize;
                while cache[i].len() <= k {
                    let next = &cache[i][cache[i].len() - 1] * &q[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][k];
            }
            out = &out + &t;
        }
        out
    }

    /// Gradient evaluated at `p`.
    pub fn gradient(&self, p: [f64; N]) -> [f64; N] {
        std::array::from_fn(|i| self.deriv(i).eval(p))
    }

    /// Hessian evaluated at `p`.
    pub fn hessian(&self, p: [f64; N]) -> [[f64; N]; N] {
        std::array::from_fn(|i| {
            let di = self.deriv(i);
            std::array::from_fn(|j| di.deriv(j).eval(p))
        })
    }

    /// Third-derivative tensor evaluated at `p`.
    pub fn third(&self, p: [f64; N]) -> [[[f64; N]; N]; N] {
        std::array::from_fn(|i| {
            let di = self.deriv(i);
            std::array::from_fn(|j| {
                let dij = di.deriv(j);
                std::array::from_fn(|k| dij.deriv(k).eval(p))
            })
        })
    }
}

impl<const N: usize> Add for &Poly<N> {
    type Output = Poly<N>;
    fn add(self, rhs: Self) -> Poly<N> {
        Poly::from_terms(self.terms.iter().chain(rhs.terms.iter()).copied())
    }
}

impl<const N: usize> Sub for &Poly<N> {
    type Output = Poly<N>;
    fn sub(self, rhs: Self) -> Poly<N> {
        Poly::from_terms(
            self.terms
                .iter()
                .copied()
                .chain(rhs.terms.iter().map(|(e, c)| (*e, -c))),
        )
    }
}

impl<const N: usize> Mul for &Poly<N> {
    type Output = Poly<N>;
    fn mul(self, rhs: Self) -> Poly<N> {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.push((std::array::from_fn(|i| e1[i] + e2[i]), c1 * c2));
            }
        }
        Poly::from_terms(out)
    }
}

impl<const N: usize> Neg for &Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        self.scale(-1.0)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    c: f64,
    e: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

impl<const N: usize> Poly<N> {
    fn from_repr(r: PolyRepr) -> Result<Self> {
        let mut terms = Vec::with_capacity(r.terms.len());
        for t in r.terms {
            if t.e.len() > N {
                return Err(Error::InvalidInput(format!(
                    "exponent vector {:?} has more than {N} entries",
                    t.e
                )));
            }
            if !t.c.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite coefficient {}", t.c)));
            }
            let mut e = [0; N];
            e[..t.e.len()].copy_from_slice(&t.e);
            terms.push((e, t.c));
        }
        Ok(Self::from_terms(terms))
    }
}

impl<const N: usize> Serialize for Poly<N> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr { c: *c, e: e.to_vec() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, const N: usize> Deserialize<'de> for Poly<N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        Self::from_repr(repr).map_err(serde::de::Error::custom)
    }
}
