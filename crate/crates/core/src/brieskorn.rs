//! Exact reduction of a polynomial density on `H = y³ − x²` to the form
//! `f dx∧dy ≡ α(H) dx∧dy + β(H) y dx∧dy` modulo forms `dH ∧ dη`.
//!
//! Since `H·(dH∧dη) = dH∧d(Hη)`, the relations may be multiplied by any
//! function of `H`. With `dH = 3y² dy − 2x dx` they are:
//!
//! * R1: `x^a y^b = x^{a−2} y^{b+3} − H x^{a−2} y^b` for `a ≥ 2` (from `x² = y³ − H`);
//! * R2: `x y^j ≡ 0`, from `dH∧d(y^{j+1}) = −2(j+1) x y^j dx∧dy`;
//! * R3: `y² ≡ 0`, from `dH∧dx = −3y² dx∧dy`;
//! * R4: `y^j ≡ 2(j−2)/(2j−1) · H y^{j−3}` for `j ≥ 3`, from
//!   `dH∧d(x y^{j−2}) = −[(2j−1) y^j − 2(j−2) H y^{j−3}] dx∧dy` after R1.
//!
//! R1 lowers the x-degree and R4 the y-degree, so the recursion terminates.
//! Arithmetic is exact; the density's binary coefficients are converted to
//! rationals without rounding.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::Density;
use crate::series::TruncatedSeries;
use crate::{Error, Result};

/// `(α, β)` with exact rational coefficients, lowest power first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExactPair {
    pub alpha: Vec<BigRational>,
    pub beta: Vec<BigRational>,
}

/// `(α, β)` as floating series.
#[derive(Clone, Debug, PartialEq)]
pub struct BrieskornPair {
    pub alpha: TruncatedSeries,
    pub beta: TruncatedSeries,
}

#[derive(Serialize, Deserialize)]
struct PairRepr {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl Serialize for BrieskornPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairRepr { alpha: self.alpha.trimmed(), beta: self.beta.trimmed() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BrieskornPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PairRepr::deserialize(d)?;
        if r.alpha.is_empty() || r.beta.is_empty() {
            return Err(serde::de::Error::custom("alpha and beta need at least one coefficient"));
        }
        Ok(Self {
            alpha: TruncatedSeries::from_coeffs(r.alpha),
            beta: TruncatedSeries::from_coeffs(r.beta),
        })
    }
}

impl BrieskornPair {
    /// Both series at a common order.
    pub fn truncate(&self, order: usize) -> Self {
        Self { alpha: self.alpha.truncate(order), beta: self.beta.truncate(order) }
    }
}

fn to_series(c: &[BigRational]) -> TruncatedSeries {
    let mut v: Vec<f64> = c.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
    if v.is_empty() {
        v.push(0.0);
    }
    TruncatedSeries::from_coeffs(v)
}

impl ExactPair {
    pub fn to_f64(&self) -> BrieskornPair {
        BrieskornPair { alpha: to_series(&self.alpha), beta: to_series(&self.beta) }
    }

    fn trim(mut self) -> Self {
        for v in [&mut self.alpha, &mut self.beta] {
            while v.last().is_some_and(Zero::is_zero) {
                v.pop();
            }
        }
        self
    }

    fn axpy(&mut self, c: &BigRational, shift: usize, other: &ExactPair) {
        for (dst, src) in [(&mut self.alpha, &other.alpha), (&mut self.beta, &other.beta)] {
            if dst.len() < src.len() + shift {
                dst.resize(src.len() + shift, BigRational::zero());
            }
            for (k, s) in src.iter().enumerate() {
                dst[k + shift] += c * s;
            }
        }
    }
}

/// Reduction of single monomials, memoized across calls on one instance.
#[derive(Default)]
pub struct Reducer {
    memo: HashMap<(u32, u32), ExactPair>,
}

impl Reducer {
    pub fn new() -> Self {
        Self::default()
    }

    /// `x^a y^b ≡ α(H) + β(H) y`.
    pub fn monomial(&mut self, a: u32, b: u32) -> ExactPair {
        if let Some(p) = self.memo.get(&(a, b)) {
            return p.clone();
        }
        let one = BigRational::from_integer(1.into());
        let mut out = ExactPair::default();
        if a >= 2 {
            let up = self.monomial(a - 2, b + 3);
            let down = self.monomial(a - 2, b);
            out.axpy(&one, 0, &up);
            out.axpy(&-one, 1, &down);
        } else if a == 0 {
            match b {
                0 => out.alpha.push(one),
                1 => out.beta.push(one),
                2 => {}
                _ => {
                    let c = BigRational::new((2 * (b as i64 - 2)).into(), (2 * b as i64 - 1).into());
                    let lower = self.monomial(0, b - 3);
                    out.axpy(&c, 1, &lower);
                }
            }
        }
        let out = out.trim();
        self.memo.insert((a, b), out.clone());
        out
    }

    /// Exact pair of the λ = 0 slice of a density.
    pub fn reduce_exact(&mut self, f: &Density) -> Result<ExactPair> {
        let mut out = ExactPair::default();
        for (e, c) in f.poly().terms() {
            if e[2] != 0 {
                continue;
            }
            let q = BigRational::from_float(*c)
                .ok_or_else(|| Error::InvalidInput(format!("non-finite density coefficient {c}")))?;
            let m = self.monomial(e[0], e[1]);
            out.axpy(&q, 0, &m);
        }
        Ok(out.trim())
    }
}

/// `(α, β)` of the λ = 0 slice of `f`, exact internally.
pub fn reduce_exact(f: &Density) -> Result<ExactPair> {
    Reducer::new().reduce_exact(f)
}

pub fn reduce(f: &Density) -> Result<BrieskornPair> {
    Ok(reduce_exact(f)?.to_f64())
}

/// Elementwise [`reduce`] sharing one monomial table.
pub fn reduce_batch(fs: &[Density]) -> Result<Vec<BrieskornPair>> {
    let mut r = Reducer::new();
    fs.iter().map(|f| Ok(r.reduce_exact(f)?.to_f64())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(f: &[(f64, [u32; 3])]) -> (Vec<f64>, Vec<f64>) {
        let p = reduce(&Density::from_terms(f)).unwrap();
        (p.alpha.trimmed(), p.beta.trimmed())
    }

    #[test]
    fn basic_monomials() {
        assert_eq!(pair(&[(1.0, [0, 0, 0])]), (vec![1.0], vec![0.0]));
        assert_eq!(pair(&[(1.0, [0, 1, 0])]), (vec![0.0], vec![1.0]));
        assert_eq!(pair(&[(1.0, [0, 3, 0])]), (vec![0.0, 0.4], vec![0.0]));
        assert_eq!(pair(&[(1.0, [0, 2, 0])]), (vec![0.0], vec![0.0]));
        assert_eq!(pair(&[(1.0, [2, 0, 0])]), (vec![0.0, -0.6], vec![0.0]));
        assert_eq!(pair(&[(1.0, [3, 4, 0])]), (vec![0.0], vec![0.0]));
        // λ-dependent terms do not enter the λ = 0 slice.
        assert_eq!(pair(&[(1.0, [0, 0, 0]), (5.0, [0, 0, 1])]), (vec![1.0], vec![0.0]));
    }

    #[test]
    fn exact_linearity() {
        let f = Density::from_terms(&[(0.5, [0, 4, 0]), (-0.25, [2, 1, 0])]);
        let g = Density::from_terms(&[(3.0, [4, 0, 0]), (1.0, [0, 7, 0])]);
        let sum = reduce_exact(&f.scale(2.0).add(&g.scale(-3.0))).unwrap();
        let mut want = ExactPair::default();
        let two = BigRational::from_integer(2.into());
        let m3 = BigRational::from_integer((-3).into());
        want.axpy(&two, 0, &reduce_exact(&f).unwrap());
        want.axpy(&m3, 0, &reduce_exact(&g).unwrap());
        assert_eq!(sum, want.trim());
    }

    #[test]
    fn batch_and_json() {
        assert!(reduce_batch(&[]).unwrap().is_empty());
        let b = reduce_batch(&[Density::constant(1.0), Density::from_terms(&[(1.0, [0, 1, 0])])]).unwrap();
        assert_eq!(serde_json::to_string(&b[0]).unwrap(), r#"{"alpha":[1.0],"beta":[0.0]}"#);
        assert_eq!(b[1].beta.trimmed(), vec![1.0]);
        let back: BrieskornPair = serde_json::from_str(r#"{"alpha":[0,0.4],"beta":[0]}"#).unwrap();
        assert_eq!(back.alpha.coeff(1), 0.4);
    }
}
