//! Gamma, the Gauss hypergeometric function on the real parameter island used
//! by the basic periods, and the closed forms of those periods.

use std::f64::consts::PI;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Γ(x) by the Lanczos approximation (g = 7, n = 9) with reflection for x < 1/2.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("gamma of non-finite {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        let sum = LANCZOS[1..]
            .iter()
            .enumerate()
            .fold(LANCZOS[0], |s, (i, c)| s + c / (x + i as f64 + 1.0));
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * sum
    }
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

const SERIES_MAX_TERMS: usize = 100_000;

fn hyp_series(p: f64, q: f64, r: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let n = n as f64;
        term *= (p + n) * (q + n) / ((r + n) * (n + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence(format!(
        "2F1({p}, {q}; {r}; {z}) series did not converge"
    )))
}

/// Gauss hypergeometric function `F(p, q; r; z)` for real `z < 1`.
///
/// Direct summation for `|z| ≤ 1/2`, the Pfaff transformation for
/// `z ∈ [−1, −1/2) ∪ (1/2, 1)`, and the `z → 1/z` connection formula
/// for `z < −1`, which needs `p − q ∉ ℤ`.
pub fn hyp2f1(p: f64, q: f64, r: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(r) {
        return Err(Error::Unsupported(format!(
            "2F1 with non-positive integral r = {r}"
        )));
    }
    if !z.is_finite() || z >= 1.0 {
        return Err(Error::Unsupported(format!("2F1 argument z = {z} (need z < 1)")));
    }
    if p == 0.0 || q == 0.0 || z == 0.0 {
        return Ok(1.0);
    }
    if z.abs() <= 0.5 {
        hyp_series(p, q, r, z)
    } else if z >= -1.0 {
        // Pfaff: F(p,q;r;z) = (1-z)^{-q} F(q, r-p; r; z/(z-1)).
        let w = z / (z - 1.0);
        Ok((1.0 - z).powf(-q) * hyp2f1(q, r - p, r, w)?)
    } else {
        let d = p - q;
        if d == d.round() {
            return Err(Error::Unsupported(format!(
                "2F1 connection formula needs p - q non-integral, got {d}"
            )));
        }
        let gr = gamma(r)?;
        let c1 = gr * gamma(q - p)? * rgamma(r - p) * rgamma(q);
        let c2 = gr * gamma(p - q)? * rgamma(r - q) * rgamma(p);
        let w = 1.0 / z;
        let mut v = 0.0;
        if c1 != 0.0 {
            v += c1 * (-z).powf(-p) * hyp2f1(p, p - r + 1.0, p - q + 1.0, w)?;
        }
        if c2 != 0.0 {
            v += c2 * (-z).powf(-q) * hyp2f1(q, q - r + 1.0, q - p + 1.0, w)?;
        }
        Ok(v)
    }
}

/// The two constants of the leading Puiseux terms of the basic periods.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub c0: f64,
    pub c1: f64,
}

/// `C₀ = (√π/3) Γ(1/6)/Γ(2/3)` and `C₁ = (√π/3) Γ(−1/6)/Γ(1/3)`.
pub fn constants() -> Constants {
    let k = PI.sqrt() / 3.0;
    Constants {
        c0: k * gamma_unchecked(1.0 / 6.0) / gamma_unchecked(2.0 / 3.0),
        c1: k * gamma_unchecked(-1.0 / 6.0) / gamma_unchecked(1.0 / 3.0),
    }
}

/// `J_j(H) = (2/3)∫₀¹ (H + x²)^{(j−2)/3} dx = (2/3) H^{(j−2)/3} F((2−j)/3, 1/2; 3/2; −1/H)`.
pub fn reference_jj(h: f64, j: u32) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Domain(format!("J_j needs H > 0, got {h}")));
    }
    if j > 1 {
        return Err(Error::InvalidInput(format!("J_j defined for j in {{0,1}}, got {j}")));
    }
    let e = (j as f64 - 2.0) / 3.0;
    Ok(2.0 / 3.0 * h.powf(e) * hyp2f1(-e, 0.5, 1.5, -1.0 / h)?)
}
