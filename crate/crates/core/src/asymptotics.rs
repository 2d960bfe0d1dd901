//! Asymptotic coefficients of periods: Puiseux fits near the cusp value,
//! logarithmic coefficients near saddle values, and the node model
//! `H = xy` with its complex period.
//!
//! Two independent routes to the Puiseux coefficients of the one-degree model
//! are provided. [`fit_puiseux`] fits real samples of Π in the full basis
//! `{H^{k−1/6}, H^{k+1/6}, H^k}`; this is limited by the close spacing of the
//! exponents. [`fit_puiseux_jump`] instead fits the discontinuity of Π across
//! the negative axis, `Π(−r + i0) − Π(−r − i0) = −i[a(−r) r^{−1/6} − b(−r) r^{1/6}]`,
//! in which the analytic part `c` cancels and the exponents are `1/3` apart.

use std::f64::consts::{LN_2, PI};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gk::{quad, Tolerance};
use crate::model::{CriticalKind, Density, FibrationModel, ModelKind};
use crate::poly::Poly3;
use crate::quadrature::{loop_period, passage_time};
use crate::series::{PuiseuxTriple, TruncatedSeries};
use crate::{Error, Result};

/// Condition number above which a fit is flagged as unreliable.
pub const COND_LIMIT: f64 = 1e12;

/// Result of a linear least-squares fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Root-mean-square residual.
    pub residual: f64,
    /// 2-norm condition number of the column-scaled design matrix.
    pub condition: f64,
    /// True when `condition > COND_LIMIT`.
    pub flagged: bool,
    /// Abscissae of the samples.
    pub grid: Vec<f64>,
}

/// A Puiseux triple fitted from samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxFit {
    pub triple: PuiseuxTriple,
    pub report: FitReport,
}

// Least squares by Householder QR on a column-scaled design matrix.
fn least_squares(design: DMatrix<f64>, rhs: &[f64], grid: Vec<f64>) -> Result<(Vec<f64>, FitReport)> {
    let (m, n) = design.shape();
    if m < n {
        return Err(Error::InvalidInput(format!("{m} samples for {n} unknowns")));
    }
    let norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::Degenerate("design matrix has a zero or non-finite column".into()));
    }
    let mut scaled = design.clone();
    for (j, s) in norms.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*s);
    }
    let sv = scaled.clone().singular_values();
    let condition = sv.max() / sv.min();
    let b = DVector::from_column_slice(rhs);
    let qr = scaled.qr();
    let qtb = qr.q().transpose() * &b;
    let z = qr
        .r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Degenerate("rank-deficient design matrix".into()))?;
    let x: Vec<f64> = z.iter().zip(&norms).map(|(v, s)| v / s).collect();
    let r = &design * DVector::from_column_slice(&x) - b;
    let report = FitReport {
        residual: r.norm() / (m as f64).sqrt(),
        condition,
        flagged: !(condition <= COND_LIMIT),
        grid,
    };
    Ok((x, report))
}

fn check_samples(samples: &[(f64, f64)], need: usize, what: &str) -> Result<()> {
    if samples.len() < need {
        return Err(Error::InvalidInput(format!(
            "{what} needs at least {need} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(h, v)| !(*h > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} needs positive abscissae and finite values")));
    }
    Ok(())
}

/// Fits `Π(H) = a(H) H^{−1/6} + b(H) H^{1/6} + c(H)` with `a, b, c` of degree `k`.
///
/// Needs at least `3(k + 1)` samples spanning four decades of `H`.
pub fn fit_puiseux(samples: &[(f64, f64)], k: usize) -> Result<PuiseuxFit> {
    check_samples(samples, 3 * (k + 1), "Puiseux fit")?;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (h, _)| (lo.min(*h), hi.max(*h)));
    if hi / lo < 1e4 {
        return Err(Error::InvalidInput(format!(
            "Puiseux fit needs samples over 4 decades, got [{lo:e}, {hi:e}]"
        )));
    }
    let n = k + 1;
    let design = DMatrix::from_fn(samples.len(), 3 * n, |i, j| {
        let h = samples[i].0;
        let (family, p) = (j / n, (j % n) as f64);
        match family {
            0 => h.powf(p - 1.0 / 6.0),
            1 => h.powf(p + 1.0 / 6.0),
            _ => h.powf(p),
        }
    });
    let rhs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (x, report) = least_squares(design, &rhs, samples.iter().map(|s| s.0).collect())?;
    let part = |f: usize| TruncatedSeries::from_coeffs(x[f * n..(f + 1) * n].to_vec());
    Ok(PuiseuxFit {
        triple: PuiseuxTriple { a: part(0), b: part(1), c: part(2) },
        report,
    })
}

/// Geometric grid `h_max · ratio^{−m}`, `m = 0..count`.
pub fn geometric_grid(h_max: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|m| h_max * ratio.powi(-(m as i32))).collect()
}

/// Samples Π of a model at the given H values, λ fixed.
pub fn sample_passage(model: &FibrationModel, hs: &[f64], lambda: f64, tol: Tolerance) -> Result<Vec<(f64, f64)>> {
    hs.iter()
        .map(|&h| Ok((h, passage_time(model, h, lambda, tol)?)))
        .collect()
}

/// `f(x, y, 0)` at real `x` and complex `y`.
pub fn eval_complex(p: &Poly3, x: f64, y: Complex64) -> Complex64 {
    p.terms()
        .iter()
        .filter(|(e, _)| e[2] == 0)
        .map(|(e, c)| *c * x.powi(e[0] as i32) * y.powi(e[1] as i32))
        .sum()
}

/// `G(r) = a(−r) r^{−1/6} − b(−r) r^{1/6} = −2 Im Π(−r + i0)` for the
/// one-degree model `y³ − x² = H` with section `|x| = x0`.
///
/// Only the arc `|x| < √r`, where the continued root is `y = (r − x²)^{1/3} e^{iπ/3}`,
/// contributes to the imaginary part.
pub fn one_dof_jump(density: &Density, x0: f64, r: f64, tol: Tolerance) -> Result<f64> {
    let f = density.poly();
    one_dof_jump_with(|x, y| eval_complex(f, x, y), x0, r, tol)
}

/// [`one_dof_jump`] for a density given as a function analytic in `y`,
/// evaluated at real `x` and complex `y`.
pub fn one_dof_jump_with(f: impl Fn(f64, Complex64) -> Complex64, x0: f64, r: f64, tol: Tolerance) -> Result<f64> {
    if !(r > 0.0 && r < x0 * x0) {
        return Err(Error::Domain(format!("jump needs 0 < r < x0² = {}, got {r}", x0 * x0)));
    }
    let w = Complex64::from_polar(1.0, PI / 3.0);
    let w2 = w * w;
    let rs = r.sqrt();
    let r13 = r.cbrt();
    // x = ±√r s, s = 1 − u³: the (1 − s²)^{−2/3} endpoint factor becomes smooth.
    let g = |u: f64| {
        let u3 = u * u * u;
        let s = 1.0 - u3;
        let t = (2.0 - u3).cbrt();
        let y = w * (r13 * u * t);
        let v = f(rs * s, y) + f(-rs * s, y);
        (v / w2).im * 3.0 / (t * t)
    };
    let im = quad(g, 0.0, 1.0, tol)? * rs / (3.0 * r13 * r13);
    Ok(-2.0 * im)
}

/// Equally spaced points `lo..=hi`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count.max(2) - 1) as f64;
    (0..count).map(|i| lo + step * i as f64).collect()
}

/// `f(x, y, 0)` at complex `x` and `y`.
pub fn eval_complex2(p: &Poly3, x: Complex64, y: Complex64) -> Complex64 {
    p.terms()
        .iter()
        .filter(|(e, _)| e[2] == 0)
        .map(|(e, c)| *c * x.powi(e[0] as i32) * y.powi(e[1] as i32))
        .sum()
}

/// Taylor data of the jump: `a`, `b` and the largest coefficient that should vanish.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSeries {
    pub a: TruncatedSeries,
    pub b: TruncatedSeries,
    /// Largest `|c_{3k+2}|`; zero up to rounding for a genuine period.
    pub spurious: f64,
}

/// Coefficients of `a` and `b` through order `k` by Cauchy's formula.
///
/// `Ψ(t) = r^{1/6} G(r)` with `r = t³` equals `a(−t³) − t b(−t³)`, analytic in `t`
/// as long as the density is. `Ψ` is evaluated on `|t| = rho` at `nodes` points
/// through the arc integral
/// `Ψ(t) = i (t²/3) ∫_{−1}^{1} [F(t^{3/2}s, tσω) − F(t^{3/2}s, tσω̄)] ds`,
/// `F = f/y²`, `σ = (1 − s²)^{1/3}`, `ω = e^{iπ/3}`; only `f(x, y) + f(−x, y)`
/// enters, so the branch of `t^{3/2}` is immaterial. The density is called as
/// `f(x, y, r)` with complex arguments on the level `H = −r`.
pub fn jump_taylor(
    f: impl Fn(Complex64, Complex64, Complex64) -> Complex64 + Sync,
    k: usize,
    rho: f64,
    nodes: usize,
    tol: Tolerance,
) -> Result<JumpSeries> {
    let n_coef = 3 * k + 2;
    if nodes <= n_coef {
        return Err(Error::InvalidInput(format!("{nodes} nodes cannot resolve {} coefficients", n_coef + 1)));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("contour radius must be positive, got {rho}")));
    }
    let w = Complex64::from_polar(1.0, PI / 3.0);
    let psi = |t: Complex64| -> Result<Complex64> {
        let r = t * t * t;
        let t32 = t.powf(1.5);
        let g = |u: f64| {
            let u3 = u * u * u;
            let s = 1.0 - u3;
            let tt = (2.0 - u3).cbrt();
            // σ = u (2 − u³)^{1/3} and ds = 3u² du.
            let x = t32 * s;
            let mut acc = Complex64::new(0.0, 0.0);
            for om in [w, w.conj()] {
                let y = t * om * (u * tt);
                let sign = if om == w { 1.0 } else { -1.0 };
                let vals = f(x, y, r) + f(-x, y, r);
                // F = f / y², times 3u² with the σ^{−2} factor's u^{−2} cancelled.
                acc += sign * vals / (t * t * om * om) * 3.0 / (tt * tt);
            }
            acc
        };
        let re = quad(|u| g(u).re, 0.0, 1.0, tol)?;
        let im = quad(|u| g(u).im, 0.0, 1.0, tol)?;
        Ok(Complex64::new(0.0, 1.0) * t * t / 3.0 * Complex64::new(re, im))
    };
    let values = (0..nodes)
        .into_par_iter()
        .map(|j| psi(Complex64::from_polar(rho, 2.0 * PI * j as f64 / nodes as f64)))
        .collect::<Result<Vec<_>>>()?;
    let coef = |n: usize| -> f64 {
        let s: Complex64 = values
            .iter()
            .enumerate()
            .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * n) as f64 / nodes as f64))
            .sum();
        (s / nodes as f64).re / rho.powi(n as i32)
    };
    let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let a = (0..=k).map(|i| sign(i) * coef(3 * i)).collect();
    let b = (0..=k).map(|i| -sign(i) * coef(3 * i + 1)).collect();
    let spurious = (0..=k).map(|i| coef(3 * i + 2).abs()).fold(0.0, f64::max);
    Ok(JumpSeries { a: TruncatedSeries::from_coeffs(a), b: TruncatedSeries::from_coeffs(b), spurious })
}

/// Fits `a, b` of degree `k` from samples `(r, G(r))` of [`one_dof_jump`].
///
/// The returned triple has `c = 0`: the analytic part is invisible in the jump.
pub fn fit_puiseux_jump(samples: &[(f64, f64)], k: usize) -> Result<PuiseuxFit> {
    check_samples(samples, 2 * (k + 1), "jump fit")?;
    let n = k + 1;
    let design = DMatrix::from_fn(samples.len(), 2 * n, |i, j| {
        let r = samples[i].0;
        let p = (-r).powi((j % n) as i32);
        if j < n {
            p * r.powf(-1.0 / 6.0)
        } else {
            -p * r.powf(1.0 / 6.0)
        }
    });
    let rhs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (x, report) = least_squares(design, &rhs, samples.iter().map(|s| s.0).collect())?;
    Ok(PuiseuxFit {
        triple: PuiseuxTriple {
            a: TruncatedSeries::from_coeffs(x[..n].to_vec()),
            b: TruncatedSeries::from_coeffs(x[n..].to_vec()),
            c: TruncatedSeries::zero(k),
        },
        report,
    })
}

/// Samples the jump on `count` equally spaced `r ∈ [0.05, 0.9]·x0²` and fits.
pub fn puiseux_from_jump(model: &FibrationModel, k: usize, count: usize, tol: Tolerance) -> Result<PuiseuxFit> {
    if model.kind != ModelKind::OneDof {
        return Err(Error::InvalidInput("jump fit needs the OneDof model".into()));
    }
    let x2 = model.x0 * model.x0;
    let samples = linear_grid(0.05 * x2, 0.9 * x2, count)
        .into_iter()
        .map(|r| Ok((r, one_dof_jump(&model.density, model.x0, r, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    fit_puiseux_jump(&samples, k)
}

/// Logarithmic coefficient extracted by Richardson extrapolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCoeff {
    pub alpha: f64,
    /// Difference between the two last extrapolation levels.
    pub error: f64,
    pub levels: usize,
}

/// `α` in `value(s) = α ln|s| + β(s)`, `β` analytic, from samples at
/// `s = s₀ 2^{−m}`, `m = 0..M`, `M ≥ 6`, in that order.
pub fn extract_log_coeff(samples: &[(f64, f64)]) -> Result<LogCoeff> {
    if samples.len() < 7 {
        return Err(Error::InvalidInput(format!(
            "log coefficient needs at least 7 samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        let ratio = w[0].0 / w[1].0;
        if !((ratio - 2.0).abs() < 1e-9) {
            return Err(Error::InvalidInput("samples must halve s at every step".into()));
        }
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    // α_m = −(v_{m+1} − v_m)/ln 2 = α + Σ_j e_j 2^{−mj}.
    let mut row: Vec<f64> = samples.windows(2).map(|w| -(w[1].1 - w[0].1) / LN_2).collect();
    let first = row.clone();
    let mut levels = 0;
    let mut best = (f64::INFINITY, *row.last().unwrap());
    for l in 1..row.len() {
        let p = 2f64.powi(l as i32);
        let next: Vec<f64> = row.windows(2).map(|w| (p * w[1] - w[0]) / (p - 1.0)).collect();
        let last = *row.last().unwrap();
        let err = (next.last().unwrap() - last).abs();
        if err < best.0 {
            best = (err, *next.last().unwrap());
            levels = l;
        }
        row = next;
        if row.len() < 2 {
            break;
        }
    }
    // The raw estimates must settle: successive differences shrink.
    let d1 = (first[first.len() - 1] - first[first.len() - 2]).abs();
    let d0 = (first[first.len() - 2] - first[first.len() - 3]).abs();
    let scale = first.last().unwrap().abs().max(1.0);
    if d1 > 1e-10 * scale && d1 > 0.9 * d0 {
        return Err(Error::NoConvergence(format!(
            "differences do not converge (last {d1:e}, previous {d0:e}); not a logarithm"
        )));
    }
    Ok(LogCoeff { alpha: best.1, error: best.0, levels })
}

/// Π(H) of the node model `H = xy`: time from `y = 1` to `x = 1`,
/// `∫_H^1 f(H/y, y) dy/y`.
pub fn node_passage(f: &Density, h: f64, tol: Tolerance) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("node passage needs 0 < H < 1, got {h}")));
    }
    // y = e^t
    quad(
        |t| {
            let y = t.exp();
            f.eval(h / y, y, 0.0)
        },
        h.ln(),
        0.0,
        tol,
    )
}

/// Orientation of the complex cycle `x = H e^{it}, y = e^{−it}`, `t ∈ [0, 2π]`,
/// under which `Π̂ = −2πi f̄(H)` and the logarithmic coefficient of Π equals
/// `+Π̂/(2πi)`.
pub const NODE_ORIENTATION_SIGN: f64 = 1.0;

/// Π̂(H) by the residue rule: `−2πi Σ_m c_{mm} H^m` for `f = Σ c_{mn} x^m y^n`.
pub fn node_complex_period(f: &Density, h: f64) -> Complex64 {
    let diag: f64 = f
        .poly()
        .terms()
        .iter()
        .filter(|(e, _)| e[0] == e[1] && e[2] == 0)
        .map(|(e, c)| c * h.powi(e[0] as i32))
        .sum();
    Complex64::new(0.0, -2.0 * PI * diag)
}

/// Π̂(H) by the `n`-point trapezoidal rule on the cycle; exact for `n` above
/// the degree of `f`.
pub fn node_complex_period_contour(f: &Density, h: f64, n: usize) -> Complex64 {
    let n = n.max(1);
    let dt = 2.0 * PI / n as f64;
    let p = f.poly();
    let sum: Complex64 = (0..n)
        .map(|j| {
            let t = j as f64 * dt;
            let x = Complex64::from_polar(h, t);
            let y = Complex64::from_polar(1.0, -t);
            p.terms()
                .iter()
                .filter(|(e, _)| e[2] == 0)
                .map(|(e, c)| *c * x.powi(e[0] as i32) * y.powi(e[1] as i32))
                .sum::<Complex64>()
        })
        .sum();
    // ω/dH = f dy/y and dy/y = −i dt on the cycle.
    sum * Complex64::new(0.0, -dt)
}

/// Coefficients of `Π(H) = A(H) ln H + B(H)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSeriesFit {
    pub log_part: TruncatedSeries,
    pub analytic: TruncatedSeries,
    pub report: FitReport,
}

/// Least-squares fit of `Σ_{k≤k_log} A_k H^k ln H + Σ_{k≤k_an} B_k H^k`.
pub fn fit_log_series(samples: &[(f64, f64)], k_log: usize, k_an: usize) -> Result<LogSeriesFit> {
    let n = k_log + 1;
    check_samples(samples, n + k_an + 1, "log-series fit")?;
    let design = DMatrix::from_fn(samples.len(), n + k_an + 1, |i, j| {
        let h = samples[i].0;
        if j < n {
            h.powi(j as i32) * h.ln()
        } else {
            h.powi((j - n) as i32)
        }
    });
    let rhs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (x, report) = least_squares(design, &rhs, samples.iter().map(|s| s.0).collect())?;
    Ok(LogSeriesFit {
        log_part: TruncatedSeries::from_coeffs(x[..n].to_vec()),
        analytic: TruncatedSeries::from_coeffs(x[n..].to_vec()),
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A2Point {
    pub h: f64,
    /// Logarithmic coefficient fitted from real passage times.
    pub fitted: f64,
    /// `sign · Π̂(H)/(2πi)`.
    pub predicted: f64,
    pub error: f64,
}

/// Comparison of the real and complex periods of the node model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A2Report {
    pub sign: f64,
    pub points: Vec<A2Point>,
    pub tolerance: f64,
    pub passed: bool,
    pub fit: LogSeriesFit,
}

/// Checks that the logarithmic coefficient of the node passage time equals
/// `Π̂(H)/(2πi)` at every grid point.
pub fn verify_prop_a2(f: &Density, hs: &[f64], tolerance: f64, tol: Tolerance) -> Result<A2Report> {
    if hs.iter().any(|h| !(*h > 0.0 && *h < 0.5)) {
        return Err(Error::InvalidInput("grid points must lie in (0, 0.5)".into()));
    }
    let deg = f.poly().total_degree() as usize;
    let samples = geometric_grid(0.9, 2.0, 40)
        .into_iter()
        .map(|h| Ok((h, node_passage(f, h, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_log_series(&samples, deg / 2, deg)?;
    let points: Vec<A2Point> = hs
        .iter()
        .map(|&h| {
            let fitted = fit.log_part.eval(h);
            let predicted = NODE_ORIENTATION_SIGN * (node_complex_period(f, h) / Complex64::new(0.0, 2.0 * PI)).re;
            A2Point { h, fitted, predicted, error: (fitted - predicted).abs() }
        })
        .collect();
    let passed = points.iter().all(|p| p.error <= tolerance);
    Ok(A2Report { sign: NODE_ORIENTATION_SIGN, points, tolerance, passed, fit })
}

/// Which period is sampled on the approach to the hyperbolic value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogSource {
    /// Π∘ from inside the swallow-tail.
    Loop,
    /// Π from inside the swallow-tail.
    Passage,
    /// Π from outside, where the trajectory passes the saddle twice.
    PassageOutside,
}

/// Logarithmic coefficient of a period at the hyperbolic value `H_hyp(λ)`,
/// from samples at `|H − H_hyp| = s₀ 2^{−m}`, `m = 0..=m_max`.
pub fn hyperbolic_log_coeff(
    model: &FibrationModel,
    lambda: f64,
    source: LogSource,
    s0: f64,
    m_max: usize,
    tol: Tolerance,
) -> Result<LogCoeff> {
    if !model.is_cusp() {
        return Err(Error::InvalidInput("hyperbolic coefficient needs a cusp model".into()));
    }
    if !(lambda < 0.0) {
        return Err(Error::Domain(format!("no hyperbolic value for λ = {lambda}")));
    }
    let hyp = model
        .critical_values(lambda)?
        .into_iter()
        .find(|c| c.kind == CriticalKind::Hyperbolic)
        .ok_or_else(|| Error::Domain(format!("no hyperbolic value for λ = {lambda}")))?;
    let samples = (0..=m_max)
        .map(|m| {
            let s = s0 * 2f64.powi(-(m as i32));
            let v = match source {
                LogSource::Loop => loop_period(model, hyp.h - s, lambda, tol)?,
                LogSource::Passage => passage_time(model, hyp.h - s, lambda, tol)?,
                LogSource::PassageOutside => passage_time(model, hyp.h + s, lambda, tol)?,
            };
            Ok((s, v))
        })
        .collect::<Result<Vec<_>>>()?;
    extract_log_coeff(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::constants;

    #[test]
    fn synthetic_puiseux_roundtrip() {
        let hs = geometric_grid(0.5, 4.0, 16);
        let samples: Vec<(f64, f64)> = hs
            .iter()
            .map(|&h| (h, 2.4 * h.powf(-1.0 / 6.0) - 1.5 * h.powf(1.0 / 6.0) + 0.3 + h))
            .collect();
        let fit = fit_puiseux(&samples, 1).unwrap();
        let want = [2.4, 0.0, -1.5, 0.0, 0.3, 1.0];
        for (g, w) in fit.triple.flatten().iter().zip(want) {
            assert!((g - w).abs() < 1e-8, "{g} vs {w}");
        }
        assert!(!fit.report.flagged);
        assert!(fit_puiseux(&samples[..5], 1).is_err());
        let narrow: Vec<(f64, f64)> = geometric_grid(0.5, 1.5, 10).iter().map(|&h| (h, h)).collect();
        assert!(fit_puiseux(&narrow, 1).is_err(), "less than four decades");
    }

    #[test]
    fn jump_of_basic_forms() {
        let c = constants();
        let tol = Tolerance::tight();
        for r in [0.1, 0.5] {
            let one = one_dof_jump(&Density::constant(1.0), 1.0, r, tol).unwrap();
            assert!((one - c.c0 * r.powf(-1.0 / 6.0)).abs() < 1e-12);
            let y = Density::from_terms(&[(1.0, [0, 1, 0])]);
            let g = one_dof_jump(&y, 1.0, r, tol).unwrap();
            assert!((g + c.c1 * r.powf(1.0 / 6.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn log_coefficient_synthetic() {
        let s: Vec<(f64, f64)> = (0..12)
            .map(|m| {
                let s = 0.1 * 2f64.powi(-m);
                (s, 2.0 * s.ln() + 3.0 + s)
            })
            .collect();
        assert!((extract_log_coeff(&s).unwrap().alpha - 2.0).abs() < 1e-8);
        let flat: Vec<(f64, f64)> = s.iter().map(|(x, _)| (*x, 1.0 / x)).collect();
        assert!(extract_log_coeff(&flat).is_err());
    }

    #[test]
    fn node_elementary_integrals() {
        let tol = Tolerance::tight();
        for h in [0.01, 0.3] {
            let one = node_passage(&Density::constant(1.0), h, tol).unwrap();
            assert!((one + h.ln()).abs() < 1e-12);
            let xy = Density::from_terms(&[(1.0, [1, 1, 0])]);
            assert!((node_passage(&xy, h, tol).unwrap() + h * h.ln()).abs() < 1e-12);
            let y = Density::from_terms(&[(1.0, [0, 1, 0])]);
            assert!((node_passage(&y, h, tol).unwrap() - (1.0 - h)).abs() < 1e-12);
        }
        assert!(node_passage(&Density::constant(1.0), 1.5, tol).is_err());
    }

    #[test]
    fn residue_matches_contour() {
        let f = Density::from_terms(&[(1.0, [0, 0, 0]), (1.0, [1, 1, 0]), (0.5, [2, 0, 0]), (-0.3, [1, 3, 0])]);
        for h in [0.1, 0.4] {
            let a = node_complex_period(&f, h);
            let b = node_complex_period_contour(&f, h, 16);
            assert!((a - b).norm() < 1e-12);
            assert!((a.im + 2.0 * PI * (1.0 + h)).abs() < 1e-12);
        }
        let x = Density::from_terms(&[(1.0, [1, 0, 0])]);
        assert_eq!(node_complex_period(&x, 0.2), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cauchy_jump_coefficients() {
        let c = constants();
        let f = Density::from_terms(&[(1.0, [0, 0, 0]), (0.5, [0, 1, 0]), (0.3, [0, 3, 0]), (-0.2, [2, 1, 0])]);
        let p = f.poly().clone();
        let js = jump_taylor(|x, y, _| eval_complex2(&p, x, y), 2, 0.6, 24, Tolerance::tight()).unwrap();
        let pair = crate::brieskorn::reduce(&f).unwrap();
        for k in 0..3 {
            assert!((js.a.coeff(k) - c.c0 * pair.alpha.coeff(k)).abs() < 1e-11, "a_{k}");
            assert!((js.b.coeff(k) - c.c1 * pair.beta.coeff(k)).abs() < 1e-11, "b_{k}");
        }
        assert!(js.spurious < 1e-11);
    }
}
