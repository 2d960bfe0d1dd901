//! Periods, areas and action variables on the model fibrations.
//!
//! On a λ-slice of a cusp model the level set `H = x² + W(y)` is
//! `x = ±s(y)` with `s = √P(y)`, `P = H − W`. Every period is an integral of
//! `[f(s, y) + f(−s, y)] / (2s) dy` over a root interval of `P`, and every area
//! an integral of `X(s, y) − X(−s, y)` with `X` the gauge primitive of `f`.
//! The `1/√` endpoint behavior is removed analytically: roots are divided
//! out of `P` and the interval is mapped by `y = a + (b − a) sin²θ` (two simple
//! roots) or `y = b − L u²` (one simple root).

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gk::{quad, Tolerance};
use crate::model::{CriticalKind, FibrationModel, ModelKind, Stratum};
use crate::poly::Poly3;
use crate::roots::{horner, real_roots, Root};
use crate::{Error, Result};

/// Which compact component of a level set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oval {
    /// The component that shrinks to the elliptic point (swallow-tail only).
    Narrow,
    /// The large component of the compact model.
    Wide,
}

/// `P(y) = H − W_λ(y)`, lowest coefficient first.
fn level_poly(model: &FibrationModel, h: f64, lambda: f64) -> Result<Vec<f64>> {
    let mut p: Vec<f64> = model.potential(lambda)?.iter().map(|c| -c).collect();
    p[0] += h;
    Ok(p)
}

/// Divides `p` by `(y − r)`, dropping the remainder.
fn deflate(p: &[f64], r: f64) -> Vec<f64> {
    let n = p.len() - 1;
    let mut q = vec![0.0; n];
    let mut carry = 0.0;
    for k in (1..=n).rev() {
        carry = p[k] + carry * r;
        q[k - 1] = carry;
    }
    q
}

fn domain_err(model: &FibrationModel, h: f64, lambda: f64, what: &str) -> Error {
    Error::Domain(format!("{what} at (H, λ) = ({h}, {lambda}) for the {:?} model", model.kind))
}

/// Roots `(y₋, y₊)` of `H − W` bounding the requested oval; `H − W > 0` between them.
pub fn oval_bounds(model: &FibrationModel, h: f64, lambda: f64, oval: Oval) -> Result<(f64, f64)> {
    let p = level_poly(model, h, lambda)?;
    let roots = real_roots(&p);
    match oval {
        Oval::Narrow => {
            let need = p.len() - 1;
            if roots.len() != need || roots.iter().any(|r| r.multiple) {
                return Err(domain_err(model, h, lambda, "no narrow oval (outside the swallow-tail or on the diagram)"));
            }
            Ok((roots[need - 2].x, roots[need - 1].x))
        }
        Oval::Wide => {
            if model.kind != ModelKind::CuspCompact {
                return Err(domain_err(model, h, lambda, "wide ovals exist only for the compact model"));
            }
            match roots.as_slice() {
                [Root { x: a, multiple: false }, b, ..] => {
                    if b.multiple {
                        // A triple root (cusp value) still bounds a compact oval;
                        // a double root is a hyperbolic value.
                        let d2: Vec<f64> = p.iter().enumerate().skip(2).map(|(k, c)| (k * (k - 1)) as f64 * c).collect();
                        if horner(&d2, b.x).abs() > 1e-6 {
                            return Err(domain_err(model, h, lambda, "wide oval pinched at a hyperbolic value"));
                        }
                    }
                    Ok((*a, b.x))
                }
                _ => Err(domain_err(model, h, lambda, "no wide oval")),
            }
        }
    }
}

/// Precomputed data of one oval: `P = (y − a)(b − y) Q(y)`.
struct OvalData {
    a: f64,
    b: f64,
    q: Vec<f64>,
}

impl OvalData {
    fn new(p: &[f64], a: f64, b: f64) -> Self {
        let q: Vec<f64> = deflate(&deflate(p, a), b).iter().map(|c| -c).collect();
        Self { a, b, q }
    }

    /// `(y, s, √Q)` at angle θ.
    fn point(&self, theta: f64) -> (f64, f64, f64) {
        let (sn, cs) = theta.sin_cos();
        let w = self.b - self.a;
        let y = self.a + w * sn * sn;
        let rq = horner(&self.q, y).max(0.0).sqrt();
        (y, w * sn * cs * rq, rq)
    }

    /// `∫ g(y, s) / (2s) dy` over the oval.
    fn period(&self, g: impl Fn(f64, f64) -> f64, tol: Tolerance) -> Result<f64> {
        quad(
            |t| {
                let (y, s, rq) = self.point(t);
                g(y, s) / rq
            },
            0.0,
            FRAC_PI_2,
            tol,
        )
    }

    /// `∫ g(y, s) dy` over the oval.
    fn area(&self, g: impl Fn(f64, f64) -> f64, tol: Tolerance) -> Result<f64> {
        let w = self.b - self.a;
        quad(
            |t| {
                let (y, s, _) = self.point(t);
                let (sn, cs) = t.sin_cos();
                g(y, s) * 2.0 * w * sn * cs
            },
            0.0,
            FRAC_PI_2,
            tol,
        )
    }
}

fn oval_data(model: &FibrationModel, h: f64, lambda: f64, oval: Oval) -> Result<OvalData> {
    let (a, b) = oval_bounds(model, h, lambda, oval)?;
    Ok(OvalData::new(&level_poly(model, h, lambda)?, a, b))
}

fn even_sum(f: &Poly3, s: f64, y: f64, lambda: f64) -> f64 {
    f.eval([s, y, lambda]) + f.eval([-s, y, lambda])
}

fn odd_diff(x: &Poly3, s: f64, y: f64, lambda: f64) -> f64 {
    x.eval([s, y, lambda]) - x.eval([-s, y, lambda])
}

/// `∮ f dy/(2x)` around an oval: the period of the H-flow on it.
pub fn oval_period(model: &FibrationModel, h: f64, lambda: f64, oval: Oval, tol: Tolerance) -> Result<f64> {
    let d = oval_data(model, h, lambda, oval)?;
    let f = model.density.poly();
    d.period(|y, s| even_sum(f, s, y, lambda), tol)
}

/// `∬ f dx dy` over the region bounded by an oval.
pub fn oval_area(model: &FibrationModel, h: f64, lambda: f64, oval: Oval, tol: Tolerance) -> Result<f64> {
    let d = oval_data(model, h, lambda, oval)?;
    let x = model.density.primitive();
    d.area(|y, s| odd_diff(&x, s, y, lambda), tol)
}

/// `∂/∂λ` of [`oval_area`] at fixed `H`, from differentiating under the integral.
pub fn oval_area_dlambda(model: &FibrationModel, h: f64, lambda: f64, oval: Oval, tol: Tolerance) -> Result<f64> {
    let d = oval_data(model, h, lambda, oval)?;
    let f = model.density.poly();
    let x_l = model.density.primitive().deriv(2);
    let inner = if x_l.is_zero() { 0.0 } else { d.area(|y, s| odd_diff(&x_l, s, y, lambda), tol)? };
    // ∂s/∂λ = −(∂W/∂λ)/(2s) and ∂W/∂λ = y for both cusp models.
    let boundary = d.period(|y, s| -y * even_sum(f, s, y, lambda), tol)?;
    Ok(inner + boundary)
}

/// Π∘(H, λ): period of the closed trajectories on the narrow torus.
pub fn loop_period(model: &FibrationModel, h: f64, lambda: f64, tol: Tolerance) -> Result<f64> {
    oval_period(model, h, lambda, Oval::Narrow, tol)
}

/// I∘(H, λ) = area of the narrow oval / 2π.
pub fn loop_action(model: &FibrationModel, h: f64, lambda: f64, tol: Tolerance) -> Result<f64> {
    Ok(oval_area(model, h, lambda, Oval::Narrow, tol)? / (2.0 * PI))
}

/// I_μ(H, λ) = area of the wide oval / 2π + kλ.
pub fn wide_action(model: &FibrationModel, h: f64, lambda: f64, k: i64, tol: Tolerance) -> Result<f64> {
    Ok(oval_area(model, h, lambda, Oval::Wide, tol)? / (2.0 * PI) + k as f64 * lambda)
}

/// `h(λ)`: I∘ on the hyperbolic branch, the area of the separatrix loop / 2π.
pub fn separatrix_action(model: &FibrationModel, lambda: f64, tol: Tolerance) -> Result<f64> {
    if !(lambda < 0.0) {
        return Err(Error::Domain(format!("separatrix action needs λ < 0, got {lambda}")));
    }
    let saddle = model
        .critical_values(lambda)?
        .into_iter()
        .find(|c| c.kind == CriticalKind::Hyperbolic)
        .ok_or_else(|| domain_err(model, 0.0, lambda, "no hyperbolic value"))?;
    let p = level_poly(model, saddle.h, lambda)?;
    let rb = real_roots(&p)
        .into_iter()
        .filter(|r| !r.multiple && r.x > saddle.y)
        .map(|r| r.x)
        .next()
        .ok_or_else(|| domain_err(model, saddle.h, lambda, "separatrix loop not closed"))?;
    let len = rb - saddle.y;
    let x = model.density.primitive();
    let area = quad(
        |u| {
            let y = rb - len * u * u;
            let s = horner(&p, y).max(0.0).sqrt();
            odd_diff(&x, s, y, lambda) * 2.0 * len * u
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok(area / (2.0 * PI))
}

/// Π(H, λ): time along the level set from the section `x = x0` to `x = −x0`.
///
/// For `OneDof` this is `(1/3)∫_{−x0}^{x0} f(x, y(x)) y^{−2} dx` with
/// `y = (H + x²)^{1/3}`; for the node model see
/// [`node_passage`](crate::asymptotics::node_passage).
pub fn passage_time(model: &FibrationModel, h: f64, lambda: f64, tol: Tolerance) -> Result<f64> {
    model.validate()?;
    match model.kind {
        ModelKind::OneDof => one_dof_passage(model, h, tol),
        ModelKind::Node => crate::asymptotics::node_passage(&model.density, h, tol),
        ModelKind::CuspLocal => cusp_passage(model, h, lambda, tol),
        ModelKind::CuspCompact => Err(domain_err(model, h, lambda, "compact fibers do not reach the sections")),
    }
}

fn cusp_passage(model: &FibrationModel, h: f64, lambda: f64, tol: Tolerance) -> Result<f64> {
    let p = level_poly(model, h, lambda)?;
    let roots = real_roots(&p);
    let r1 = match roots.first() {
        Some(Root { x, multiple: false }) => *x,
        _ => return Err(domain_err(model, h, lambda, "trajectory pinched on the hyperbolic branch")),
    };
    let x0sq = model.x0 * model.x0;
    let mut ps = p.clone();
    ps[0] -= x0sq;
    let y_sec = real_roots(&ps)
        .into_iter()
        .filter(|r| r.x < r1)
        .map(|r| r.x)
        .next_back()
        .ok_or_else(|| domain_err(model, h, lambda, "section not reached"))?;
    let len = r1 - y_sec;
    // P = (r1 − y) Q(y)
    let q: Vec<f64> = deflate(&p, r1).iter().map(|c| -c).collect();
    let f = model.density.poly();
    let sl = len.sqrt();
    quad(
        |u| {
            let y = r1 - len * u * u;
            let rq = horner(&q, y).max(0.0).sqrt();
            let s = sl * u * rq;
            even_sum(f, s, y, lambda) * sl / rq
        },
        0.0,
        1.0,
        tol,
    )
}

fn one_dof_passage(model: &FibrationModel, h: f64, tol: Tolerance) -> Result<f64> {
    let f = model.density.poly();
    let x0 = model.x0;
    if h > 0.0 {
        // x = √H sinh u turns the integrand into (1/3) f H^{−1/6} cosh^{−1/3} u.
        let rh = h.sqrt();
        let umax = (x0 / rh).asinh();
        let h13 = h.cbrt();
        let g = |u: f64| {
            let c = u.cosh();
            let x = rh * u.sinh();
            let y = h13 * c.powf(2.0 / 3.0);
            f.eval([x, y, 0.0]) * c.powf(-1.0 / 3.0)
        };
        let half = quad(|u| g(u) + g(-u), 0.0, umax, tol)?;
        Ok(half * h.powf(-1.0 / 6.0) / 3.0)
    } else if h < 0.0 {
        // Parametrize by y from the bottom point y_min = H^{1/3}, where the
        // curve turns: y = y_min + t², x = ±t √(y² + y·y_min + y_min²).
        let ymin = h.cbrt();
        let ytop = (h + x0 * x0).cbrt();
        let tmax = (ytop - ymin).sqrt();
        quad(
            |t| {
                let y = ymin + t * t;
                let rq = (y * y + y * ymin + ymin * ymin).sqrt();
                let s = t * rq;
                (f.eval([s, y, 0.0]) + f.eval([-s, y, 0.0])) / rq
            },
            0.0,
            tmax,
            tol,
        )
    } else {
        Err(domain_err(model, h, 0.0, "passage time diverges at the singular value"))
    }
}

/// Area between the level curve `y³ − x² = H`, the axis `y = 0` and the
/// sections; its H-derivative is the passage time.
pub fn one_dof_area(model: &FibrationModel, h: f64, tol: Tolerance) -> Result<f64> {
    if model.kind != ModelKind::OneDof {
        return Err(Error::InvalidInput("one_dof_area needs the OneDof model".into()));
    }
    if !(h > 0.0) {
        return Err(domain_err(model, h, 0.0, "area parametrization needs H > 0"));
    }
    let yprim = model.density.poly().antideriv(1);
    let rh = h.sqrt();
    let umax = (model.x0 / rh).asinh();
    let h13 = h.cbrt();
    let g = |u: f64| {
        let c = u.cosh();
        let x = rh * u.sinh();
        let y = h13 * c.powf(2.0 / 3.0);
        yprim.eval([x, y, 0.0]) * rh * c
    };
    quad(|u| g(u) + g(-u), 0.0, umax, tol)
}

/// Rectangular grid over the base.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub h_range: (f64, f64),
    pub lambda_range: (f64, f64),
    pub nh: usize,
    pub nl: usize,
}

impl GridSpec {
    /// A grid suited to the model's base domain.
    pub fn default_for(model: &FibrationModel, nh: usize, nl: usize) -> Self {
        match model.kind {
            ModelKind::CuspCompact => Self { h_range: (-0.06, 0.06), lambda_range: (-0.06, 0.06), nh, nl },
            _ => Self { h_range: (-0.4, 0.4), lambda_range: (-1.0, 0.2), nh, nl },
        }
    }

    fn axis(range: (f64, f64), n: usize, i: usize) -> f64 {
        if n <= 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        }
    }

    /// Points in row-major order (λ outer, H inner).
    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.nl)
            .flat_map(|j| {
                (0..self.nh).map(move |i| (Self::axis(self.h_range, self.nh, i), Self::axis(self.lambda_range, self.nl, j)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionRow {
    pub h: f64,
    pub lambda: f64,
    pub stratum: Stratum,
    pub pi: Option<f64>,
    pub pi_circ: Option<f64>,
    pub i: f64,
    pub i_circ: Option<f64>,
    pub i_mu: Option<f64>,
}

/// Actions sampled on a grid, in grid order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionChart {
    pub rows: Vec<ActionRow>,
    pub mu_shift: i64,
}

pub const CSV_HEADER: &str = "H,lambda,stratum,Pi,Pi_circ,I,I_circ,I_mu";

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl ActionChart {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{:e},{:e},{},{},{},{:e},{},{}\n",
                r.h,
                r.lambda,
                r.stratum,
                cell(r.pi),
                cell(r.pi_circ),
                r.i,
                cell(r.i_circ),
                cell(r.i_mu)
            ));
        }
        out
    }

    pub fn filter(&self, stratum: Stratum) -> Self {
        Self {
            rows: self.rows.iter().filter(|r| r.stratum == stratum).cloned().collect(),
            mu_shift: self.mu_shift,
        }
    }
}

/// Evaluates all actions at one base point.
pub fn action_row(model: &FibrationModel, h: f64, lambda: f64, tol: Tolerance) -> ActionRow {
    let stratum = model.stratum(h, lambda);
    let narrow = stratum == Stratum::Narrow;
    let compact = model.kind == ModelKind::CuspCompact && stratum != Stratum::Outside;
    ActionRow {
        h,
        lambda,
        stratum,
        pi: passage_time(model, h, lambda, tol).ok(),
        pi_circ: if narrow { loop_period(model, h, lambda, tol).ok() } else { None },
        i: lambda,
        i_circ: if narrow { loop_action(model, h, lambda, tol).ok() } else { None },
        i_mu: if compact { wide_action(model, h, lambda, model.mu_shift, tol).ok() } else { None },
    }
}

/// Evaluates the actions on every grid point (in parallel, output in grid order).
pub fn action_chart(model: &FibrationModel, grid: &GridSpec, tol: Tolerance) -> ActionChart {
    let rows = grid
        .points()
        .par_iter()
        .map(|&(h, l)| action_row(model, h, l, tol))
        .collect();
    ActionChart { rows, mu_shift: model.mu_shift }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Density;

    fn local(f: Density) -> FibrationModel {
        FibrationModel::new(ModelKind::CuspLocal, f)
    }

    #[test]
    fn oval_bound_examples() {
        let m = local(Density::constant(1.0));
        let (a, b) = oval_bounds(&m, 0.0, -3.0, Oval::Narrow).unwrap();
        assert!(a.abs() < 1e-15 && (b - 3f64.sqrt()).abs() < 1e-15);
        assert!(oval_bounds(&m, 0.0, 0.0, Oval::Narrow).is_err());
        let c = FibrationModel::new(ModelKind::CuspCompact, Density::constant(1.0));
        let (a, b) = oval_bounds(&c, 0.0, 0.0, Oval::Wide).unwrap();
        assert!((a + 1.0).abs() < 1e-14 && b.abs() < 1e-6);
        let hyp = c
            .critical_values(-0.03)
            .unwrap()
            .into_iter()
            .find(|v| v.kind == CriticalKind::Hyperbolic)
            .unwrap();
        assert!(oval_bounds(&c, hyp.h, -0.03, Oval::Wide).is_err());
    }

    #[test]
    fn ellipse_limit() {
        // Near the elliptic point y = 1 of λ = −3, H ≈ −2 + x² + 3(y−1)²: area = π ε/√3.
        let m = local(Density::constant(1.0));
        let eps = 1e-4;
        let i = loop_action(&m, -2.0 + eps, -3.0, Tolerance::default()).unwrap();
        let want = eps / (2.0 * 3f64.sqrt());
        assert!((i - want).abs() < 1e-3 * want, "{i} vs {want}");
        // Period → 2π/√(4·3) ... of x² + 3(y−1)²: π/√3.
        let p = loop_period(&m, -2.0 + eps, -3.0, Tolerance::default()).unwrap();
        assert!((p - PI / 3f64.sqrt()).abs() < 1e-3);
    }
}
