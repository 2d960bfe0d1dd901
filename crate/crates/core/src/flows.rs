//! Hamiltonian flows on the phase space `(x, y, λ, φ)` with
//! `Ω = dX∧dy + dλ∧dφ`, `∂X/∂x = f`, the period lattices of regular tori and
//! the fiberwise transport map between two systems sharing `H` and `F = λ`.
//!
//! In these coordinates `Ω = f dx∧dy + X_λ dλ∧dy + dλ∧dφ`, and the field of
//! `G` defined by `i_v Ω = −dG` is
//! `v = (−G_y/f, G_x/f, −G_φ, G_λ − X_λ G_x/f)`.
//!
//! A system may also carry a bump deformation: its form is then `Ψ_*Ω` for
//! the time-1 map `Ψ` of `ρ·v_H`, `ρ` a smooth bump in `(x, y)`. `Ψ` preserves
//! `H` and `λ`, so the deformed system has the same fibration and actions.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gk::Tolerance;
use crate::model::{FibrationModel, Stratum};
use crate::ode::{integrate, integrate_to_event, OdeTolerance};
use crate::poly::Poly3;
use crate::quadrature::{loop_action, oval_area_dlambda, oval_bounds, oval_period, wide_action, Oval};
use crate::{Error, Result};

/// A phase point `(x, y, λ, φ)`.
pub type Point = [f64; 4];

/// The two commuting generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    H,
    F,
}

/// Smooth bump `ρ = A exp(1 − 1/(1 − s))`, `s = |(x, y) − c|²/R²`, zero for `s ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    /// `(ρ, ∂ρ/∂x, ∂ρ/∂y)`.
    fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        let r2 = self.radius * self.radius;
        let s = (dx * dx + dy * dy) / r2;
        if s >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let rho = self.amplitude * (1.0 - 1.0 / (1.0 - s)).exp();
        let ds = -rho / ((1.0 - s) * (1.0 - s));
        (rho, ds * 2.0 * dx / r2, ds * 2.0 * dy / r2)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.eval(x, y).0 > 0.0
    }
}

/// Fixed RK4 steps used for the deforming map `Ψ^{−1}`.
const BUMP_STEPS: usize = 32;

/// A model with its 4-D symplectic structure.
#[derive(Clone, Debug)]
pub struct SymplecticModel {
    model: FibrationModel,
    h: Poly3,
    dh: [Poly3; 3],
    f: Poly3,
    x_l: Poly3,
    bump: Option<Bump>,
    /// Trajectories must stay in `|x|, |y| ≤ bound`.
    pub bound: f64,
    pub ode: OdeTolerance,
}

impl SymplecticModel {
    pub fn new(model: FibrationModel) -> Result<Self> {
        model.validate()?;
        let h = model.hamiltonian();
        let dh = [h.deriv(0), h.deriv(1), h.deriv(2)];
        let f = model.density.poly().clone();
        let x_l = model.density.primitive().deriv(2);
        Ok(Self { model, h, dh, f, x_l, bump: None, bound: 10.0, ode: OdeTolerance::default() })
    }

    /// The system with form `Ψ_*Ω`, `Ψ` the time-1 map of `ρ·v_H`.
    pub fn deformed(model: FibrationModel, bump: Bump) -> Result<Self> {
        if !(bump.radius > 0.0) || !bump.amplitude.is_finite() {
            return Err(Error::InvalidInput("bump needs a positive radius and finite amplitude".into()));
        }
        let mut s = Self::new(model)?;
        s.bump = Some(bump);
        Ok(s)
    }

    pub fn model(&self) -> &FibrationModel {
        &self.model
    }

    pub fn bump(&self) -> Option<&Bump> {
        self.bump.as_ref()
    }

    /// The gauge primitive `X`.
    pub fn primitive(&self) -> Poly3 {
        self.model.density.primitive()
    }

    pub fn hamiltonian_value(&self, p: &Point) -> f64 {
        self.h.eval([p[0], p[1], p[2]])
    }

    /// `dG` as a covector in `(x, y, λ, φ)`.
    pub fn differential(&self, g: Generator, p: &Point) -> [f64; 4] {
        match g {
            Generator::H => {
                let q = [p[0], p[1], p[2]];
                [self.dh[0].eval(q), self.dh[1].eval(q), self.dh[2].eval(q), 0.0]
            }
            Generator::F => [0.0, 0.0, 1.0, 0.0],
        }
    }

    fn base_omega(&self, p: &Point) -> Matrix4<f64> {
        let q = [p[0], p[1], p[2]];
        let f = self.f.eval(q);
        let xl = self.x_l.eval(q);
        let mut m = Matrix4::zeros();
        m[(0, 1)] = f;
        m[(1, 0)] = -f;
        m[(2, 1)] = xl;
        m[(1, 2)] = -xl;
        m[(2, 3)] = 1.0;
        m[(3, 2)] = -1.0;
        m
    }

    /// Matrix `Ω_ij = Ω(∂_i, ∂_j)` at `p`.
    pub fn omega(&self, p: &Point) -> Matrix4<f64> {
        match &self.bump {
            None => self.base_omega(p),
            Some(b) => {
                let (q, a) = self.bump_inverse(b, p);
                a.transpose() * self.base_omega(&q) * a
            }
        }
    }

    /// Undeformed field of `H` and its Jacobian.
    fn base_h_field(&self, p: &Point) -> ([f64; 4], [[f64; 4]; 4]) {
        let q = [p[0], p[1], p[2]];
        let f = self.f.eval(q);
        let df = self.f.gradient(q);
        let hx = self.dh[0].eval(q);
        let hy = self.dh[1].eval(q);
        let hl = self.dh[2].eval(q);
        let dhx = self.dh[0].gradient(q);
        let dhy = self.dh[1].gradient(q);
        let dhl = self.dh[2].gradient(q);
        let xl = self.x_l.eval(q);
        let dxl = self.x_l.gradient(q);
        let v = [-hy / f, hx / f, 0.0, hl - xl * hx / f];
        let mut j = [[0.0; 4]; 4];
        for k in 0..3 {
            let dq_x = (dhx[k] * f - hx * df[k]) / (f * f);
            j[0][k] = -(dhy[k] * f - hy * df[k]) / (f * f);
            j[1][k] = dq_x;
            j[3][k] = dhl[k] - dxl[k] * hx / f - xl * dq_x;
        }
        (v, j)
    }

    /// `Ψ^{−1}(p)` and its Jacobian, by RK4 on the flow of `−ρ v_H` with the
    /// variational equation carried along.
    fn bump_inverse(&self, b: &Bump, p: &Point) -> (Point, Matrix4<f64>) {
        if !b.contains(p[0], p[1]) {
            // ρ vanishes at p, so p is a rest point of the deforming field.
            return (*p, Matrix4::identity());
        }
        let rhs = |z: &Point, a: &Matrix4<f64>| -> (Point, Matrix4<f64>) {
            let (rho, rx, ry) = b.eval(z[0], z[1]);
            let (v, jv) = self.base_h_field(z);
            let mut w = [0.0; 4];
            let mut jw = Matrix4::zeros();
            for i in 0..4 {
                w[i] = -rho * v[i];
                jw[(i, 0)] = -(rx * v[i] + rho * jv[i][0]);
                jw[(i, 1)] = -(ry * v[i] + rho * jv[i][1]);
                jw[(i, 2)] = -rho * jv[i][2];
            }
            (w, jw * a)
        };
        let h = 1.0 / BUMP_STEPS as f64;
        let mut z = *p;
        let mut a = Matrix4::identity();
        let axpy = |z: &Point, k: &Point, s: f64| -> Point { std::array::from_fn(|i| z[i] + s * k[i]) };
        for _ in 0..BUMP_STEPS {
            let (k1, m1) = rhs(&z, &a);
            let (k2, m2) = rhs(&axpy(&z, &k1, h / 2.0), &(a + m1 * (h / 2.0)));
            let (k3, m3) = rhs(&axpy(&z, &k2, h / 2.0), &(a + m2 * (h / 2.0)));
            let (k4, m4) = rhs(&axpy(&z, &k3, h), &(a + m3 * h));
            z = std::array::from_fn(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
            a += (m1 + m2 * 2.0 + m3 * 2.0 + m4) * (h / 6.0);
        }
        (z, a)
    }

    /// The field `v` of `G` with `i_v Ω = −dG`, i.e. `Ω v = dG`.
    pub fn hamiltonian_field(&self, g: Generator, p: &Point) -> Result<[f64; 4]> {
        if self.bump.is_none() {
            let f = self.f.eval([p[0], p[1], p[2]]);
            if !(f.abs() > 1e-300) || !f.is_finite() {
                return Err(Error::Degenerate(format!("Ω is degenerate at {p:?} (f = {f})")));
            }
            return Ok(match g {
                Generator::F => [0.0, 0.0, 0.0, 1.0],
                Generator::H => self.base_h_field(p).0,
            });
        }
        let om = self.omega(p);
        let dg = Vector4::from(self.differential(g, p));
        let v = om
            .lu()
            .solve(&dg)
            .filter(|v| v.iter().all(|c| c.is_finite()))
            .ok_or_else(|| Error::Degenerate(format!("Ω is degenerate at {p:?}")))?;
        Ok([v[0], v[1], v[2], v[3]])
    }

    /// `max |i_v Ω + dG|` over the four components.
    pub fn field_residual(&self, g: Generator, p: &Point, v: &[f64; 4]) -> f64 {
        let r = self.omega(p) * Vector4::from(*v) - Vector4::from(self.differential(g, p));
        r.amax()
    }

    fn in_domain(&self, p: &Point) -> bool {
        p.iter().all(|c| c.is_finite()) && p[0].abs() <= self.bound && p[1].abs() <= self.bound
    }

    fn rhs(&self, g: Generator) -> impl Fn(&Point) -> Point + '_ {
        move |p: &Point| self.hamiltonian_field(g, p).unwrap_or([f64::NAN; 4])
    }

    /// `σ_G^t(p)`.
    pub fn flow(&self, p: &Point, g: Generator, t: f64) -> Result<Point> {
        self.hamiltonian_field(g, p)?;
        integrate(self.rhs(g), *p, t, self.ode, |q| self.in_domain(q))
    }

    /// `σ^{(t₁, t₂)}(p)`: `H`-time `t₁`, then `F`-time `t₂`.
    pub fn flow2(&self, p: &Point, t: [f64; 2]) -> Result<Point> {
        let q = self.flow(p, Generator::H, t[0])?;
        self.flow(&q, Generator::F, t[1])
    }
}

/// One sample of a trajectory dump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub lambda: f64,
    pub phi: f64,
    pub h: f64,
    pub f: f64,
}

pub const TRAJECTORY_HEADER: &str = "t,x,y,lambda,phi,H,F";

/// `n + 1` equally spaced samples of `σ_G^s(p)`, `s ∈ [0, t]`.
pub fn trajectory(sm: &SymplecticModel, p: &Point, g: Generator, t: f64, n: usize) -> Result<Vec<TrajectoryRow>> {
    let n = n.max(1);
    let dt = t / n as f64;
    let mut rows = Vec::with_capacity(n + 1);
    let mut q = *p;
    for i in 0..=n {
        if i > 0 {
            q = sm.flow(&q, g, dt)?;
        }
        rows.push(TrajectoryRow {
            t: i as f64 * dt,
            x: q[0],
            y: q[1],
            lambda: q[2],
            phi: q[3],
            h: sm.hamiltonian_value(&q),
            f: q[2],
        });
    }
    Ok(rows)
}

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut s = String::from(TRAJECTORY_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{},{},{},{},{},{}\n", r.t, r.x, r.y, r.lambda, r.phi, r.h, r.f));
    }
    s
}

/// How `∂(I₁, I₂)/∂(H, F)` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeMethod {
    /// Five-point central differences of the action quadratures.
    FiniteDifference { step: f64 },
    /// Periods and `λ`-derivatives of areas by quadrature.
    Exact,
}

impl Default for LatticeMethod {
    fn default() -> Self {
        LatticeMethod::FiniteDifference { step: 1e-4 }
    }
}

/// Basis of `Γ(T_p) = Γ₀·J^{−1}(p)`, `Γ₀ = 2πℤ²` the lattice of the action flows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodLattice {
    /// Rows are lattice vectors `(t₁, t₂)` of `H`- and `F`-times.
    pub basis: [[f64; 2]; 2],
    /// `J = ∂(H, F)/∂(I₁, I₂)`.
    pub jacobian: [[f64; 2]; 2],
}

fn inverse2(m: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(det.abs() > 1e-12 * scale * scale) {
        return Err(Error::Degenerate(format!("singular 2×2 Jacobian (det = {det})")));
    }
    Ok([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

impl PeriodLattice {
    /// Lattice of the generators with `J^i_j = ∂F_i/∂I_j`.
    pub fn from_generator_jacobian(jacobian: [[f64; 2]; 2]) -> Result<Self> {
        let inv = inverse2(jacobian)?;
        let basis = inv.map(|row| row.map(|v| 2.0 * PI * v));
        Ok(Self { basis, jacobian })
    }

    /// Basis in units of `2π` (the standard basis when the generators are the actions).
    pub fn normalized(&self) -> [[f64; 2]; 2] {
        self.basis.map(|row| row.map(|v| v / (2.0 * PI)))
    }
}

/// `(I₁, I₂) = (λ, I∘)` on narrow tori, `(λ, I_μ)` on wide tori.
pub fn actions(model: &FibrationModel, h: f64, lambda: f64, stratum: Stratum, tol: Tolerance) -> Result<[f64; 2]> {
    let i2 = match stratum {
        Stratum::Narrow => loop_action(model, h, lambda, tol)?,
        Stratum::Wide => wide_action(model, h, lambda, model.mu_shift, tol)?,
        Stratum::Outside => return Err(Error::Domain(format!("no regular torus over ({h}, {lambda})"))),
    };
    Ok([lambda, i2])
}

fn oval_of(stratum: Stratum) -> Result<Oval> {
    match stratum {
        Stratum::Narrow => Ok(Oval::Narrow),
        Stratum::Wide => Ok(Oval::Wide),
        Stratum::Outside => Err(Error::Domain("no regular torus outside the narrow and wide strata".into())),
    }
}

/// `∂(I₁, I₂)/∂(H, F)` at a base point, rows indexed by the action.
pub fn action_jacobian(
    model: &FibrationModel,
    h: f64,
    lambda: f64,
    stratum: Stratum,
    method: LatticeMethod,
    tol: Tolerance,
) -> Result<[[f64; 2]; 2]> {
    let oval = oval_of(stratum)?;
    if !model.is_cusp() {
        return Err(Error::InvalidInput(format!("{:?} model has no 4-D tori", model.kind)));
    }
    if model.stratum(h, lambda) != stratum {
        return Err(Error::Domain(format!("({h}, {lambda}) is not in the {stratum} stratum")));
    }
    let row2 = match method {
        LatticeMethod::Exact => {
            let k = if stratum == Stratum::Wide { model.mu_shift as f64 } else { 0.0 };
            [
                oval_period(model, h, lambda, oval, tol)? / (2.0 * PI),
                oval_area_dlambda(model, h, lambda, oval, tol)? / (2.0 * PI) + k,
            ]
        }
        LatticeMethod::FiniteDifference { step } => {
            if !(step > 0.0) {
                return Err(Error::InvalidInput(format!("difference step must be positive, got {step}")));
            }
            let mut d = [0.0; 2];
            for (axis, out) in d.iter_mut().enumerate() {
                let mut vals = [0.0; 4];
                for (slot, m) in [-2.0, -1.0, 1.0, 2.0].into_iter().enumerate() {
                    let (hh, ll) = if axis == 0 { (h + m * step, lambda) } else { (h, lambda + m * step) };
                    if model.stratum(hh, ll) != stratum {
                        return Err(Error::Domain(format!(
                            "difference stencil at ({h}, {lambda}) crosses the bifurcation diagram"
                        )));
                    }
                    vals[slot] = actions(model, hh, ll, stratum, tol)?[1];
                }
                *out = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * step);
            }
            d
        }
    };
    Ok([[0.0, 1.0], row2])
}

/// Lattice of `(H, F)` on the torus over `(H, λ)` in the given stratum.
pub fn period_lattice(
    model: &FibrationModel,
    h: f64,
    lambda: f64,
    stratum: Stratum,
    method: LatticeMethod,
    tol: Tolerance,
) -> Result<PeriodLattice> {
    let di = action_jacobian(model, h, lambda, stratum, method, tol)?;
    let jac = inverse2(di).map_err(|_| Error::Domain(format!("action Jacobian singular at ({h}, {lambda})")))?;
    PeriodLattice::from_generator_jacobian(jac)
}

/// A phase point on the torus over `(H, λ)`: the turning point `x = 0` of the
/// oval (upper end for narrow, lower end for wide), `φ = 0`.
pub fn torus_point(model: &FibrationModel, h: f64, lambda: f64, stratum: Stratum) -> Result<Point> {
    let oval = oval_of(stratum)?;
    let (a, b) = oval_bounds(model, h, lambda, oval)?;
    let y = if oval == Oval::Narrow { b } else { a };
    Ok([0.0, y, lambda, 0.0])
}

/// Euclidean distance with the `φ` difference reduced mod 2π.
pub fn phase_distance(p: &Point, q: &Point) -> f64 {
    let dphi = (p[3] - q[3]).rem_euclid(2.0 * PI);
    let dphi = dphi.min(2.0 * PI - dphi);
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2) + dphi * dphi).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCheck {
    pub times: [f64; 2],
    pub distance: f64,
    pub returned: bool,
}

/// Distance between `p` and `σ^{(t₁, t₂)}(p)`; `returned` when below `tol`.
pub fn verify_lattice(sm: &SymplecticModel, p: &Point, times: [f64; 2], tol: f64) -> Result<LatticeCheck> {
    let q = sm.flow2(p, times)?;
    let distance = phase_distance(p, &q);
    Ok(LatticeCheck { times, distance, returned: distance < tol })
}

/// Longest flow time searched when shooting back to the section.
pub const SECTION_SEARCH_TIME: f64 = 100.0;

/// Time `t ≥ 0` with `σ_H^{−t}(q) ∈ {x = x₀}`, and that section point.
pub fn time_from_section(sm: &SymplecticModel, q: &Point, x0: f64) -> Result<(f64, Point)> {
    if q[0] == x0 {
        return Ok((0.0, *q));
    }
    sm.hamiltonian_field(Generator::H, q)?;
    let hit = integrate_to_event(
        sm.rhs(Generator::H),
        *q,
        -SECTION_SEARCH_TIME,
        sm.ode,
        |p| sm.in_domain(p),
        |p| p[0] - x0,
    );
    match hit {
        Ok(Some((t, p))) => Ok((-t, p)),
        Ok(None) | Err(Error::Domain(_)) => Err(Error::Domain(format!(
            "{q:?} is not reached from the section x = {x0} by the H-flow"
        ))),
        Err(e) => Err(e),
    }
}

/// Image of a point under the transport map, with the times involved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transported {
    pub point: Point,
    pub image: Point,
    /// `t(Q)`: time of the first system from the section to `Q`.
    pub t: f64,
    /// `t̃(Q)`: the same for the second system.
    pub t_tilde: f64,
    /// `r(Q) = t(Q) − t̃(Q)`.
    pub r: f64,
}

fn check_pair(sm1: &SymplecticModel, sm2: &SymplecticModel) -> Result<()> {
    if sm1.model.kind != sm2.model.kind {
        return Err(Error::InvalidInput(format!(
            "transport needs one model kind, got {:?} and {:?}",
            sm1.model.kind, sm2.model.kind
        )));
    }
    Ok(())
}

/// `σ̃_H^{t(Q)} ∘ σ_H^{−t(Q)}(Q)`; its `(x, y, λ)` part is `σ̃^{r(Q)}(Q)`.
fn transport_image(sm1: &SymplecticModel, sm2: &SymplecticModel, q: &Point, x0: f64) -> Result<(f64, Point)> {
    let (t, p) = time_from_section(sm1, q, x0)?;
    Ok((t, sm2.flow(&p, Generator::H, t)?))
}

/// The fiberwise map `ψ(Q) = σ̃^{r(Q)}(Q)` fixing the section `N₁ = {x = x₀}`.
///
/// The `φ` coordinate follows the extension `σ̃^{t} ∘ σ^{−t}`, which agrees with
/// `σ̃^{r(Q)}(Q)` up to the `F`-flow.
pub fn transport_map(sm1: &SymplecticModel, sm2: &SymplecticModel, q: &Point, x0: Option<f64>) -> Result<Transported> {
    check_pair(sm1, sm2)?;
    let x0 = x0.unwrap_or(sm1.model.x0);
    let (t, image) = transport_image(sm1, sm2, q, x0)?;
    let (t_tilde, _) = time_from_section(sm2, q, x0)?;
    Ok(Transported { point: *q, image, t, t_tilde, r: t - t_tilde })
}

/// Fiber drift and symplectic defect of the transport map at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackCheck {
    pub point: Point,
    pub image: Point,
    /// `max |Φ^*Ω̃ − Ω|` over the coordinate bivectors.
    pub pullback: f64,
    /// `max(|ΔH|, |Δλ|)` between `Q` and `Φ(Q)`.
    pub fiber: f64,
}

/// Pullback check with a central-difference Jacobian of step `step`.
pub fn pullback_check(sm1: &SymplecticModel, sm2: &SymplecticModel, q: &Point, x0: Option<f64>, step: f64) -> Result<PullbackCheck> {
    check_pair(sm1, sm2)?;
    let x0 = x0.unwrap_or(sm1.model.x0);
    let (_, image) = transport_image(sm1, sm2, q, x0)?;
    let mut d = Matrix4::zeros();
    for j in 0..4 {
        let mut qp = *q;
        let mut qm = *q;
        qp[j] += step;
        qm[j] -= step;
        let (_, ip) = transport_image(sm1, sm2, &qp, x0)?;
        let (_, im) = transport_image(sm1, sm2, &qm, x0)?;
        for i in 0..4 {
            d[(i, j)] = (ip[i] - im[i]) / (2.0 * step);
        }
    }
    let pulled = d.transpose() * sm2.omega(&image) * d;
    let pullback = (pulled - sm1.omega(q)).amax();
    let fiber = (sm1.hamiltonian_value(q) - sm2.hamiltonian_value(&image)).abs().max((q[2] - image[2]).abs());
    Ok(PullbackCheck { point: *q, image, pullback, fiber })
}

/// [`pullback_check`] over many points, in parallel, in input order.
pub fn pullback_checks(
    sm1: &SymplecticModel,
    sm2: &SymplecticModel,
    points: &[Point],
    x0: Option<f64>,
    step: f64,
) -> Result<Vec<PullbackCheck>> {
    points.par_iter().map(|q| pullback_check(sm1, sm2, q, x0, step)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Density, ModelKind};

    fn sm(kind: ModelKind, f: Density) -> SymplecticModel {
        SymplecticModel::new(FibrationModel::new(kind, f)).unwrap()
    }

    #[test]
    fn field_examples() {
        let s = sm(ModelKind::CuspLocal, Density::constant(1.0));
        let p = [1.0, 1.0, 0.0, 0.0];
        assert_eq!(s.hamiltonian_field(Generator::H, &p).unwrap(), [-3.0, 2.0, 0.0, 1.0]);
        assert_eq!(s.hamiltonian_field(Generator::F, &p).unwrap(), [0.0, 0.0, 0.0, 1.0]);
        let s2 = sm(ModelKind::CuspLocal, Density::constant(2.0));
        let v2 = s2.hamiltonian_field(Generator::H, &p).unwrap();
        assert_eq!([v2[0], v2[1]], [-1.5, 1.0]);
        let z = sm(ModelKind::CuspLocal, Density::from_terms(&[(1.0, [1, 0, 0])]));
        assert!(matches!(z.hamiltonian_field(Generator::H, &[0.0, 0.5, 0.0, 0.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn bump_deformation_is_identity_off_support() {
        let b = Bump { center: [0.3, -0.4], radius: 0.2, amplitude: 0.3 };
        let m = FibrationModel::new(ModelKind::CuspLocal, Density::constant(1.0));
        let d = SymplecticModel::deformed(m.clone(), b).unwrap();
        let plain = SymplecticModel::new(m).unwrap();
        let far = [0.9, 0.2, 0.1, 0.0];
        assert_eq!(d.omega(&far), plain.omega(&far));
        let inside = [0.35, -0.4, 0.05, 0.3];
        let om = d.omega(&inside);
        assert!((om + om.transpose()).amax() < 1e-12);
        assert!((om - plain.omega(&inside)).amax() > 1e-3);
        // `Ω(·, ∂φ) = dλ` survives the deformation.
        assert!((om[(2, 3)] - 1.0).abs() < 1e-14 && om[(0, 3)].abs() < 1e-14 && om[(1, 3)].abs() < 1e-14);
    }

    #[test]
    fn lattice_of_actions_is_standard() {
        let l = PeriodLattice::from_generator_jacobian([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(l.normalized(), [[1.0, 0.0], [0.0, 1.0]]);
        assert!(PeriodLattice::from_generator_jacobian([[1.0, 2.0], [2.0, 4.0]]).is_err());
    }

    #[test]
    fn phase_distance_wraps_phi() {
        assert!(phase_distance(&[0.0, 0.0, 0.0, 0.1], &[0.0, 0.0, 0.0, 0.1 + 2.0 * PI]) < 1e-15);
    }
}
