//! Symplectic invariants and equivalence verdicts.
//!
//! One degree of freedom: the characteristic series `(α, β)` of a density on
//! `H = y³ − x²`, the rescaling `r_h(x, y) = (g(H)^{1/2} x, g(H)^{1/3} y)` with
//! `h = H g(H)`, and the normal form `ω = dx∧dy + f(H) y dx∧dy` reached by the
//! rescaling that makes `α ≡ 1`.
//!
//! Cusp systems: verification of a supplied base map `φ` (bifurcation diagram
//! and action variables) and the `φ`-independent invariants `h(λ)` and the
//! logarithmic coefficients at the hyperbolic branch.

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    eval_complex2, hyperbolic_log_coeff, jump_taylor, linear_grid, LogSource,
};
use crate::brieskorn::{reduce, BrieskornPair};
use crate::gk::Tolerance;
use crate::model::{CriticalKind, Density, FibrationModel, ModelKind, Stratum};
use crate::poly::{Poly2, Poly3};
use crate::quadrature::{loop_action, separatrix_action, wide_action, GridSpec};
use crate::series::{TruncatedSeries, DEFAULT_ORDER};
use crate::specfun::constants;
use crate::{Error, Result};

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// The rescaling `r_h` for `h(H) = H g(H)`, `g(0) > 0`, on `H = y³ − x²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rescaling {
    g: TruncatedSeries,
    dg: TruncatedSeries,
}

impl Rescaling {
    /// `g` is used as the polynomial given by its coefficients.
    pub fn new(g: TruncatedSeries) -> Result<Self> {
        if !(g.coeff(0) > 0.0) {
            return Err(Error::InvalidInput(format!("rescaling needs g(0) > 0, got {}", g.coeff(0))));
        }
        let dg = g.derivative();
        Ok(Self { g, dg })
    }

    pub fn g(&self) -> &TruncatedSeries {
        &self.g
    }

    /// `h = H g(H)` as a series.
    pub fn h_series(&self) -> TruncatedSeries {
        self.g.shift_up()
    }

    pub fn h(&self, big_h: f64) -> f64 {
        big_h * self.g.eval(big_h)
    }

    /// `det J_{r_h} = g^{−1/6} (g′H + g)` at level `H`.
    pub fn jacobian(&self, big_h: f64) -> f64 {
        let g = self.g.eval(big_h);
        g.powf(-1.0 / 6.0) * (self.dg.eval(big_h) * big_h + g)
    }

    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let g = self.g.eval(y * y * y - x * x);
        (g.sqrt() * x, g.cbrt() * y)
    }

    /// Solves `h(H) = target` by Newton's method from `H = target / g(0)`.
    pub fn invert_level(&self, target: f64) -> Result<f64> {
        let mut x = target / self.g.coeff(0);
        for _ in 0..100 {
            let g = self.g.eval(x);
            let d = g + x * self.dg.eval(x);
            if !(d.abs() > 1e-300) {
                break;
            }
            let step = (x * g - target) / d;
            x -= step;
            if step.abs() <= 1e-16 * (1.0 + x.abs()) {
                return Ok(x);
            }
        }
        Err(Error::NoConvergence(format!("h(H) = {target} has no nearby solution")))
    }

    pub fn inverse(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        let big_h = self.invert_level(v * v * v - u * u)?;
        let g = self.g.eval(big_h);
        Ok((u / g.sqrt(), v / g.cbrt()))
    }

    fn eval_c(s: &TruncatedSeries, z: Complex64) -> Complex64 {
        s.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Complex solution of `h(H) = target` near `target / g(0)`.
    pub fn invert_level_complex(&self, target: Complex64) -> Result<Complex64> {
        let mut x = target / self.g.coeff(0);
        for _ in 0..100 {
            let g = Self::eval_c(&self.g, x);
            let d = g + x * Self::eval_c(&self.dg, x);
            if !(d.norm() > 1e-300) {
                break;
            }
            let step = (x * g - target) / d;
            x -= step;
            if step.norm() <= 1e-16 * (1.0 + x.norm()) {
                return Ok(x);
            }
        }
        Err(Error::NoConvergence(format!("h(H) = {target} has no nearby solution")))
    }

    /// Density of `(r_h^{−1})^*(f dx∧dy)` at `(u, v)` on the level `h(H) = level`,
    /// continued to complex arguments.
    pub fn pushforward_density(&self, f: &Poly3, u: Complex64, v: Complex64, level: Complex64) -> Result<Complex64> {
        let big_h = self.invert_level_complex(level)?;
        let g = Self::eval_c(&self.g, big_h);
        let jac = g.powf(-1.0 / 6.0) * (Self::eval_c(&self.dg, big_h) * big_h + g);
        Ok(eval_complex2(f, u / g.sqrt(), v / g.cbrt()) / jac)
    }
}

/// Contour radius in `t = r^{1/3}` and node count used for pushforward series.
pub const PUSHFORWARD_RADIUS: f64 = 0.4;
pub const PUSHFORWARD_NODES: usize = 64;

/// `α, β` (through order `k`) of the form `(r_h^{−1})^*(f dx∧dy)`, from
/// quadratures of its periods continued around the cusp value.
pub fn pushforward_characteristic(f: &Density, resc: &Rescaling, k: usize, tol: Tolerance) -> Result<BrieskornPair> {
    let c = constants();
    let p = f.poly();
    let js = jump_taylor(
        |u, v, r| resc.pushforward_density(p, u, v, -r).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        k,
        PUSHFORWARD_RADIUS,
        PUSHFORWARD_NODES,
        tol,
    )?;
    if !js.spurious.is_finite() {
        return Err(Error::NoConvergence("pushforward density undefined on the contour".into()));
    }
    Ok(BrieskornPair { alpha: js.a.scale(&(1.0 / c.c0)), beta: js.b.scale(&(1.0 / c.c1)) })
}

/// Residuals (max abs over the first `n` coefficients) of the relations
/// between the series of `ω` and of `ω̃` with `ψ^*ω̃ = ω`, `ψ^*H = H g(H)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationResiduals {
    /// `A = g^{5/6} Ã∘h`, `B = g^{7/6} B̃∘h`.
    pub area: [f64; 2],
    /// `α = J α̃∘h`, `β = g^{1/3} J β̃∘h`, `J = g^{−1/6}(g′H + g)`.
    pub characteristic: [f64; 2],
    /// `a = J ã∘h`, `b = g^{1/3} J b̃∘h`.
    pub period: [f64; 2],
    pub terms: usize,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.area
            .iter()
            .chain(&self.characteristic)
            .chain(&self.period)
            .fold(0.0f64, |m, v| m.max(*v))
    }
}

/// Area and period series derived from `(α, β)`.
struct Derived {
    a: TruncatedSeries,
    b: TruncatedSeries,
    big_a: TruncatedSeries,
    big_b: TruncatedSeries,
}

fn derive(p: &BrieskornPair, order: usize) -> Result<Derived> {
    let c = constants();
    let a = p.alpha.truncate(order).scale(&c.c0);
    let b = p.beta.truncate(order).scale(&c.c1);
    Ok(Derived {
        big_a: a.phi_r_invert(r(5, 6))?,
        big_b: b.phi_r_invert(r(7, 6))?,
        a,
        b,
    })
}

fn head_diff(x: &TruncatedSeries, y: &TruncatedSeries, n: usize) -> f64 {
    (0..n).fold(0.0f64, |m, k| m.max((x.coeff(k) - y.coeff(k)).abs()))
}

pub fn verify_relations(omega: &BrieskornPair, omega_t: &BrieskornPair, g: &TruncatedSeries, n: usize) -> Result<RelationResiduals> {
    if !(g.coeff(0) > 0.0) {
        return Err(Error::InvalidInput("relations need g(0) > 0".into()));
    }
    let order = [omega.alpha.order(), omega.beta.order(), omega_t.alpha.order(), omega_t.beta.order(), n.max(1) - 1]
        .into_iter()
        .max()
        .unwrap();
    let g = g.truncate(order);
    let h = g.shift_up().truncate(order);
    let jac = &g.powf(-1.0 / 6.0)? * &g.phi_r_apply(r(1, 1));
    let g13 = g.powf(1.0 / 3.0)?;
    let d = derive(omega, order)?;
    let t = derive(omega_t, order)?;
    let comp = |s: &TruncatedSeries| s.truncate(order).compose(&h);
    let area = [
        head_diff(&d.big_a, &(&g.powf(5.0 / 6.0)? * &comp(&t.big_a)?), n),
        head_diff(&d.big_b, &(&g.powf(7.0 / 6.0)? * &comp(&t.big_b)?), n),
    ];
    let characteristic = [
        head_diff(&omega.alpha.truncate(order), &(&jac * &comp(&omega_t.alpha)?), n),
        head_diff(&omega.beta.truncate(order), &(&(&g13 * &jac) * &comp(&omega_t.beta)?), n),
    ];
    let period = [
        head_diff(&d.a, &(&jac * &comp(&t.a)?), n),
        head_diff(&d.b, &(&(&g13 * &jac) * &comp(&t.b)?), n),
    ];
    Ok(RelationResiduals { area, characteristic, period, terms: n })
}

/// Normalized invariants of a positively oriented form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    /// Rescaling with `α̃ ≡ 1`.
    pub g: TruncatedSeries,
    /// `f` of the normal form `dx∧dy + f(H) y dx∧dy`.
    pub canonical_f: TruncatedSeries,
    /// Rescaling `A^{6/5}`, which makes `Ã ≡ 1`.
    pub g_area: TruncatedSeries,
    /// Constant `α̃` under `g_area`; equals `5/(6C₀)`.
    pub alpha_area: f64,
    /// `β̃` under `g_area`.
    pub beta_area: TruncatedSeries,
}

// β̃ = [β / (g^{1/3} J)] ∘ h^{−1}.
fn transformed_beta(beta: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    let jac = &g.powf(-1.0 / 6.0)? * &g.phi_r_apply(r(1, 1));
    let w = &(&g.powf(1.0 / 3.0)? * &jac).recip()? * beta;
    let hinv = g.shift_up().revert()?;
    w.truncate(hinv.order()).compose(&hinv)
}

/// `g` and `canonical_f` from `(α, β)`; needs `α(0) > 0`.
pub fn normalize_invariant(pair: &BrieskornPair) -> Result<NormalForm> {
    let order = pair.alpha.order().max(pair.beta.order()).max(DEFAULT_ORDER);
    let alpha = pair.alpha.truncate(order);
    let beta = pair.beta.truncate(order);
    if !(alpha.coeff(0) > 0.0) {
        return Err(Error::InvalidInput(format!(
            "normalization needs α(0) > 0 (positive orientation), got {}",
            alpha.coeff(0)
        )));
    }
    // α = g^{−1/6}(g′H + g) = (6/5) φ_{5/6}(g^{5/6}).
    let g = alpha.scale(&(5.0 / 6.0)).phi_r_invert(r(5, 6))?.powf(6.0 / 5.0)?;
    let c0 = constants().c0;
    let g_area = alpha.scale(&c0).phi_r_invert(r(5, 6))?.powf(6.0 / 5.0)?;
    Ok(NormalForm {
        canonical_f: transformed_beta(&beta, &g)?,
        beta_area: transformed_beta(&beta, &g_area)?,
        g,
        g_area,
        alpha_area: 5.0 / (6.0 * c0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceMode {
    /// `ψ^*H = H`.
    HPreserving,
    /// `ψ^*H = h(H)`.
    FibrationPreserving,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneDofVerdict {
    pub equivalent: bool,
    pub mode: EquivalenceMode,
    /// Largest relative coefficient difference compared.
    pub residual: f64,
    pub tolerance: f64,
    /// `g` with `h₂(H g(H)) = h₁(H)` mapping the first normal form chart to the second.
    pub witness_g: Option<TruncatedSeries>,
    /// Whether `x ↦ −x` was applied to each density to make it positive.
    pub orientation_flipped: [bool; 2],
}

/// Relative coefficient tolerance for series comparisons.
pub const SERIES_TOLERANCE: f64 = 1e-3;

fn rel_diff(x: &TruncatedSeries, y: &TruncatedSeries) -> f64 {
    let n = x.order().max(y.order()) + 1;
    (0..n).fold(0.0f64, |m, k| {
        let (a, b) = (x.coeff(k), y.coeff(k));
        m.max((a - b).abs() / a.abs().max(b.abs()).max(1.0))
    })
}

fn oriented(f: &Density) -> (Density, bool) {
    if f.is_positive() {
        (f.clone(), false)
    } else {
        (f.flip_x(), true)
    }
}

pub fn one_dof_equivalent(f1: &Density, f2: &Density, mode: EquivalenceMode) -> Result<OneDofVerdict> {
    let (f1, o1) = oriented(f1);
    let (f2, o2) = oriented(f2);
    let p1 = reduce(&f1)?.truncate(DEFAULT_ORDER);
    let p2 = reduce(&f2)?.truncate(DEFAULT_ORDER);
    let (residual, witness_g) = match mode {
        EquivalenceMode::HPreserving => (rel_diff(&p1.alpha, &p2.alpha).max(rel_diff(&p1.beta, &p2.beta)), None),
        EquivalenceMode::FibrationPreserving => {
            let n1 = normalize_invariant(&p1)?;
            let n2 = normalize_invariant(&p2)?;
            let h1 = n1.g.shift_up();
            let h = n2.g.shift_up().revert()?.compose(&h1)?;
            let g = TruncatedSeries::from_coeffs(h.coeffs()[1..].to_vec());
            (rel_diff(&n1.canonical_f, &n2.canonical_f), Some(g))
        }
    };
    Ok(OneDofVerdict {
        equivalent: residual <= SERIES_TOLERANCE,
        mode,
        residual,
        tolerance: SERIES_TOLERANCE,
        witness_g,
        orientation_flipped: [o1, o2],
    })
}

/// Base map `(H, λ) ↦ (H̃(H, λ), F̃(H, λ))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseMap {
    pub h: Poly2,
    pub f: Poly2,
}

impl BaseMap {
    pub fn identity() -> Self {
        Self { h: Poly2::var(0), f: Poly2::var(1) }
    }

    pub fn apply(&self, h: f64, l: f64) -> (f64, f64) {
        (self.h.eval([h, l]), self.f.eval([h, l]))
    }

    pub fn jacobian(&self, h: f64, l: f64) -> [[f64; 2]; 2] {
        [self.h.gradient([h, l]), self.f.gradient([h, l])]
    }

    /// Preimage of `(h̃, f̃)` by Newton's method started at the target.
    pub fn invert(&self, ht: f64, ft: f64) -> Result<(f64, f64)> {
        let (mut h, mut l) = (ht, ft);
        for _ in 0..100 {
            let (a, b) = self.apply(h, l);
            let (ra, rb) = (a - ht, b - ft);
            let j = self.jacobian(h, l);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-14 {
                return Err(Error::Degenerate("base map is singular".into()));
            }
            let dh = (j[1][1] * ra - j[0][1] * rb) / det;
            let dl = (j[0][0] * rb - j[1][0] * ra) / det;
            h -= dh;
            l -= dl;
            if dh.abs().max(dl.abs()) < 1e-15 {
                return Ok((h, l));
            }
        }
        Err(Error::NoConvergence("base map inversion".into()))
    }
}

/// One numerical check of a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
}

impl Check {
    fn new(name: &str, residual: f64, tolerance: f64, samples: usize) -> Self {
        Self { name: name.into(), residual, tolerance, passed: residual <= tolerance, samples }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub equivalent: bool,
    pub checks: Vec<Check>,
    /// μ-shift `k` with `I_μ = Ĩ_μ∘φ + k I` (compact comparisons).
    pub k: Option<i64>,
    pub orientation_flipped: [bool; 2],
    /// The models fix `Ω = dX∧dy + dλ∧dφ`, so the F-flow direction always agrees.
    pub coorientation_flipped: [bool; 2],
}

/// Tolerances and sample counts for cusp-system comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    /// Relative tolerance on action values.
    pub action_tol: f64,
    /// Absolute tolerance on branch positions.
    pub branch_tol: f64,
    /// Number of λ samples (and of H samples per narrow slice).
    pub samples: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self { action_tol: 1e-5, branch_tol: 1e-8, samples: 5 }
    }
}

fn lambda_samples(model: &FibrationModel, n: usize) -> Vec<f64> {
    match model.kind {
        ModelKind::CuspCompact => linear_grid(-0.05, -0.01, n),
        _ => linear_grid(-0.5, -0.1, n),
    }
}

fn orient_model(m: &FibrationModel) -> (FibrationModel, bool) {
    let (density, flipped) = oriented(&m.density);
    (FibrationModel { density, ..m.clone() }, flipped)
}

fn branch_check(s1: &FibrationModel, s2: &FibrationModel, phi: &BaseMap, opts: &CompareOptions) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for l in lambda_samples(s1, opts.samples) {
        for c in s1.critical_values(l)? {
            if c.kind == CriticalKind::Degenerate {
                continue;
            }
            let (ht, lt) = phi.apply(c.h, l);
            let d = s2
                .critical_values(lt)?
                .iter()
                .filter(|c2| c2.kind == c.kind)
                .map(|c2| (c2.h - ht).abs())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
            count += 1;
        }
    }
    // The cusp point maps to the cusp point.
    let (h0, l0) = phi.apply(0.0, 0.0);
    worst = worst.max(h0.hypot(l0));
    Ok(Check::new("bifurcation diagram", worst, opts.branch_tol, count + 1))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn narrow_points(s1: &FibrationModel, opts: &CompareOptions) -> Result<Vec<(f64, f64)>> {
    let mut pts = Vec::new();
    for l in lambda_samples(s1, opts.samples) {
        if let Some((e, s)) = s1.swallowtail_bounds(l)? {
            for t in linear_grid(0.15, 0.85, opts.samples) {
                pts.push((e + t * (s - e), l));
            }
        }
    }
    Ok(pts)
}

fn action_checks(s1: &FibrationModel, s2: &FibrationModel, phi: &BaseMap, opts: &CompareOptions, tol: Tolerance) -> Result<Vec<Check>> {
    let pts = narrow_points(s1, opts)?;
    let diffs = pts
        .par_iter()
        .map(|&(h, l)| {
            let (ht, lt) = phi.apply(h, l);
            let di = (l - lt).abs();
            if s2.stratum(ht, lt) != Stratum::Narrow {
                return Ok((di, f64::INFINITY));
            }
            let a = loop_action(s1, h, l, tol)?;
            let b = loop_action(s2, ht, lt, tol)?;
            Ok((di, rel(a, b)))
        })
        .collect::<Result<Vec<_>>>()?;
    let di = diffs.iter().fold(0.0f64, |m, d| m.max(d.0));
    let dc = diffs.iter().fold(0.0f64, |m, d| m.max(d.1));
    Ok(vec![
        Check::new("I = Ĩ∘φ", di, opts.branch_tol, pts.len()),
        Check::new("I∘ = Ĩ∘∘φ", dc, opts.action_tol, pts.len()),
    ])
}

fn check_phi(phi: &BaseMap) -> Result<()> {
    let j = phi.jacobian(0.0, 0.0);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det.abs() > 1e-12) {
        return Err(Error::Degenerate(format!("base map has det Dφ(0) = {det}")));
    }
    Ok(())
}

/// Verifies that `φ` respects the bifurcation diagrams and preserves `I` and `I∘`.
pub fn parabolic_equivalent(
    s1: &FibrationModel,
    s2: &FibrationModel,
    phi: &BaseMap,
    opts: &CompareOptions,
    tol: Tolerance,
) -> Result<Verdict> {
    if !(s1.is_cusp() && s2.is_cusp()) {
        return Err(Error::InvalidInput("parabolic comparison needs cusp models".into()));
    }
    check_phi(phi)?;
    let (s1, o1) = orient_model(s1);
    let (s2, o2) = orient_model(s2);
    let mut checks = vec![branch_check(&s1, &s2, phi, opts)?];
    checks.extend(action_checks(&s1, &s2, phi, opts, tol)?);
    Ok(Verdict {
        equivalent: checks.iter().all(|c| c.passed),
        checks,
        k: None,
        orientation_flipped: [o1, o2],
        coorientation_flipped: [false, false],
    })
}

fn wide_points(s1: &FibrationModel) -> Vec<(f64, f64)> {
    let grid = GridSpec { h_range: (-0.05, 0.05), lambda_range: (-0.04, 0.04), nh: 5, nl: 5 };
    grid.points().into_iter().filter(|&(h, l)| s1.stratum(h, l) == Stratum::Wide).collect()
}

/// [`parabolic_equivalent`] plus a search for `k ∈ k_range` with
/// `I_μ = Ĩ_μ∘φ + k I` on the wide stratum.
pub fn cusp_torus_equivalent(
    s1: &FibrationModel,
    s2: &FibrationModel,
    phi: &BaseMap,
    k_range: (i64, i64),
    opts: &CompareOptions,
    tol: Tolerance,
) -> Result<Verdict> {
    if s1.kind != ModelKind::CuspCompact || s2.kind != ModelKind::CuspCompact {
        return Err(Error::InvalidInput("cusp-torus comparison needs two compact models".into()));
    }
    if k_range.0 > k_range.1 {
        return Err(Error::InvalidInput(format!("empty k range {k_range:?}")));
    }
    let mut v = parabolic_equivalent(s1, s2, phi, opts, tol)?;
    let (s1, _) = orient_model(s1);
    let (s2, _) = orient_model(s2);
    let pts = wide_points(&s1);
    let vals = pts
        .par_iter()
        .map(|&(h, l)| {
            let (ht, lt) = phi.apply(h, l);
            if s2.stratum(ht, lt) != Stratum::Wide {
                return Ok(None);
            }
            let a = wide_action(&s1, h, l, s1.mu_shift, tol)?;
            let b = wide_action(&s2, ht, lt, s2.mu_shift, tol)?;
            Ok(Some((a, b, l)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = (f64::INFINITY, None);
    for k in k_range.0..=k_range.1 {
        let worst = vals.iter().fold(0.0f64, |m, v| match v {
            Some((a, b, l)) => m.max(rel(*a, b + k as f64 * l)),
            None => f64::INFINITY,
        });
        if worst < best.0 {
            best = (worst, Some(k));
        }
    }
    let check = Check::new("I_μ = Ĩ_μ∘φ + kI", best.0, opts.action_tol, pts.len());
    v.k = if check.passed { best.1 } else { None };
    v.checks.push(check);
    v.equivalent = v.checks.iter().all(|c| c.passed);
    Ok(v)
}

/// Invariants of the λ = 0 slice in the one-degree chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneDofInvariants {
    pub alpha: TruncatedSeries,
    pub beta: TruncatedSeries,
    pub canonical_f: TruncatedSeries,
    pub g: TruncatedSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub one_dof: OneDofInvariants,
    /// `(λ, h(λ))`.
    pub h_samples: Vec<(f64, f64)>,
    /// `(λ, α(λ))`: logarithmic coefficient of Π∘ at the hyperbolic branch.
    pub log_coeffs: Vec<(f64, f64)>,
    pub orientation_flipped: bool,
    pub coorientation_flipped: bool,
}

/// Total degree kept when the λ = 0 slice is expanded in the one-degree chart.
const BRIDGE_DEGREE: u32 = 21;

/// The λ = 0 slice of a cusp model in coordinates `(u, v)` with
/// `H_cusp = −(v³ − u²)`, as a truncated polynomial density.
///
/// With `Y(y) = W₀(y)^{1/3}` and `y = Ψ(Y)`, the chart is `x = −u`, `Y = −v`;
/// it preserves orientation, and the density becomes `f(−u, Ψ(−v), 0) Ψ′(−v)`.
pub fn one_dof_slice(model: &FibrationModel) -> Result<Density> {
    let d = BRIDGE_DEGREE as usize;
    let psi = match model.kind {
        ModelKind::CuspLocal => TruncatedSeries::monomial(1.0, 1, d),
        ModelKind::CuspCompact => {
            // Y = y (1 + y)^{1/3}
            let root = TruncatedSeries::from_coeffs(vec![1.0, 1.0]).truncate(d).powf(1.0 / 3.0)?;
            root.shift_up().truncate(d).revert()?
        }
        _ => return Err(Error::InvalidInput("one-degree slice needs a cusp model".into())),
    };
    let neg = |s: &TruncatedSeries| -> Poly3 {
        Poly3::from_terms(s.coeffs().iter().enumerate().map(|(k, c)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            ([0, k as u32, 0], sign * c)
        }))
    };
    let y_of_v = neg(&psi);
    let dpsi = neg(&psi.derivative());
    let u = Poly3::var(0).scale(-1.0);
    let sliced = model.density.poly().fix(2, 0.0).compose(&[u, y_of_v, Poly3::zero()]);
    let full = &sliced * &dpsi;
    Ok(Density::new(Poly3::from_terms(
        full.terms().iter().filter(|(e, _)| e[0] + e[1] <= BRIDGE_DEGREE).map(|(e, c)| (*e, *c)),
    )))
}

pub fn invariant_report(model: &FibrationModel, tol: Tolerance) -> Result<InvariantReport> {
    let (model, flipped) = orient_model(model);
    let pair = reduce(&one_dof_slice(&model)?)?.truncate(DEFAULT_ORDER);
    let nf = normalize_invariant(&pair)?;
    let lambdas = match model.kind {
        ModelKind::CuspCompact => vec![-0.04, -0.03, -0.02],
        _ => vec![-1.0, -0.75, -0.5],
    };
    let h_samples = lambdas
        .iter()
        .map(|&l| Ok((l, separatrix_action(&model, l, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    let log_coeffs = lambdas
        .par_iter()
        .map(|&l| {
            let s0 = 0.05 * (-l).powf(1.5);
            Ok((l, hyperbolic_log_coeff(&model, l, LogSource::Loop, s0, 10, tol)?.alpha))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantReport {
        one_dof: OneDofInvariants { alpha: pair.alpha, beta: pair.beta, canonical_f: nf.canonical_f, g: nf.g },
        h_samples,
        log_coeffs,
        orientation_flipped: flipped,
        coorientation_flipped: false,
    })
}
