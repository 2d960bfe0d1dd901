//! Fibration models, symplectic densities, bifurcation diagrams, canonical
//! base coordinates and the parabolic-point checker.
//!
//! Phase-space coordinates of the reduced models are `(x, y, λ)`; the second
//! integral is always `F = λ`. The Hamiltonians are
//!
//! | kind          | `H`                    |
//! |---------------|------------------------|
//! | `CuspLocal`   | `x² + y³ + λy`         |
//! | `CuspCompact` | `x² + y⁴ + y³ + λy`    |
//! | `OneDof`      | `y³ − x²`              |
//! | `Node`        | `xy`                   |
//!
//! For the two cusp models `H = x² + W(y)` with potential `W`.

use nalgebra::{Matrix2, Matrix3, SVD};
use serde::{Deserialize, Serialize};

use crate::poly::{Poly2, Poly3};
use crate::roots::{horner, real_roots};
use crate::series::TruncatedSeries;
use crate::{Error, Result};

/// Density `f(x, y, λ)` of the reduced symplectic form `ω_λ = f dx∧dy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Density(Poly3);

impl Density {
    pub fn new(p: Poly3) -> Self {
        Self(p)
    }

    pub fn constant(c: f64) -> Self {
        Self(Poly3::constant(c))
    }

    /// Builds `Σ c·x^i y^j λ^k` from `(c, [i, j, k])` pairs.
    pub fn from_terms(terms: &[(f64, [u32; 3])]) -> Self {
        Self(Poly3::from_terms(terms.iter().map(|(c, e)| (*e, *c))))
    }

    pub fn poly(&self) -> &Poly3 {
        &self.0
    }

    pub fn eval(&self, x: f64, y: f64, lambda: f64) -> f64 {
        self.0.eval([x, y, lambda])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    /// Gauge primitive `X` with `∂X/∂x = f` and `X(0, y, λ) = 0`.
    pub fn primitive(&self) -> Poly3 {
        self.0.antideriv(0)
    }

    /// `f(−x, y, λ)`, the density after the orientation flip `x ↦ −x`
    /// (including the sign of the Jacobian).
    pub fn flip_x(&self) -> Self {
        Self(Poly3::from_terms(self.0.terms().iter().map(|(e, c)| {
            let s = if e[0] % 2 == 0 { -1.0 } else { 1.0 };
            (*e, s * c)
        })))
    }

    /// `f(x, −y, λ)` without the Jacobian sign.
    pub fn reflect_y(&self) -> Self {
        Self(Poly3::from_terms(self.0.terms().iter().map(|(e, c)| {
            let s = if e[1] % 2 == 0 { 1.0 } else { -1.0 };
            (*e, s * c)
        })))
    }

    /// True when `f(0, 0, 0) > 0`.
    pub fn is_positive(&self) -> bool {
        self.eval(0.0, 0.0, 0.0) > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[serde(alias = "CuspLocal")]
    CuspLocal,
    #[serde(alias = "CuspCompact")]
    CuspCompact,
    #[serde(alias = "OneDof")]
    OneDof,
    #[serde(alias = "Node")]
    Node,
}

fn default_x0() -> f64 {
    1.0
}

/// Default base-domain radius of the compact model; keeps the auxiliary
/// elliptic value `−27/256` out of the domain.
pub const COMPACT_BASE_RADIUS: f64 = 0.1;

/// Critical points of the compact model with `|y|` below this belong to the cusp germ.
const LOCAL_WINDOW: f64 = 0.5;

/// A Hamiltonian model together with its density and conventions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibrationModel {
    pub kind: ModelKind,
    pub density: Density,
    /// Sections sit at `x = ±x0`.
    #[serde(default = "default_x0")]
    pub x0: f64,
    /// Representative of `I_μ` (adds `mu_shift·λ`).
    #[serde(default)]
    pub mu_shift: i64,
}

/// Type of a critical point of `W_λ` (equivalently of `H` on a λ-slice).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub y: f64,
    pub h: f64,
    pub kind: CriticalKind,
}

/// Regions of the base used to decide which tori exist over a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    /// Inside the swallow-tail: a narrow torus (and, for the compact model,
    /// a wide torus) lies over the point.
    Narrow,
    /// Compact model, outside the swallow-tail: a single wide torus.
    Wide,
    /// On the diagram, outside the domain, or no compact fiber.
    Outside,
}

impl std::fmt::Display for Stratum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stratum::Narrow => "narrow",
            Stratum::Wide => "wide",
            Stratum::Outside => "outside",
        })
    }
}

impl std::str::FromStr for Stratum {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "narrow" => Ok(Stratum::Narrow),
            "wide" => Ok(Stratum::Wide),
            "outside" => Ok(Stratum::Outside),
            _ => Err(Error::InvalidInput(format!("unknown stratum {s:?}"))),
        }
    }
}

impl FibrationModel {
    pub fn new(kind: ModelKind, density: Density) -> Self {
        Self { kind, density, x0: 1.0, mu_shift: 0 }
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_mu_shift(mut self, k: i64) -> Self {
        self.mu_shift = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0 && self.x0.is_finite()) {
            return Err(Error::InvalidInput(format!("section offset x0 = {} must be positive", self.x0)));
        }
        Ok(())
    }

    /// `H` as a polynomial in `(x, y, λ)`.
    pub fn hamiltonian(&self) -> Poly3 {
        let x = Poly3::var(0);
        let y = Poly3::var(1);
        let l = Poly3::var(2);
        let x2 = &x * &x;
        match self.kind {
            ModelKind::CuspLocal => &(&x2 + &y.pow(3)) + &(&l * &y),
            ModelKind::CuspCompact => &(&(&x2 + &y.pow(4)) + &y.pow(3)) + &(&l * &y),
            ModelKind::OneDof => &y.pow(3) - &x2,
            ModelKind::Node => &x * &y,
        }
    }

    /// `F = λ`.
    pub fn momentum(&self) -> Poly3 {
        Poly3::var(2)
    }

    pub fn h(&self, x: f64, y: f64, lambda: f64) -> f64 {
        match self.kind {
            ModelKind::CuspLocal => x * x + y * y * y + lambda * y,
            ModelKind::CuspCompact => x * x + y * y * y * (y + 1.0) + lambda * y,
            ModelKind::OneDof => y * y * y - x * x,
            ModelKind::Node => x * y,
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self.kind, ModelKind::CuspLocal | ModelKind::CuspCompact)
    }

    fn require_cusp(&self) -> Result<()> {
        if self.is_cusp() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{:?} model has no λ-family", self.kind)))
        }
    }

    /// Coefficients (lowest first) of the potential `W_λ(y)` of a cusp model.
    pub fn potential(&self, lambda: f64) -> Result<Vec<f64>> {
        self.require_cusp()?;
        Ok(match self.kind {
            ModelKind::CuspLocal => vec![0.0, lambda, 0.0, 1.0],
            _ => vec![0.0, lambda, 0.0, 1.0, 1.0],
        })
    }

    /// Critical values of `H` on the λ-slice that belong to the cusp germ.
    pub fn critical_values(&self, lambda: f64) -> Result<Vec<CriticalValue>> {
        let compact = self.kind == ModelKind::CuspCompact;
        Ok(self
            .all_critical_values(lambda)?
            .into_iter()
            .filter(|c| !compact || c.y.abs() < LOCAL_WINDOW)
            .collect())
    }

    /// All critical values of `H` on the λ-slice (including auxiliary ones).
    pub fn all_critical_values(&self, lambda: f64) -> Result<Vec<CriticalValue>> {
        let w = self.potential(lambda)?;
        let dw: Vec<f64> = w.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        let ddw: Vec<f64> = dw.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        Ok(real_roots(&dw)
            .into_iter()
            .map(|r| {
                let curv = horner(&ddw, r.x);
                let kind = if r.multiple || curv.abs() < 1e-12 {
                    CriticalKind::Degenerate
                } else if curv > 0.0 {
                    CriticalKind::Elliptic
                } else {
                    CriticalKind::Hyperbolic
                };
                CriticalValue { y: r.x, h: horner(&w, r.x), kind }
            })
            .collect())
    }

    /// Elliptic and hyperbolic local critical values, when both exist.
    pub fn swallowtail_bounds(&self, lambda: f64) -> Result<Option<(f64, f64)>> {
        let cv = self.critical_values(lambda)?;
        let e = cv.iter().find(|c| c.kind == CriticalKind::Elliptic);
        let h = cv.iter().find(|c| c.kind == CriticalKind::Hyperbolic);
        Ok(match (e, h) {
            (Some(e), Some(h)) => Some((e.h, h.h)),
            _ => None,
        })
    }

    /// Radius of the admissible base domain around the cusp value.
    pub fn base_radius(&self) -> f64 {
        match self.kind {
            ModelKind::CuspCompact => COMPACT_BASE_RADIUS,
            _ => f64::INFINITY,
        }
    }

    /// Which tori lie over `(H, λ)`.
    pub fn stratum(&self, h: f64, lambda: f64) -> Stratum {
        if !self.is_cusp() || h.hypot(lambda) >= self.base_radius() {
            return Stratum::Outside;
        }
        let cv = match self.critical_values(lambda) {
            Ok(cv) => cv,
            Err(_) => return Stratum::Outside,
        };
        let scale = 1e-12 * (1.0 + h.abs());
        if cv.iter().any(|c| (c.h - h).abs() <= scale) {
            return Stratum::Outside;
        }
        if let Ok(Some((e, s))) = self.swallowtail_bounds(lambda) {
            if e < h && h < s {
                return Stratum::Narrow;
            }
        }
        match self.kind {
            ModelKind::CuspCompact => Stratum::Wide,
            _ => Stratum::Outside,
        }
    }
}

/// `H_hyp(λ) = 2(−λ)^{3/2}/(3√3)` for the local cusp, λ ≤ 0.
pub fn local_hyperbolic_value(lambda: f64) -> f64 {
    2.0 * (-lambda).powf(1.5) / (3.0 * 3f64.sqrt())
}

/// Sampled bifurcation diagram over an interval of λ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub cusp_point: (f64, f64),
    /// `(h, f)` samples sorted by `f`.
    pub elliptic: Vec<(f64, f64)>,
    pub hyperbolic: Vec<(f64, f64)>,
    /// Critical values of the slices that fall outside the base domain.
    pub excluded: Vec<(f64, f64)>,
    pub base_radius: f64,
}

impl BifurcationDiagram {
    /// `H² + (4/27)F³`, zero exactly on the standard diagram.
    pub fn standard_residual(h: f64, f: f64) -> f64 {
        h * h + 4.0 / 27.0 * f * f * f
    }

    /// Inside the standard swallow-tail `H² < −(4/27)F³`.
    pub fn in_standard_swallowtail(h: f64, f: f64) -> bool {
        Self::standard_residual(h, f) < 0.0
    }
}

pub fn bifurcation_diagram(model: &FibrationModel, range: (f64, f64), n: usize) -> Result<BifurcationDiagram> {
    model.require_cusp()?;
    if !(range.0 <= range.1) || n == 0 {
        return Err(Error::InvalidInput("empty λ range".into()));
    }
    let radius = model.base_radius();
    let mut out = BifurcationDiagram {
        cusp_point: (0.0, 0.0),
        elliptic: Vec::new(),
        hyperbolic: Vec::new(),
        excluded: Vec::new(),
        base_radius: radius,
    };
    for i in 0..n {
        let lambda = if n == 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        };
        for c in model.all_critical_values(lambda)? {
            let in_window = model.kind != ModelKind::CuspCompact || c.y.abs() < LOCAL_WINDOW;
            let local = in_window && c.h.hypot(lambda) < radius;
            let point = (c.h, lambda);
            match (local, c.kind) {
                (false, _) => out.excluded.push(point),
                (true, CriticalKind::Elliptic) => out.elliptic.push(point),
                (true, CriticalKind::Hyperbolic) => out.hyperbolic.push(point),
                (true, CriticalKind::Degenerate) => {}
            }
        }
    }
    Ok(out)
}

/// Change of base coordinates bringing `(H − a(F))² = −(4/27) b(F)³` to the
/// standard form `H̃² = −(4/27) F̃³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseTransform {
    pub a: TruncatedSeries,
    /// `c(λ) = b(λ)/(λ − f₀)`.
    pub c: TruncatedSeries,
    pub f0: f64,
    pub eta: f64,
}

impl BaseTransform {
    /// `(H̃, F̃) = ((H − a(F))/|c(F)|^{3/2}, η (F − f₀))`.
    pub fn apply(&self, h: f64, f: f64) -> (f64, f64) {
        let c = self.c.eval(f).abs();
        ((h - self.a.eval(f)) / c.powf(1.5), self.eta * (f - self.f0))
    }
}

/// Computes the canonical base change for the diagram `(H − a)² = −(4/27) b³`,
/// treating `a` and `b` as polynomials in λ.
pub fn canonicalize_base(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<BaseTransform> {
    let bc = b.coeffs();
    let db: Vec<f64> = bc.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect();
    // Newton from λ = 0, then confirm.
    let mut f0 = 0.0;
    for _ in 0..100 {
        let d = horner(&db, f0);
        if d == 0.0 {
            break;
        }
        let step = horner(bc, f0) / d;
        f0 -= step;
        if step.abs() < 1e-16 * (1.0 + f0.abs()) {
            break;
        }
    }
    let scale = bc.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    if horner(bc, f0).abs() > 1e-12 * scale {
        return Err(Error::Degenerate("b has no simple zero near λ = 0".into()));
    }
    let d0 = horner(&db, f0);
    if d0.abs() <= 1e-12 * scale {
        return Err(Error::Degenerate(format!("b'(f0) = 0 at f0 = {f0}: not parabolic")));
    }
    // Synthetic division b(λ) = (λ − f₀) c(λ).
    let n = bc.len() - 1;
    let mut c = vec![0.0; n.max(1)];
    if n >= 1 {
        let mut carry = 0.0;
        for k in (1..=n).rev() {
            carry = bc[k] + carry * f0;
            c[k - 1] = carry;
        }
    }
    let c = TruncatedSeries::from_coeffs(c);
    let eta = c.eval(f0).signum();
    Ok(BaseTransform { a: a.clone(), c, f0, eta })
}

/// Outcome of the parabolic-point test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParabolicVerdict {
    Parabolic,
    /// `d²H₀` does not have rank one (it is non-degenerate).
    FailsI,
    /// The cubic term `v³H₀` vanishes.
    FailsII,
    /// `d²(H − kF)` is degenerate in the full space.
    FailsIII,
    /// `d²H₀` vanishes identically.
    Rank0,
    /// `dH` and `dF` are independent: a regular point of the momentum map.
    Regular,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicReport {
    pub verdict: ParabolicVerdict,
    pub k: f64,
    pub rank_d2h0: usize,
    pub v3h0: f64,
    pub rank_d2g: usize,
}

/// Thresholds of the parabolic checker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankTolerance {
    /// Singular values below `relative · σ_max` count as zero.
    pub relative: f64,
    /// Absolute floor for `|v³H₀|` and the `dH ∥ dF` residual.
    pub absolute: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self { relative: 1e-9, absolute: 1e-9 }
    }
}

fn rank_from_singular(sv: &[f64], tol: &RankTolerance) -> usize {
    let max = sv.iter().fold(0.0f64, |m, s| m.max(*s));
    if max <= tol.absolute {
        return 0;
    }
    sv.iter().filter(|s| **s > tol.relative * max).count()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn mat_vec(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| dot(&m[i], v))
}

/// Tests the parabolic conditions for the pair `(H, F)` at `point`.
pub fn is_parabolic(h: &Poly3, f: &Poly3, point: [f64; 3], tol: RankTolerance) -> Result<ParabolicReport> {
    let gf = f.gradient(point);
    let gf2 = dot(&gf, &gf);
    if gf2.sqrt() <= tol.absolute {
        return Err(Error::Degenerate("dF vanishes at the point".into()));
    }
    let gh = h.gradient(point);
    let k = dot(&gh, &gf) / gf2;
    let resid: f64 = (0..3).map(|i| (gh[i] - k * gf[i]).powi(2)).sum::<f64>().sqrt();
    let g = h - &f.scale(k);
    let hess_g = g.hessian(point);
    let rank_d2g = {
        let m = Matrix3::from_fn(|i, j| hess_g[i][j]);
        let sv = m.singular_values();
        rank_from_singular(sv.as_slice(), &tol)
    };
    if resid > tol.absolute * (1.0 + gh.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
        return Ok(ParabolicReport {
            verdict: ParabolicVerdict::Regular,
            k,
            rank_d2h0: 0,
            v3h0: 0.0,
            rank_d2g,
        });
    }
    // Orthonormal basis of ker dF.
    let n = gf.map(|v| v / gf2.sqrt());
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let p = dot(&seed, &n);
    let mut e1: [f64; 3] = std::array::from_fn(|i| seed[i] - p * n[i]);
    let l1 = dot(&e1, &e1).sqrt();
    e1 = e1.map(|v| v / l1);
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];
    let he1 = mat_vec(&hess_g, &e1);
    let he2 = mat_vec(&hess_g, &e2);
    let m = Matrix2::new(dot(&e1, &he1), dot(&e1, &he2), dot(&e2, &he1), dot(&e2, &he2));
    let svd = SVD::new(m, false, true);
    let rank_d2h0 = rank_from_singular(svd.singular_values.as_slice(), &tol);
    let mut report = ParabolicReport {
        verdict: ParabolicVerdict::Parabolic,
        k,
        rank_d2h0,
        v3h0: 0.0,
        rank_d2g,
    };
    match rank_d2h0 {
        0 => {
            report.verdict = ParabolicVerdict::Rank0;
            return Ok(report);
        }
        2 => {
            report.verdict = ParabolicVerdict::FailsI;
            return Ok(report);
        }
        _ => {}
    }
    // Kernel direction: right singular vector of the smallest singular value.
    let vt = svd.v_t.expect("requested V^T");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
    let (c1, c2) = (vt[(imin, 0)], vt[(imin, 1)]);
    let v: [f64; 3] = std::array::from_fn(|i| c1 * e1[i] + c2 * e2[i]);
    // Second-order correction keeping the curve on the level set of F.
    let hess_f = f.hessian(point);
    let d2f_vv = dot(&v, &mat_vec(&hess_f, &v));
    let w: [f64; 3] = std::array::from_fn(|i| -d2f_vv * gf[i] / gf2);
    let t = g.third(point);
    let mut d3 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                d3 += t[i][j][l] * v[i] * v[j] * v[l];
            }
        }
    }
    let v3 = d3 + 3.0 * dot(&v, &mat_vec(&hess_g, &w));
    report.v3h0 = v3;
    if v3.abs() <= tol.absolute {
        report.verdict = ParabolicVerdict::FailsII;
    } else if rank_d2g < 3 {
        report.verdict = ParabolicVerdict::FailsIII;
    }
    Ok(report)
}

/// Runs [`is_parabolic`] before and after the base change
/// `(H, F) ↦ (H̃(H, F), F̃(H, F))`.
pub fn base_change_parabolic_test(
    h: &Poly3,
    f: &Poly3,
    point: [f64; 3],
    phi: &[Poly2; 2],
    tol: RankTolerance,
) -> Result<(ParabolicReport, ParabolicReport)> {
    let base = [h.eval(point), f.eval(point)];
    let jac = [phi[0].gradient(base), phi[1].gradient(base)];
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    let scale = jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if det.abs() <= tol.relative * scale * scale || scale == 0.0 {
        return Err(Error::Degenerate("base change is singular at the point".into()));
    }
    let comp = [h.clone(), f.clone()];
    let h2 = phi[0].compose(&comp);
    let f2 = phi[1].compose(&comp);
    let gf2 = f2.gradient(point);
    if dot(&gf2, &gf2).sqrt() <= tol.absolute {
        return Err(Error::Degenerate("dF̃ vanishes at the point".into()));
    }
    let before = is_parabolic(h, f, point, tol)?;
    let after = is_parabolic(&h2, &f2, point, tol)?;
    Ok((before, after))
}
