use approx::assert_relative_eq;

use cuspidal::brieskorn::{reduce, reduce_exact};
use cuspidal::gk::Tolerance;
use cuspidal::quadrature::{oval_area, oval_period, Oval};
use cuspidal::specfun::{constants, gamma, hyp2f1};
use cuspidal::{Density, FibrationModel, ModelKind};

#[test]
fn gamma_known_values() {
    assert_relative_eq!(gamma(0.5).unwrap(), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
    assert!(gamma(-2.0).is_err());
}

#[test]
fn hyp2f1_elementary_cases() {
    let z: f64 = 0.3;
    assert_relative_eq!(hyp2f1(1.0, 1.0, 2.0, z).unwrap(), -(1.0 - z).ln() / z, max_relative = 1e-13);
    assert_relative_eq!(hyp2f1(0.5, 1.0, 1.0, z).unwrap(), (1.0 - z).powf(-0.5), max_relative = 1e-13);
}

#[test]
fn constants_match_gamma_closed_forms() {
    let c = constants();
    assert_relative_eq!(c.c0, 2.428_650_647_887_581_6, max_relative = 1e-14);
    assert_relative_eq!(c.c1, -1.493_668_400_444_373_7, max_relative = 1e-14);
}

#[test]
fn reduction_is_linear() {
    let f = Density::from_terms(&[(1.0, [0, 0, 0]), (0.5, [2, 1, 0])]);
    let g = Density::from_terms(&[(-0.3, [0, 4, 0]), (2.0, [1, 1, 0])]);
    let (pf, pg, ps) = (reduce(&f).unwrap(), reduce(&g).unwrap(), reduce(&f.add(&g)).unwrap());
    for k in 0..4 {
        assert_relative_eq!(ps.alpha.coeff(k), pf.alpha.coeff(k) + pg.alpha.coeff(k), epsilon = 1e-14);
        assert_relative_eq!(ps.beta.coeff(k), pf.beta.coeff(k) + pg.beta.coeff(k), epsilon = 1e-14);
    }
    assert!(reduce_exact(&f).is_ok());
}

#[test]
fn period_is_the_area_derivative() {
    let m = FibrationModel::new(ModelKind::CuspLocal, Density::constant(1.0));
    let tol = Tolerance::tight();
    let (h, l, s) = (-0.01, -0.2, 1e-4);
    let d = (oval_area(&m, h + s, l, Oval::Narrow, tol).unwrap() - oval_area(&m, h - s, l, Oval::Narrow, tol).unwrap()) / (2.0 * s);
    assert_relative_eq!(oval_period(&m, h, l, Oval::Narrow, tol).unwrap(), d, max_relative = 1e-6);
}
