use std::f64::consts::PI;

use cuspidal::flows::{phase_distance, trajectory, trajectory_csv, Generator, SymplecticModel, TRAJECTORY_HEADER};
use cuspidal::flows::torus_point;
use cuspidal::model::Stratum;
use cuspidal::{Density, FibrationModel, ModelKind};

fn model() -> SymplecticModel {
    let f = Density::from_terms(&[(1.0, [0, 0, 0]), (0.1, [0, 1, 0])]);
    SymplecticModel::new(FibrationModel::new(ModelKind::CuspLocal, f)).unwrap()
}

#[test]
fn field_solves_the_defining_equation() {
    let sm = model();
    for p in [[0.1, -0.3, -0.2, 0.0], [0.0, 0.2, 0.05, 1.0]] {
        for g in [Generator::H, Generator::F] {
            let v = sm.hamiltonian_field(g, &p).unwrap();
            assert!(sm.field_residual(g, &p, &v) < 1e-12);
        }
    }
}

#[test]
fn h_and_f_are_conserved_on_a_narrow_torus() {
    let sm = model();
    let l = -0.1;
    let (e, s) = sm.model().swallowtail_bounds(l).unwrap().unwrap();
    let h = 0.5 * (e + s);
    let p = torus_point(sm.model(), h, l, Stratum::Narrow).unwrap();
    let rows = trajectory(&sm, &p, Generator::H, 50.0, 100).unwrap();
    for r in &rows {
        assert!((r.h - h).abs() < 1e-8, "H drift at t = {}", r.t);
        assert!((r.f - l).abs() < 1e-12);
    }
    let csv = trajectory_csv(&rows);
    assert_eq!(csv.lines().next(), Some(TRAJECTORY_HEADER));
}

#[test]
fn f_flow_is_2pi_periodic() {
    let sm = model();
    let p = [0.1, -0.3, -0.2, 0.4];
    let q = sm.flow(&p, Generator::F, 2.0 * PI).unwrap();
    assert!(phase_distance(&p, &q) < 1e-9);
    let half = sm.flow(&p, Generator::F, PI).unwrap();
    assert!(phase_distance(&p, &half) > 1.0);
}

#[test]
fn flows_commute() {
    let sm = model();
    let p = [0.1, -0.3, -0.2, 0.4];
    let a = sm.flow(&sm.flow(&p, Generator::H, 0.7).unwrap(), Generator::F, 1.3).unwrap();
    let b = sm.flow(&sm.flow(&p, Generator::F, 1.3).unwrap(), Generator::H, 0.7).unwrap();
    assert!(phase_distance(&a, &b) < 1e-9);
}
