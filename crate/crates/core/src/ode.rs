//! Adaptive Dormand–Prince 5(4) integration of autonomous systems `y' = f(y)`
//! with optional event (section-crossing) location.

use crate::{Error, Result};

/// Step-size control settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeTolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, max_steps: 1_000_000 }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step: (5th-order solution, embedded error vector).
fn dp_step<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N]) {
    let mut k = [[0.0; N]; 7];
    k[0] = f(y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(&ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; N];
    for s in 0..7 {
        for i in 0..N {
            y5[i] += h * B5[s] * k[s][i];
            err[i] += h * (B5[s] - B4[s]) * k[s][i];
        }
    }
    (y5, err)
}

fn error_norm<const N: usize>(y: &[f64; N], y_new: &[f64; N], err: &[f64; N], tol: &OdeTolerance) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        s += (err[i] / sc).powi(2);
    }
    (s / N as f64).sqrt()
}

/// Integrates from time 0 to `t` (which may be negative). `in_domain` is
/// checked after every accepted step; leaving it is an error.
pub fn integrate<const N: usize>(
    f: impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    t: f64,
    tol: OdeTolerance,
    in_domain: impl Fn(&[f64; N]) -> bool,
) -> Result<[f64; N]> {
    let mut no_event = |_: &[f64; N]| 1.0;
    match run(&f, y0, t, tol, &in_domain, &mut no_event)? {
        Outcome::Finished(y) => Ok(y),
        Outcome::Event(..) => unreachable!("constant event function"),
    }
}

/// Integrates until `event` changes sign (first crossing after the start),
/// or until `t_max` is reached. Returns the crossing time and state.
pub fn integrate_to_event<const N: usize>(
    f: impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_max: f64,
    tol: OdeTolerance,
    in_domain: impl Fn(&[f64; N]) -> bool,
    event: impl Fn(&[f64; N]) -> f64,
) -> Result<Option<(f64, [f64; N])>> {
    let mut ev = |y: &[f64; N]| event(y);
    match run(&f, y0, t_max, tol, &in_domain, &mut ev)? {
        Outcome::Finished(_) => Ok(None),
        Outcome::Event(t, y) => Ok(Some((t, y))),
    }
}

enum Outcome<const N: usize> {
    Finished([f64; N]),
    Event(f64, [f64; N]),
}

fn run<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    tol: OdeTolerance,
    in_domain: &impl Fn(&[f64; N]) -> bool,
    event: &mut impl FnMut(&[f64; N]) -> f64,
) -> Result<Outcome<N>> {
    if t_end == 0.0 {
        return Ok(Outcome::Finished(y0));
    }
    let dir = t_end.signum();
    let span = t_end.abs();
    let mut y = y0;
    let mut t = 0.0;
    let mut h = (span * 1e-3).min(1e-2);
    let mut g_prev = event(&y);
    for _ in 0..tol.max_steps {
        if t >= span {
            return Ok(Outcome::Finished(y));
        }
        let last = t + h >= span;
        let step = if last { span - t } else { h };
        let (y_new, err) = dp_step(f, &y, dir * step);
        let en = error_norm(&y, &y_new, &err, &tol);
        if !en.is_finite() {
            h = step * 0.1;
            continue;
        }
        if en <= 1.0 {
            let g_new = event(&y_new);
            if g_prev != 0.0 && (g_new == 0.0 || (g_new < 0.0) != (g_prev < 0.0)) {
                return locate(f, y, t, step, dir, g_prev, event).map(|(tc, yc)| Outcome::Event(dir * tc, yc));
            }
            if !in_domain(&y_new) {
                return Err(Error::Domain(format!(
                    "trajectory left the model domain at t = {}",
                    dir * (t + step)
                )));
            }
            t = if last { span } else { t + step };
            y = y_new;
            g_prev = g_new;
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h = step * fac;
        if h < 1e-14 * span.max(1.0) {
            return Err(Error::NoConvergence(format!("step size underflow at t = {}", dir * t)));
        }
    }
    Err(Error::NoConvergence("maximum number of ODE steps exceeded".into()))
}

/// Bisection on the step length from the last accepted state.
fn locate<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y: [f64; N],
    t: f64,
    step: f64,
    dir: f64,
    g0: f64,
    event: &mut impl FnMut(&[f64; N]) -> f64,
) -> Result<(f64, [f64; N])> {
    let mut lo = 0.0;
    let mut hi = step;
    let mut y_hi = dp_step(f, &y, dir * step).0;
    for _ in 0..100 {
        if hi - lo <= 1e-13 * (t + hi).abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let ym = dp_step(f, &y, dir * mid).0;
        let g = event(&ym);
        if g == 0.0 {
            return Ok((t + mid, ym));
        }
        if (g < 0.0) == (g0 < 0.0) {
            lo = mid;
        } else {
            hi = mid;
            y_hi = ym;
        }
    }
    Ok((t + hi, y_hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |y: &[f64; 2]| [y[1], -y[0]];
        let tau = 2.0 * std::f64::consts::PI;
        let y = integrate(f, [1.0, 0.0], tau, OdeTolerance::default(), |_| true).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
        let back = integrate(f, y, -tau, OdeTolerance::default(), |_| true).unwrap();
        assert!((back[0] - 1.0).abs() < 1e-10 && back[1].abs() < 1e-10);
    }

    #[test]
    fn event_location() {
        // x(t) = cos t crosses zero at π/2.
        let f = |y: &[f64; 2]| [y[1], -y[0]];
        let (t, y) = integrate_to_event(f, [1.0, 0.0], 10.0, OdeTolerance::default(), |_| true, |y| y[0])
            .unwrap()
            .unwrap();
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
        assert!(y[0].abs() < 1e-11);
        let none = integrate_to_event(f, [1.0, 0.0], 1.0, OdeTolerance::default(), |_| true, |y| y[0]).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn domain_exit() {
        let f = |_: &[f64; 1]| [1.0];
        let r = integrate(f, [0.0], 5.0, OdeTolerance::default(), |y| y[0] < 2.0);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
