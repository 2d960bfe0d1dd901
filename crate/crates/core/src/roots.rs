//! Real roots of univariate real polynomials.
//!
//! Roots are isolated recursively: the critical points (roots of `P'`) split
//! the line into monotone pieces, each holding at most one simple root, which
//! is then found by bisection to full precision. A critical point where `P`
//! vanishes to within the relative threshold is reported as a multiple root.

/// Default relative threshold below which `|P(c)|` at a critical point counts as zero.
pub const MULTIPLE_ROOT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    /// True for a root of multiplicity at least two.
    pub multiple: bool,
}

/// Evaluates `Σ c_i x^i`.
pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

// Scale of |P| near x; never smaller than the coefficient norm so that
// roots at the origin are judged against the polynomial's size.
fn magnitude(c: &[f64], x: f64) -> f64 {
    let r = x.abs().max(1.0);
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.abs())
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| k as f64 * a)
        .collect()
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner(c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All distinct real roots of `Σ c_i x^i` in increasing order.
pub fn real_roots(c: &[f64]) -> Vec<Root> {
    real_roots_tol(c, MULTIPLE_ROOT_TOL)
}

pub fn real_roots_tol(c: &[f64], tol: f64) -> Vec<Root> {
    let n = match c.iter().rposition(|a| *a != 0.0) {
        Some(n) => n,
        None => return Vec::new(),
    };
    let c = &c[..=n];
    match n {
        0 => return Vec::new(),
        1 => return vec![Root { x: -c[0] / c[1], multiple: false }],
        _ => {}
    }
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, a| m.max((a / c[n]).abs()));
    let crit: Vec<f64> = real_roots_tol(&derivative(c), tol)
        .into_iter()
        .map(|r| r.x)
        .collect();

    // Knots with their (possibly snapped-to-zero) values.
    let mut knots: Vec<(f64, f64, bool)> = Vec::with_capacity(crit.len() + 2);
    knots.push((-bound, horner(c, -bound), false));
    for &x in &crit {
        let v = horner(c, x);
        let zero = v.abs() <= tol * magnitude(c, x);
        knots.push((x, if zero { 0.0 } else { v }, zero));
    }
    knots.push((bound, horner(c, bound), false));

    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (a, fa, _) = w[0];
        let (b, fb, zb) = w[1];
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            out.push(Root { x: bisect(c, a, b), multiple: false });
        }
        if zb {
            out.push(Root { x: b, multiple: true });
        }
    }
    out.dedup_by(|p, q| p.x == q.x);
    out
}
