//! Globally adaptive Gauss–Kronrod (21-point) integration on a finite
//! interval. Bisection always picks the interval with the largest error
//! estimate, lowest index first, so results do not depend on anything but
//! the inputs.

use crate::error::{Error, Result};

use super::rules::{WG10, WGK21, XGK21};

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            rel,
            abs: 0.0,
            max_intervals: 4000,
        }
    }

    pub fn with_abs(self, abs: f64) -> Self {
        Self { abs, ..self }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Piece {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut resk = fc * WGK21[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK21[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK21[j] * (f1 + f2);
        resabs += WGK21[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG10[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK21[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK21[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Piece { a, b, value, error }
}

/// ∫_a^b f, starting from `panels` equal sub-intervals.
///
/// Fails with [`Error::NonConvergence`] (labelled `what`) when the interval
/// budget runs out before the error bound meets the tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    tol: Tolerance,
    what: &'static str,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut pieces: Vec<Piece> = (0..panels)
        .map(|j| {
            let lo = a + h * j as f64;
            let hi = if j + 1 == panels { b } else { a + h * (j + 1) as f64 };
            gk21(&mut f, lo, hi)
        })
        .collect();
    let mut evaluations = 21 * panels;

    loop {
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence {
                what,
                estimate: value,
                error_bound: error,
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (j, p)| {
                if p.error > acc.1 {
                    (j, p.error)
                } else {
                    acc
                }
            });
        let p = pieces[worst];
        let mid = 0.5 * (p.a + p.b);
        if pieces.len() >= tol.max_intervals || mid <= p.a || mid >= p.b {
            return Err(Error::NonConvergence {
                what,
                estimate: value,
                error_bound: error,
            });
        }
        pieces[worst] = gk21(&mut f, p.a, mid);
        pieces.push(gk21(&mut f, mid, p.b));
        evaluations += 42;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn smooth_integrands() {
        let e = integrate(|x| x.sin(), 0.0, PI, 1, Tolerance::relative(1e-13), "sin").unwrap();
        assert!((e.value - 2.0).abs() < 1e-13);
        let e = integrate(|x| (-x * x).exp(), -10.0, 10.0, 3, Tolerance::relative(1e-12), "g")
            .unwrap();
        assert!((e.value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn peaked_and_singular_integrands() {
        let e = integrate(
            |x| 1.0 / (1.0 + 1e6 * (x - 0.3).powi(2)),
            0.0,
            1.0,
            1,
            Tolerance::relative(1e-10),
            "lorentz",
        )
        .unwrap();
        let want = ((0.7e3f64).atan() + (0.3e3f64).atan()) / 1e3;
        assert!((e.value - want).abs() < 1e-10 * want);
        let e = integrate(|x| x.sqrt().ln(), 0.0, 1.0, 1, Tolerance::relative(1e-9), "log")
            .unwrap();
        assert!((e.value + 0.5).abs() < 1e-9);
    }

    #[test]
    fn error_bound_is_honest() {
        let e = integrate(|x| (10.0 * x).cos(), 0.0, 3.0, 2, Tolerance::relative(1e-8), "c")
            .unwrap();
        let want = (30.0f64).sin() / 10.0;
        assert!((e.value - want).abs() <= e.error.max(1e-15));
    }

    #[test]
    fn zero_integrand_and_empty_interval() {
        let e = integrate(|_| 0.0, -1.0, 1.0, 4, Tolerance::relative(1e-12), "z").unwrap();
        assert_eq!(e.value, 0.0);
        let e = integrate(|x| x, 2.0, 2.0, 4, Tolerance::relative(1e-12), "z").unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let tol = Tolerance {
            rel: 1e-15,
            abs: 0.0,
            max_intervals: 3,
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, 1, tol, "wild").unwrap_err();
        match err {
            Error::NonConvergence {
                what,
                estimate,
                error_bound,
            } => {
                assert_eq!(what, "wild");
                assert!(estimate.is_finite() && error_bound > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * 3.7).sin() * (-x).exp() + 1.0 / (1.0 + 400.0 * x * x);
        let a = integrate(f, -2.0, 5.0, 3, Tolerance::relative(1e-11), "d").unwrap();
        let b = integrate(f, -2.0, 5.0, 3, Tolerance::relative(1e-11), "d").unwrap();
        assert_eq!(a, b);
    }
}
