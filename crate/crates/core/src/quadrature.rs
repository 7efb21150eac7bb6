// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Gauss-Kronrod (7/15) quadrature for matrix-valued integrands.

// Tabulated constants are kept at their published precision.
#![allow(clippy::excessive_precision)]

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

// Kronrod abscissae on [-1, 1] (positive half, descending); odd indices are
// the Gauss points.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Number of initial panels graded geometrically toward `a`, so that
    /// boundary layers at the lower limit are seen by the first estimate.
    /// Zero starts from the single panel `[a, b]`.
    pub grading: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 400, grading: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct Quadrature {
    pub value: ComplexMatrix,
    /// Sum of per-interval `||K15 - G7||_F` estimates.
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: ComplexMatrix,
    error: f64,
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<ComplexMatrix>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid)?;
    let mut kron = fc.scale_re(WGK[7]);
    let mut gauss = fc.scale_re(WG[3]);
    for k in 0..7 {
        let dx = half * XGK[k];
        let sum = &f(mid - dx)? + &f(mid + dx)?;
        kron += &sum.scale_re(WGK[k]);
        if k % 2 == 1 {
            gauss += &sum.scale_re(WG[k / 2]);
        }
    }
    let value = kron.scale_re(half);
    let error = (&value - &gauss.scale_re(half)).norm_fro();
    Ok(Panel { a, b, value, error })
}

/// `int_a^b f(t) dt`, bisecting the panel with the largest error estimate
/// until the total estimate is below `max(abs_tol, rel_tol * ||value||_F)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<ComplexMatrix>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite limits [{a}, {b}]")));
    }
    let mut panels: Vec<Panel> = Vec::new();
    let mut hi = b;
    for _ in 0..opts.grading {
        let lo = a + 0.5 * (hi - a);
        if !(lo > a && lo < hi) {
            break;
        }
        panels.push(gauss_kronrod(&mut f, lo, hi)?);
        hi = lo;
    }
    panels.push(gauss_kronrod(&mut f, a, hi)?);
    let mut evaluations = 15 * panels.len();
    loop {
        let mut value = panels[0].value.clone();
        for p in &panels[1..] {
            value += &p.value;
        }
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= opts.abs_tol.max(opts.rel_tol * value.norm_fro()) {
            return Ok(Quadrature { value, error, evaluations, intervals: panels.len() });
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::Quadrature(format!("error estimate {error:e} after {} intervals", panels.len())));
        }
        let worst =
            panels.iter().enumerate().fold(0, |best, (i, p)| if p.error > panels[best].error { i } else { best });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::Quadrature("interval became too small to bisect".into()));
        }
        panels.push(gauss_kronrod(&mut f, p.a, mid)?);
        panels.push(gauss_kronrod(&mut f, mid, p.b)?);
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, ComplexMatrix};

    fn scalar(x: f64) -> ComplexMatrix {
        ComplexMatrix::from_real(1, 1, &[x]).unwrap()
    }

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|t| Ok(scalar(t * t * t - 2.0 * t)), 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((q.value[(0, 0)].re - 0.0).abs() < 1e-13);
        assert_eq!(q.intervals, 1);
    }

    #[test]
    fn resolves_a_boundary_layer() {
        // int_0^1 exp(-t/eps) dt = eps (1 - exp(-1/eps)).
        let eps = 1e-4;
        let opts = QuadOptions { grading: 30, ..QuadOptions::default() };
        let q = integrate(|t| Ok(scalar(libm::exp(-t / eps))), 0.0, 1.0, opts).unwrap();
        assert!((q.value[(0, 0)].re - eps).abs() < 1e-12);
    }

    #[test]
    fn matrix_exponential_integral() {
        // int_0^T e^{tA} dt = A^{-1}(e^{TA} - I) for invertible A.
        let a = ComplexMatrix::from_real(2, 2, &[-1.0, 0.5, 0.0, -2.0]).unwrap();
        let q = integrate(|t| expm(&a, t), 0.0, 3.0, QuadOptions::default()).unwrap();
        let exact = a.solve(&(&expm(&a, 3.0).unwrap() - &ComplexMatrix::identity(2))).unwrap();
        assert!(q.value.approx_eq(&exact, 1e-11));
    }

    #[test]
    fn interval_cap_reports_failure() {
        let opts = QuadOptions { abs_tol: 0.0, rel_tol: 0.0, max_intervals: 3, grading: 0 };
        let r = integrate(|t| Ok(scalar(libm::sin(50.0 * t))), 0.0, 10.0, opts);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }
}
