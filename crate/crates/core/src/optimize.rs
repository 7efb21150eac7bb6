// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Quasi-Newton ascent for smooth real objectives.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    /// Stop when `||grad|| <= grad_tol * max(1, |f|)`.
    pub grad_tol: f64,
    /// Stop after three consecutive steps improving `f` by less than
    /// `value_tol * max(1, |f|)`.
    pub value_tol: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { max_iterations: 500, grad_tol: 1e-10, value_tol: 1e-15 }
    }
}

#[derive(Clone, Debug)]
pub struct Ascent {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximize `f` from `x0`. `f` returns the value and the gradient.
///
/// Inverse-Hessian BFGS with a backtracking Armijo search; the curvature
/// update is skipped whenever `s . y` is not safely positive, which keeps the
/// approximation positive definite on nonsmooth or flat directions.
pub fn maximize<F>(mut f: F, x0: Vec<f64>, opts: BfgsOptions) -> Ascent
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut h = identity(n);
    let mut stalls = 0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        let scale = fx.abs().max(1.0);
        if norm(&g) <= opts.grad_tol * scale {
            converged = true;
            break;
        }
        iterations += 1;
        let mut p = matvec(&h, &g);
        if dot(&p, &g) <= 0.0 {
            // Lost ascent direction: restart from steepest ascent.
            h = identity(n);
            p = g.clone();
        }
        let slope = dot(&p, &g);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let (ft, gt) = f(&trial);
            if ft.is_finite() && ft >= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fxn, gn)) = accepted else {
            // No ascent possible along p at machine resolution.
            converged = norm(&g) <= 1e-6 * scale;
            break;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        // Ascent on f is descent on -f, so the curvature pair uses -grad.
        let y: Vec<f64> = g.iter().zip(&gn).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            bfgs_update(&mut h, &s, &y, sy);
        }
        let gain = fxn - fx;
        x = xn;
        fx = fxn;
        g = gn;
        if gain <= opts.value_tol * fx.abs().max(1.0) {
            stalls += 1;
            if stalls >= 3 {
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    let grad_norm = norm(&g);
    Ascent { x, value: fx, grad_norm, iterations, converged }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn matvec(h: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| dot(&h[i * n..(i + 1) * n], v)).collect()
}

// H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy = matvec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximizes_a_concave_quadratic() {
        // f = -(x-1)^2 - 10 (y+2)^2
        let f = |v: &[f64]| {
            let (a, b) = (v[0] - 1.0, v[1] + 2.0);
            (-a * a - 10.0 * b * b, vec![-2.0 * a, -20.0 * b])
        };
        let r = maximize(f, vec![5.0, 5.0], BfgsOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock() {
        let f = |v: &[f64]| {
            let (x, y) = (v[0], v[1]);
            let val = (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
            let gx = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
            let gy = 200.0 * (y - x * x);
            (-val, vec![-gx, -gy])
        };
        let r = maximize(f, vec![-1.2, 1.0], BfgsOptions { max_iterations: 2000, ..Default::default() });
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{r:?}");
    }
}
