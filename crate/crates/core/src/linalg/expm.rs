// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential by scaling and squaring with Padé approximants
//! (degree selection after Higham 2005), plus a Taylor branch for small norms.

// Tabulated constants are kept at their published precision.
#![allow(clippy::excessive_precision)]

use super::{ComplexMatrix, Lu, C64};
use crate::error::Result;

const THETA: [(usize, f64); 4] =
    [(3, 1.495585217958292e-2), (5, 2.539398330063230e-1), (7, 9.504178996162932e-1), (9, 2.097847961257068e0)];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Below this 1-norm the truncated Taylor series is used directly.
const SERIES_CUTOFF: f64 = 0.5;

/// `exp(t * m)`.
pub fn expm(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    let a = m.scale_re(t);
    let norm = a.norm_one();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    if norm < SERIES_CUTOFF {
        return Ok(taylor(&a));
    }
    for &(deg, theta) in &THETA {
        if norm <= theta {
            return pade_low(&a, deg);
        }
    }
    let s = if norm > THETA_13 { libm::ceil(libm::log2(norm / THETA_13)) as i32 } else { 0 };
    let scaled = a.scale_re(libm::exp2(-s as f64));
    let mut r = pade13(&scaled)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn taylor(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = (&term * a).scale_re(1.0 / k as f64);
        sum += &term;
        if term.norm_one() <= f64::EPSILON * 0.5 * sum.norm_one() {
            break;
        }
    }
    sum
}

fn add_scaled_identity(m: &mut ComplexMatrix, s: f64) {
    for i in 0..m.rows() {
        m[(i, i)] += C64::new(s, 0.0);
    }
}

fn axpy(acc: &mut ComplexMatrix, s: f64, x: &ComplexMatrix) {
    for (a, b) in acc.data_mut().iter_mut().zip(x.data()) {
        *a += b * s;
    }
}

fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = v + u;
    let q = v - u;
    Ok(Lu::new(&q)?.solve(&p))
}

fn pade_low(a: &ComplexMatrix, deg: usize) -> Result<ComplexMatrix> {
    let b: &[f64] = match deg {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        _ => &B9,
    };
    let n = a.rows();
    let a2 = a * a;
    let mut odd = ComplexMatrix::zeros(n, n);
    let mut even = ComplexMatrix::zeros(n, n);
    add_scaled_identity(&mut odd, b[1]);
    add_scaled_identity(&mut even, b[0]);
    let mut pw = a2.clone();
    for k in 1..=deg / 2 {
        axpy(&mut odd, b[2 * k + 1], &pw);
        axpy(&mut even, b[2 * k], &pw);
        if k < deg / 2 {
            pw = &pw * &a2;
        }
    }
    let u = a * &odd;
    solve_pade(&u, &even)
}

fn pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let mut inner = a6.scale_re(b[13]);
    axpy(&mut inner, b[11], &a4);
    axpy(&mut inner, b[9], &a2);
    let mut odd = &a6 * &inner;
    axpy(&mut odd, b[7], &a6);
    axpy(&mut odd, b[5], &a4);
    axpy(&mut odd, b[3], &a2);
    add_scaled_identity(&mut odd, b[1]);
    let u = a * &odd;

    let mut inner = a6.scale_re(b[12]);
    axpy(&mut inner, b[10], &a4);
    axpy(&mut inner, b[8], &a2);
    let mut v = &a6 * &inner;
    axpy(&mut v, b[6], &a6);
    axpy(&mut v, b[4], &a4);
    axpy(&mut v, b[2], &a2);
    add_scaled_identity(&mut v, b[0]);
    solve_pade(&u, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn zero_and_diagonal() {
        assert_eq!(expm(&ComplexMatrix::zeros(3, 3), 2.0).unwrap(), ComplexMatrix::identity(3));
        let d = ComplexMatrix::from_real_diag(&[-1.0, -2.0]);
        let e = expm(&d, 1.0).unwrap();
        let want = ComplexMatrix::from_real_diag(&[libm::exp(-1.0), libm::exp(-2.0)]);
        assert!(e.approx_eq(&want, 1e-15));
    }

    #[test]
    fn rotation_every_branch() {
        // exp(i theta X) = cos(theta) I + i sin(theta) X across all degree branches.
        let ix = ComplexMatrix::from_row_major(2, 2, &[c(0., 0.), c(0., 1.), c(0., 1.), c(0., 0.)]).unwrap();
        for theta in [1e-3, 0.1, 0.4, 0.9, 2.0, core::f64::consts::FRAC_PI_2, 20.0] {
            let e = expm(&ix, theta).unwrap();
            let (s, co) = (libm::sin(theta), libm::cos(theta));
            let want = ComplexMatrix::from_row_major(2, 2, &[c(co, 0.), c(0., s), c(0., s), c(co, 0.)]).unwrap();
            assert!(e.approx_eq(&want, 1e-13), "theta = {theta}");
        }
    }

    #[test]
    fn nilpotent_is_exact() {
        let n = ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        let e = expm(&n, 7.0).unwrap();
        assert!(e.approx_eq(&ComplexMatrix::from_real(2, 2, &[1., 7., 0., 1.]).unwrap(), 1e-13));
    }

    #[test]
    fn non_square_rejected() {
        assert!(expm(&ComplexMatrix::zeros(2, 3), 1.0).is_err());
    }
}
