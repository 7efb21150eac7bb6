// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Least-squares slope fits for convergence studies.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Weight given to the two smallest samples when they sit within 10x of the
/// noise floor.
pub const FLOOR_WEIGHT: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Weighted least squares `y = slope x + intercept`.
pub fn weighted_line(xs: &[f64], ys: &[f64], ws: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() != ws.len() {
        return Err(Error::Fit("x, y and weight lengths differ".into()));
    }
    let pts: Vec<(f64, f64, f64)> = xs
        .iter()
        .zip(ys)
        .zip(ws)
        .filter(|((x, y), w)| x.is_finite() && y.is_finite() && **w > 0.0)
        .map(|((&x, &y), &w)| (x, y, w))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit(format!("{} usable points, need at least 2", pts.len())));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| p.2 * (p.1 - my) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok(LineFit { slope, intercept: my - slope * mx, r_squared, points: pts.len() })
}

/// Fit `y = C x^slope` on log-log axes. Non-positive samples are dropped; the
/// two smallest samples are down-weighted when they are within 10x of `floor`.
pub fn power_law(xs: &[f64], ys: &[f64], floor: f64) -> Result<LineFit> {
    let ws = floor_weights(ys, floor);
    let lx: Vec<f64> = xs.iter().map(|&x| if x > 0.0 { libm::log(x) } else { f64::NAN }).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| if y > 0.0 { libm::log(y) } else { f64::NAN }).collect();
    weighted_line(&lx, &ly, &ws)
}

/// Fit `y = C exp(-rate t)`; samples below `floor` are excluded. Returns
/// `(rate, C, fit)`.
pub fn exponential_decay(ts: &[f64], ys: &[f64], floor: f64) -> Result<(f64, f64, LineFit)> {
    let ws: Vec<f64> = ys.iter().map(|&y| if y >= floor && y > 0.0 { 1.0 } else { 0.0 }).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| if y > 0.0 { libm::log(y) } else { f64::NAN }).collect();
    let f = weighted_line(ts, &ly, &ws)?;
    Ok((-f.slope, libm::exp(f.intercept), f))
}

fn floor_weights(ys: &[f64], floor: f64) -> Vec<f64> {
    let mut ws = alloc::vec![1.0; ys.len()];
    let mut idx: Vec<usize> = (0..ys.len()).filter(|&i| ys[i] > 0.0).collect();
    idx.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
    for &i in idx.iter().take(2) {
        if ys[i] < 10.0 * floor {
            ws[i] = FLOOR_WEIGHT;
        }
    }
    ws
}

/// True when `values` never increases by more than `noise`.
pub fn non_increasing(values: &[f64], noise: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + noise)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let xs = [0.1, 0.03, 0.01, 0.003];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let f = power_law(&xs, &ys, 1e-14).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((libm::exp(f.intercept) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn floor_points_are_downweighted() {
        let ys = [1e-2, 1e-4, 5e-14, 1e-13];
        let w = floor_weights(&ys, 1e-13);
        assert_eq!(w, [1.0, 1.0, FLOOR_WEIGHT, FLOOR_WEIGHT]);
    }

    #[test]
    fn degenerate_inputs_fail() {
        assert!(power_law(&[1.0], &[1.0], 0.0).is_err());
        assert!(power_law(&[1.0, 1.0], &[1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn exponential_rate() {
        let ts: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 2.0 * libm::exp(-0.7 * t)).collect();
        let (rate, c, _) = exponential_decay(&ts, &ys, 1e-13).unwrap();
        assert!((rate - 0.7).abs() < 1e-12 && (c - 2.0).abs() < 1e-10);
    }
}
