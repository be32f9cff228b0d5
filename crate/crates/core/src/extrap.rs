//! Level-curve schedules and extrapolation of contour values to the boundary.
//!
//! Quantities of the form `I(r) = integral over the level curve phi(|u|=r)`
//! are computed at a short schedule of radii and extrapolated to `r -> 1`.
//! The extrapolation variable is `s = r^2`: whenever the integrand is built
//! from finite Laurent data in the chart, `I` is exactly a polynomial in `s`
//! (conjugation on `|u| = r` contributes `r^2/u` per power), so polynomial
//! extrapolation in `s` with enough nodes is exact rather than asymptotic.
//! For generic analytic data the default three-node schedule behaves like
//! second-order extrapolation in `1 - r`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radii of the sampled level curves together with the trapezoid size used
/// on each curve. Radii move strictly monotonically toward 1 and stay on one
/// side of it: `< 1` approaches the boundary through the declared side of a
/// chart, `> 1` through the opposite side (via analytic continuation).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Schedule {
    radii: Vec<f64>,
    /// Trapezoid points per level curve.
    pub m: usize,
}

impl Schedule {
    pub fn new(radii: Vec<f64>, m: usize) -> Result<Self> {
        if radii.len() < 2 {
            return Err(Error::InvalidParameter(
                "schedule needs at least 2 radii".into(),
            ));
        }
        if m < 8 {
            return Err(Error::InvalidParameter(
                "schedule needs at least 8 quadrature points".into(),
            ));
        }
        let inside = radii[0] < 1.0;
        for w in radii.windows(2) {
            let monotone = if inside { w[0] < w[1] } else { w[0] > w[1] };
            if !monotone {
                return Err(Error::InvalidParameter(
                    "schedule radii must move strictly monotonically toward 1".into(),
                ));
            }
        }
        for &r in &radii {
            if !(r > 0.0) || r == 1.0 || (inside != (r < 1.0)) {
                return Err(Error::InvalidParameter(format!(
                    "schedule radius {r} must lie strictly on one side of 1"
                )));
            }
        }
        Ok(Schedule { radii, m })
    }

    /// Default approach through the declared side: r in {0.90, 0.95, 0.975}.
    pub fn default_side1() -> Self {
        Schedule::new(vec![0.90, 0.95, 0.975], 512).unwrap()
    }

    /// Default approach through the opposite side, staying inside the chart
    /// continuation annulus `1 < r <= r_max`.
    pub fn default_side2(r_max: f64) -> Result<Self> {
        let top = (r_max.min(1.2) + 1.0) / 2.0;
        if !(top > 1.0) {
            return Err(Error::Domain(format!(
                "chart continuation radius {r_max} leaves no room on the far side"
            )));
        }
        let d = top - 1.0;
        Schedule::new(vec![1.0 + d, 1.0 + 0.5 * d, 1.0 + 0.25 * d], 512)
    }

    /// A schedule whose node count matches a known polynomial degree of the
    /// contour value in `s = r^2`, making the extrapolation exact for
    /// finite-band data. Node count is `max(3, deg + 1)`, capped at 17.
    pub fn degree_matched(deg: usize, m: usize) -> Self {
        let count = (deg + 1).clamp(3, 17);
        let (s_lo, s_hi) = (0.55, 0.9025);
        let radii = (0..count)
            .map(|i| {
                let s = s_lo + (s_hi - s_lo) * (i as f64) / ((count - 1) as f64);
                s.sqrt()
            })
            .collect();
        Schedule::new(radii, m).unwrap()
    }

    /// Degree-matched schedule approaching through the far side of the chart,
    /// staying well inside the continuation annulus `1 < r < r_max`.
    pub fn degree_matched_side2(deg: usize, m: usize, r_max: f64) -> Result<Self> {
        let top = r_max.min(1.35);
        if !(top > 1.0) {
            return Err(Error::Domain(format!(
                "chart continuation radius {r_max} leaves no room on the far side"
            )));
        }
        let span = top * top - 1.0;
        let (s_lo, s_hi) = (1.0 + 0.10 * span, 1.0 + 0.45 * span);
        let count = (deg + 1).clamp(3, 17);
        let radii = (0..count)
            .map(|i| {
                let s = s_hi - (s_hi - s_lo) * (i as f64) / ((count - 1) as f64);
                s.sqrt()
            })
            .collect();
        Schedule::new(radii, m)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// True when the schedule approaches the boundary from inside the chart disk.
    pub fn approaches_from_inside(&self) -> bool {
        self.radii[0] < 1.0
    }

    /// Radii nudged toward 1 by a small factor, used to dodge node collisions.
    pub fn perturbed(&self, step: usize) -> Self {
        let f = 1.0 - 0.013 * (step as f64 + 1.0);
        let radii = self
            .radii
            .iter()
            .map(|&r| if r < 1.0 { 1.0 - (1.0 - r) * f } else { 1.0 + (r - 1.0) * f })
            .collect();
        Schedule {
            radii,
            m: self.m,
        }
    }
}

/// Result of extrapolating contour values to the boundary.
#[derive(Clone, Debug)]
pub struct Extrapolated {
    /// Estimated limit at `r = 1`.
    pub value: C64,
    /// Absolute corrections contributed by each added node (Neville diagonal
    /// increments); for analytic data these decrease monotonically.
    pub corrections: Vec<f64>,
}

impl Extrapolated {
    /// Size of the final correction, the standard convergence indicator.
    pub fn last_correction(&self) -> f64 {
        self.corrections.last().copied().unwrap_or(0.0)
    }
}

/// Neville polynomial extrapolation of `(x_i, y_i)` to the target abscissa.
pub fn neville(xs: &[f64], ys: &[C64], x: f64) -> Extrapolated {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len();
    let mut tab = ys.to_vec();
    let mut corrections = Vec::with_capacity(n - 1);
    let mut prev = tab[0];
    for k in 1..n {
        for i in 0..n - k {
            let denom = xs[i] - xs[i + k];
            tab[i] = ((x - xs[i + k]) * tab[i] - (x - xs[i]) * tab[i + 1]) / denom;
        }
        corrections.push((tab[0] - prev).norm());
        prev = tab[0];
    }
    Extrapolated {
        value: tab[0],
        corrections,
    }
}

/// Extrapolates level-curve values `I(r_i)` to `r = 1` in the variable `s = r^2`.
pub fn to_boundary(radii: &[f64], values: &[C64]) -> Extrapolated {
    let s: Vec<f64> = radii.iter().map(|r| r * r).collect();
    neville(&s, values, 1.0)
}
