//! FFT helpers for reading Laurent coefficients off circle samples.
//!
//! A function `F(u) = sum_n c_n u^n` sampled at `u_j = r e^{i theta_j}` on a
//! uniform grid of size `M` has normalized DFT bins
//! `bin_k = sum_{n == k mod M} c_n r^n`, so a coefficient in the resolvable
//! band `|n| < M/2` is recovered as `bin_(n mod M) * r^{-n}` up to aliasing
//! from coefficients `M` slots away. Callers control aliasing by choosing
//! `M` and, where the contract requires it, by comparing reads at two radii.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

/// Smallest power of two that is `>= n`.
pub fn next_pow2(n: usize) -> usize {
    let mut m = 1usize;
    while m < n {
        m <<= 1;
    }
    m
}

/// Uniform angles `theta_j = 2 pi j / m`.
pub fn theta(j: usize, m: usize) -> f64 {
    2.0 * std::f64::consts::PI * (j as f64) / (m as f64)
}

/// Samples `f` at the `m` uniform points of the circle `|u| = r`.
pub fn sample_circle<F: Fn(C64) -> C64>(f: F, r: f64, m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| {
            let t = theta(j, m);
            f(C64::from_polar(r, t))
        })
        .collect()
}

/// Normalized DFT bins: `bin_k = (1/M) sum_j x_j e^{-i k theta_j}`.
pub fn fourier_bins(samples: &[C64]) -> Vec<C64> {
    let m = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    for x in &mut buf {
        *x *= scale;
    }
    buf
}

/// Inverse of [`fourier_bins`]: reconstructs samples from normalized bins.
pub fn samples_from_bins(bins: &[C64]) -> Vec<C64> {
    let mut buf = bins.to_vec();
    FftPlanner::new()
        .plan_fft_inverse(bins.len())
        .process(&mut buf);
    buf
}

/// Reads the Laurent coefficient of `u^n` from normalized bins of samples
/// taken on `|u| = r`. Exact when no coefficient lives `M` slots away.
pub fn coeff_from_bins(bins: &[C64], r: f64, n: i64) -> C64 {
    let m = bins.len() as i64;
    let k = n.rem_euclid(m) as usize;
    bins[k] * r.powi(-(n as i32))
}

/// Laurent coefficients `c_n` for `n in [n_min, n_max]` from circle samples.
pub fn laurent_coeffs(samples: &[C64], r: f64, n_min: i64, n_max: i64) -> Vec<C64> {
    let bins = fourier_bins(samples);
    (n_min..=n_max)
        .map(|n| coeff_from_bins(&bins, r, n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn next_pow2_covers_boundaries() {
        assert_eq!(next_pow2(1), 1);
        assert_eq!(next_pow2(2), 2);
        assert_eq!(next_pow2(3), 4);
        assert_eq!(next_pow2(64), 64);
        assert_eq!(next_pow2(65), 128);
    }

    #[test]
    fn laurent_read_recovers_mixed_powers_off_unit_radius() {
        // F(u) = 3 u^{-2} + (1+i) u^{-1} + 2 + 5i u + 0.5 u^3
        let f = |u: C64| {
            3.0 * u.powi(-2)
                + C64::new(1.0, 1.0) * u.powi(-1)
                + 2.0
                + C64::new(0.0, 5.0) * u
                + 0.5 * u.powi(3)
        };
        for &r in &[0.8, 1.25] {
            let samples = sample_circle(f, r, 32);
            let c = laurent_coeffs(&samples, r, -3, 3);
            let want = [
                C64::new(0.0, 0.0),
                C64::new(3.0, 0.0),
                C64::new(1.0, 1.0),
                C64::new(2.0, 0.0),
                C64::new(0.0, 5.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
            ];
            for (got, want) in c.iter().zip(want.iter()) {
                assert!(close(*got, *want, 1e-12), "r={r}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn bins_roundtrip_through_inverse() {
        let samples = sample_circle(|u| u.powi(2) + 1.0 / (u + 2.0), 1.0, 16);
        let bins = fourier_bins(&samples);
        let back = samples_from_bins(&bins);
        for (a, b) in samples.iter().zip(back.iter()) {
            assert!(close(*a, *b, 1e-12));
        }
    }
}
