//! Truncated Fourier/Laurent series, energies, projections, trace/extension.
//!
//! Boundary data on the unit circle is a finite Fourier band `c_n`,
//! `|n| <= N`. Its harmonic extension to the disk is
//! `h(z) = sum_{n>=0} a_n z^n + sum_{n>=1} b_n zbar^n` with `a_n = c_n` and
//! `b_n = c_{-n}`, and the Dirichlet energy of the extension is
//! `sum_{n>=1} n (|a_n|^2 + |b_n|^2) = sum_n |n| |c_n|^2`. The Douglas
//! double integral reproduces the same energy with calibration constant
//! `kappa_D = 1/(4 pi^2)`, fixed by the exact value on `u = e^{i theta}`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Calibration constant of the Douglas double integral: the raw integral on
/// `u = e^{i theta}` equals `4 pi^2` while its Dirichlet energy is 1.
pub const KAPPA_DOUGLAS: f64 = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);

/// Truncated Fourier coefficients `c_n`, `n in [-N, N]`, of a function on
/// the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierBoundaryData {
    /// Coefficients stored for frequencies `-N..=N`; index `i` holds `c_{i-N}`.
    coeffs: Vec<C64>,
    n: usize,
}

impl FourierBoundaryData {
    pub fn zero(n: usize) -> Self {
        FourierBoundaryData {
            coeffs: vec![C64::new(0.0, 0.0); 2 * n + 1],
            n,
        }
    }

    /// Builds from coefficients listed for frequencies `-N..=N`.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidParameter(
                "boundary data needs an odd coefficient count (frequencies -N..=N)".into(),
            ));
        }
        let n = coeffs.len() / 2;
        Ok(FourierBoundaryData { coeffs, n })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, n: i64) -> C64 {
        if n.unsigned_abs() as usize > self.n {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.n as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, n: i64, v: C64) {
        let k = self.n as i64;
        assert!(n.abs() <= k, "frequency {n} outside band {k}");
        self.coeffs[(n + k) as usize] = v;
    }

    /// `sum_n |n| |c_n|^2`, the H^{1/2} seminorm squared.
    pub fn h_half_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i as i64 - self.n as i64).unsigned_abs() as f64 * c.norm_sqr())
            .sum()
    }

    /// True when the data represents a real function: `c_{-n} = conj(c_n)`.
    pub fn is_real(&self, tol: f64) -> bool {
        (0..=self.n as i64).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
    }

    pub fn eval(&self, theta: f64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = i as i64 - self.n as i64;
            s += c * C64::from_polar(1.0, n as f64 * theta);
        }
        s
    }

    /// Samples on the uniform grid of size `m >= 2N+1` by zero-padded FFT.
    pub fn sample(&self, m: usize) -> Result<Vec<C64>> {
        if m < 2 * self.n + 1 {
            return Err(Error::Resolution(format!(
                "grid {m} cannot carry a band of order {}",
                self.n
            )));
        }
        let mut bins = vec![C64::new(0.0, 0.0); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = i as i64 - self.n as i64;
            bins[n.rem_euclid(m as i64) as usize] = *c;
        }
        Ok(fft::samples_from_bins(&bins))
    }

    /// Recovers a band of order `n` from grid samples; frequencies beyond the
    /// band are dropped and their energy is returned as spillover.
    pub fn from_samples(samples: &[C64], n: usize) -> Result<(Self, f64)> {
        let m = samples.len();
        if m < 2 * n + 1 {
            return Err(Error::Resolution(format!(
                "grid {m} cannot resolve a band of order {n}"
            )));
        }
        let bins = fft::fourier_bins(samples);
        let mut out = FourierBoundaryData::zero(n);
        for k in -(n as i64)..=(n as i64) {
            out.set_coeff(k, bins[k.rem_euclid(m as i64) as usize]);
        }
        let mut spill = 0.0;
        for (idx, b) in bins.iter().enumerate() {
            let freq = if idx <= m / 2 { idx as i64 } else { idx as i64 - m as i64 };
            if freq.unsigned_abs() as usize > n {
                spill += freq.unsigned_abs() as f64 * b.norm_sqr();
            }
        }
        Ok((out, spill))
    }

    /// Coefficient of the spectral derivative `u'(theta)`.
    pub fn derivative(&self) -> FourierBoundaryData {
        let mut d = FourierBoundaryData::zero(self.n);
        for k in -(self.n as i64)..=(self.n as i64) {
            d.set_coeff(k, self.coeff(k) * C64::new(0.0, k as f64));
        }
        d
    }
}

/// Element of the harmonic Dirichlet space of the disk:
/// `h(z) = sum a_n z^n + sum_{n>=1} b_n zbar^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicDiskFunction {
    /// `a_0..a_N`.
    pub holo: Vec<C64>,
    /// `b_1..b_N`.
    pub antiholo: Vec<C64>,
}

impl HarmonicDiskFunction {
    pub fn order(&self) -> usize {
        (self.holo.len().max(1) - 1).max(self.antiholo.len())
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for a in self.holo.iter().rev() {
            s = s * z + a;
        }
        let zb = z.conj();
        let mut t = C64::new(0.0, 0.0);
        for b in self.antiholo.iter().rev() {
            t = (t + b) * zb;
        }
        s + t
    }
}

/// `sum_{n>=1} n (|a_n|^2 + |b_n|^2)`; constants contribute nothing.
pub fn dirichlet_energy(h: &HarmonicDiskFunction) -> f64 {
    let holo: f64 = h
        .holo
        .iter()
        .enumerate()
        .map(|(n, a)| n as f64 * a.norm_sqr())
        .sum();
    let anti: f64 = h
        .antiholo
        .iter()
        .enumerate()
        .map(|(i, b)| (i + 1) as f64 * b.norm_sqr())
        .sum();
    holo + anti
}

/// Harmonic extension of boundary data: `a_n = c_n`, `b_n = c_{-n}`.
pub fn harmonic_extension(u: &FourierBoundaryData) -> HarmonicDiskFunction {
    let n = u.order();
    HarmonicDiskFunction {
        holo: (0..=n as i64).map(|k| u.coeff(k)).collect(),
        antiholo: (1..=n as i64).map(|k| u.coeff(-k)).collect(),
    }
}

/// Exact coefficient inverse of [`harmonic_extension`].
pub fn boundary_trace(h: &HarmonicDiskFunction) -> FourierBoundaryData {
    let n = h.order();
    let mut u = FourierBoundaryData::zero(n);
    for (k, a) in h.holo.iter().enumerate() {
        u.set_coeff(k as i64, *a);
    }
    for (i, b) in h.antiholo.iter().enumerate() {
        u.set_coeff(-(i as i64) - 1, *b);
    }
    u
}

/// Which summand of a harmonic function a projection keeps or normalizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Holomorphic,
    Antiholomorphic,
}

/// Splits `h` into holomorphic and anti-holomorphic summands and returns the
/// `keep` part. The constant travels with the summand that is *not*
/// `normalized`, so the normalized part vanishes at 0; the two calls with the
/// same `normalized` argument are complementary.
pub fn project(h: &HarmonicDiskFunction, keep: Part, normalized: Part) -> HarmonicDiskFunction {
    let constant = h.holo.first().copied().unwrap_or_else(|| C64::new(0.0, 0.0));
    let keeps_constant = keep != normalized;
    match keep {
        Part::Holomorphic => {
            let mut holo = h.holo.clone();
            if holo.is_empty() {
                holo.push(C64::new(0.0, 0.0));
            }
            holo[0] = if keeps_constant { constant } else { C64::new(0.0, 0.0) };
            HarmonicDiskFunction {
                holo,
                antiholo: Vec::new(),
            }
        }
        Part::Antiholomorphic => HarmonicDiskFunction {
            holo: vec![if keeps_constant { constant } else { C64::new(0.0, 0.0) }],
            antiholo: h.antiholo.clone(),
        },
    }
}

/// Douglas double-integral energy of boundary data, by tensor trapezoid
/// quadrature with the diagonal cells replaced by the limiting value
/// `|u'(theta)|^2`. Exact for trigonometric polynomials once `m >= 4N`.
pub fn douglas_energy(u: &FourierBoundaryData, m: usize) -> Result<f64> {
    if m < 4 * u.order().max(1) {
        return Err(Error::Resolution(format!(
            "douglas grid {m} too small for band order {} (need m >= 4N)",
            u.order()
        )));
    }
    let samples = u.sample(m)?;
    let dsamples = u.derivative().sample(m)?;
    let nodes: Vec<C64> = (0..m)
        .map(|j| C64::from_polar(1.0, fft::theta(j, m)))
        .collect();
    let mut total = 0.0f64;
    for j in 0..m {
        for k in 0..m {
            if j == k {
                total += dsamples[j].norm_sqr();
            } else {
                total += (samples[j] - samples[k]).norm_sqr() / (nodes[j] - nodes[k]).norm_sqr();
            }
        }
    }
    let h = 2.0 * std::f64::consts::PI / m as f64;
    Ok(KAPPA_DOUGLAS * h * h * total)
}

/// Finite Laurent band `sum_{n_min <= n <= n_max} c_n u^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    n_min: i64,
    coeffs: Vec<C64>,
}

impl LaurentSeries {
    pub fn new(n_min: i64, coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty());
        LaurentSeries { n_min, coeffs }
    }

    /// Polynomial `c_0 + c_1 u + ...`.
    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        LaurentSeries::new(0, coeffs)
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, n: i64) -> C64 {
        if n < self.n_min || n > self.n_max() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(n - self.n_min) as usize]
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn eval(&self, u: C64) -> C64 {
        // Horner on the polynomial part scaled by u^{n_min}.
        let mut s = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            s = s * u + c;
        }
        if self.n_min == 0 {
            s
        } else {
            s * u.powi(self.n_min as i32)
        }
    }

    /// Drops leading/trailing coefficients below `tol` in absolute value.
    pub fn trimmed(&self, tol: f64) -> LaurentSeries {
        let mut lo = 0usize;
        let mut hi = self.coeffs.len();
        while hi > lo + 1 && self.coeffs[hi - 1].norm() <= tol {
            hi -= 1;
        }
        while lo + 1 < hi && self.coeffs[lo].norm() <= tol {
            lo += 1;
        }
        LaurentSeries::new(self.n_min + lo as i64, self.coeffs[lo..hi].to_vec())
    }
}

/// Serialization form of a Laurent band.
#[derive(Serialize, Deserialize)]
struct LaurentWire {
    n_min: i64,
    n_max: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for LaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LaurentWire {
            n_min: self.n_min,
            n_max: self.n_max(),
            re: self.coeffs.iter().map(|c| c.re).collect(),
            im: self.coeffs.iter().map(|c| c.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = LaurentWire::deserialize(d)?;
        if w.re.len() != w.im.len() || w.re.is_empty() {
            return Err(serde::de::Error::custom("re/im length mismatch"));
        }
        if w.n_max - w.n_min + 1 != w.re.len() as i64 {
            return Err(serde::de::Error::custom("band length mismatch"));
        }
        Ok(LaurentSeries::new(
            w.n_min,
            w.re.iter().zip(&w.im).map(|(&re, &im)| C64::new(re, im)).collect(),
        ))
    }
}

/// Coefficients of `outer(inner(u))` by sampling `inner` on the circle of
/// radius `r`, evaluating `outer` pointwise, and reading Laurent bins back.
/// The result band is `[n_min, n_max]`; the caller chooses it from degree
/// bookkeeping (polynomial composition fits exactly).
pub fn compose_series(
    outer: &LaurentSeries,
    inner: &LaurentSeries,
    r: f64,
    n_min: i64,
    n_max: i64,
) -> Result<LaurentSeries> {
    let band = n_max.max(-n_min).max(1) as usize;
    let m = fft::next_pow2(4 * band + 1);
    let samples: Vec<C64> = (0..m)
        .map(|j| inner.eval(C64::from_polar(r, fft::theta(j, m))))
        .collect();
    if outer.n_min() < 0 {
        if let Some(bad) = samples.iter().find(|w| w.norm() < 1e-13) {
            return Err(Error::Domain(format!(
                "inner sample {bad} falls on a pole of the outer series"
            )));
        }
    }
    let values: Vec<C64> = samples.iter().map(|&w| outer.eval(w)).collect();
    let coeffs = fft::laurent_coeffs(&values, r, n_min, n_max);
    Ok(LaurentSeries::new(n_min, coeffs))
}

/// Poisson-kernel evaluation of the harmonic extension at `|z| < 1` by
/// trapezoid quadrature; cross-validates the coefficient summation.
pub fn poisson_eval(u: &FourierBoundaryData, z: C64) -> Result<C64> {
    let az = z.norm();
    if az >= 1.0 {
        return Err(Error::Domain(format!(
            "poisson evaluation needs |z| < 1, got |z| = {az}"
        )));
    }
    // Kernel Fourier tail decays like |z|^M; size the grid to push it below 1e-15.
    let tail = if az < 1e-12 {
        8.0
    } else {
        (34.5 / (-az.ln())).max(8.0)
    };
    let m = fft::next_pow2((4 * u.order() + 1).max(tail.ceil() as usize));
    let samples = u.sample(m)?;
    let terms: Vec<C64> = (0..m)
        .map(|j| {
            let w = C64::from_polar(1.0, fft::theta(j, m));
            let p = (1.0 - az * az) / (w - z).norm_sqr();
            samples[j] * p
        })
        .collect();
    Ok(crate::linalg::tree_sum(&terms) / m as f64)
}
