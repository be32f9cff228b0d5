//! Boundary transmission: circle homeomorphisms, composition operators and
//! their energy norms, and the transport of far-side analytic data to a
//! near-side harmonic function with matching boundary values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrap::{self, Schedule};
use crate::fft;
use crate::linalg::{largest_singular_value, CMat};
use crate::maps::{Side, UnivalentMap};
use crate::series::{dirichlet_energy, harmonic_extension, FourierBoundaryData, HarmonicDiskFunction};
use crate::C64;

/// Orientation-preserving homeomorphism of the circle, held as a strictly
/// increasing lift sampled on the uniform grid `theta_j = 2 pi j / M` and
/// interpolated by a monotone (Fritsch-Carlson limited) cubic Hermite spline.
/// The lift satisfies `psi(theta + 2 pi) = psi(theta) + 2 pi` exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CircleHomeoWire", into = "CircleHomeoWire")]
pub struct CircleHomeo {
    psi: Vec<f64>,
    /// Hermite slopes at the grid nodes, limited for monotonicity.
    #[serde(skip)]
    slopes: Vec<f64>,
    /// Optional tag naming an analytic family the samples came from.
    analytic: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CircleHomeoWire {
    grid: usize,
    psi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    analytic: Option<String>,
}

impl TryFrom<CircleHomeoWire> for CircleHomeo {
    type Error = Error;

    fn try_from(w: CircleHomeoWire) -> Result<Self> {
        if w.grid != w.psi.len() {
            return Err(Error::InvalidParameter(format!(
                "grid {} does not match {} lift samples",
                w.grid,
                w.psi.len()
            )));
        }
        CircleHomeo::new(w.psi, w.analytic)
    }
}

impl From<CircleHomeo> for CircleHomeoWire {
    fn from(h: CircleHomeo) -> Self {
        CircleHomeoWire {
            grid: h.psi.len(),
            psi: h.psi,
            analytic: h.analytic,
        }
    }
}

impl CircleHomeo {
    /// Builds from lift samples on the uniform grid. The samples must be
    /// finite, strictly increasing, and advance by less than one full turn
    /// over the grid, so that the periodic closure `psi[0] + 2 pi` continues
    /// the increase.
    pub fn new(psi: Vec<f64>, analytic: Option<String>) -> Result<Self> {
        let m = psi.len();
        if m < 8 {
            return Err(Error::InvalidParameter(format!(
                "{m} lift samples cannot pin a circle homeomorphism"
            )));
        }
        if psi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("lift samples must be finite".into()));
        }
        for j in 1..m {
            if psi[j] <= psi[j - 1] {
                return Err(Error::InvalidParameter(format!(
                    "lift fails to increase between nodes {} and {j}",
                    j - 1
                )));
            }
        }
        if psi[m - 1] - psi[0] >= 2.0 * PI {
            return Err(Error::InvalidParameter(
                "lift advances a full turn before the grid closes".into(),
            ));
        }
        let slopes = monotone_slopes(&psi);
        Ok(CircleHomeo { psi, slopes, analytic })
    }

    /// Samples a lift function on the uniform grid. `f` must already be a
    /// continuous lift: `f(theta + 2 pi) = f(theta) + 2 pi`.
    pub fn from_function<F: Fn(f64) -> f64>(f: F, m: usize) -> Result<Self> {
        let psi = (0..m).map(|j| f(fft::theta(j, m))).collect();
        Self::new(psi, None)
    }

    pub fn grid(&self) -> usize {
        self.psi.len()
    }

    pub fn analytic_tag(&self) -> Option<&str> {
        self.analytic.as_deref()
    }

    pub fn with_analytic_tag(mut self, tag: &str) -> Self {
        self.analytic = Some(tag.to_string());
        self
    }

    /// Lift value at any real argument; periodicity is enforced exactly by
    /// reducing the argument and adding back whole turns.
    pub fn eval(&self, theta: f64) -> f64 {
        let m = self.psi.len();
        let h = 2.0 * PI / m as f64;
        let turns = (theta / (2.0 * PI)).floor();
        let t = theta - 2.0 * PI * turns;
        let mut j = (t / h) as usize;
        if j >= m {
            j = m - 1;
        }
        let x = (t - j as f64 * h) / h;
        let (y0, d0) = (self.psi[j], self.slopes[j]);
        let (y1, d1) = if j + 1 == m {
            (self.psi[0] + 2.0 * PI, self.slopes[0])
        } else {
            (self.psi[j + 1], self.slopes[j + 1])
        };
        let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
        let h10 = x * (1.0 - x) * (1.0 - x);
        let h01 = x * x * (3.0 - 2.0 * x);
        let h11 = x * x * (x - 1.0);
        let val = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        val + 2.0 * PI * turns
    }

    /// The inverse homeomorphism, sampled on the same grid by bisection on
    /// the monotone spline.
    pub fn inverse(&self) -> Result<CircleHomeo> {
        let m = self.psi.len();
        let psi0 = self.psi[0];
        let inv = (0..m)
            .map(|j| {
                let target = fft::theta(j, m) + psi0.div_euclid(2.0 * PI) * 2.0 * PI;
                // Bracket within one period around the lift's range.
                let (mut lo, mut hi) = (-2.0 * PI, 4.0 * PI);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect::<Vec<f64>>();
        // Re-anchor so the samples start in [0, 2 pi).
        let shift = (inv[0] / (2.0 * PI)).floor() * 2.0 * PI;
        CircleHomeo::new(inv.iter().map(|v| v - shift).collect(), None)
    }
}

/// Hermite slopes for monotone interpolation: centered secant averages,
/// limited to three times the smaller adjacent secant, which is sufficient
/// for monotonicity of the cubic on every interval.
fn monotone_slopes(psi: &[f64]) -> Vec<f64> {
    let m = psi.len();
    let h = 2.0 * PI / m as f64;
    let sec = |j: usize| -> f64 {
        let next = if j + 1 == m { psi[0] + 2.0 * PI } else { psi[j + 1] };
        (next - psi[j]) / h
    };
    (0..m)
        .map(|j| {
            let dl = sec((j + m - 1) % m);
            let dr = sec(j);
            let s = 0.5 * (dl + dr);
            s.min(3.0 * dl.min(dr)).max(0.0)
        })
        .collect()
}

/// Composition with a circle homeomorphism on the boundary: returns the band
/// limited coefficients of `u(psi(theta))` together with the energy that
/// spilled past the band. The grid must oversample the input band at least
/// four-fold; spillover above a tenth of the input energy means the result
/// would misrepresent the composition.
pub fn compose_boundary(
    u: &FourierBoundaryData,
    phi: &CircleHomeo,
    m: usize,
    band: usize,
) -> Result<(FourierBoundaryData, f64)> {
    let n_in = u.order().max(1);
    if m < 4 * n_in {
        return Err(Error::Resolution(format!(
            "grid {m} undersamples a band of order {} for composition",
            u.order()
        )));
    }
    let samples: Vec<C64> = (0..m).map(|j| u.eval(phi.eval(fft::theta(j, m)))).collect();
    let (out, spill) = FourierBoundaryData::from_samples(&samples, band)?;
    let energy_in = u.h_half_energy();
    if spill > 0.1 * energy_in && energy_in > 0.0 {
        return Err(Error::Undersampling(format!(
            "composition pushes {spill:.3e} of {energy_in:.3e} energy past band {band}"
        )));
    }
    Ok((out, spill))
}

/// Grid estimate of the quasisymmetry modulus: the supremum over sampled
/// angles and dyadic scales of the symmetric difference ratio
/// `(psi(t + s) - psi(t)) / (psi(t) - psi(t - s))` and its reciprocal.
/// Sampling only probes finitely many pairs, so the value is a lower bound
/// for the true modulus.
pub fn qs_modulus(phi: &CircleHomeo, grid: usize) -> Result<f64> {
    if grid < 16 {
        return Err(Error::InvalidParameter(format!(
            "{grid} probe angles are too few for a modulus estimate"
        )));
    }
    let spacing = 2.0 * PI / phi.grid() as f64;
    let mut sup = 1.0_f64;
    let mut t = PI;
    while t >= 4.0 * spacing {
        for j in 0..grid {
            let theta = fft::theta(j, grid);
            let num = phi.eval(theta + t) - phi.eval(theta);
            let den = phi.eval(theta) - phi.eval(theta - t);
            let ratio = num / den;
            sup = sup.max(ratio).max(1.0 / ratio);
        }
        t *= 0.5;
    }
    Ok(sup)
}

/// Operator norm of composition by `phi` on band-limited boundary data in the
/// half-order energy seminorm, constants quotiented out: the largest singular
/// value of `D_out^{1/2} B D_in^{-1/2}` where `B` carries the Fourier matrix
/// of `e^{i k psi(theta)}` for `1 <= |k| <= n` into all frequencies the grid
/// resolves. Growth of this value as `n` increases is empirical evidence
/// against quasisymmetry, never a proof.
pub fn energy_ratio_norm(phi: &CircleHomeo, n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("band must be positive".into()));
    }
    if m < 4 * n {
        return Err(Error::Resolution(format!(
            "grid {m} undersamples composed band {n}"
        )));
    }
    let psis: Vec<f64> = (0..m).map(|j| phi.eval(fft::theta(j, m))).collect();
    let in_freqs: Vec<i64> = (1..=n as i64).flat_map(|k| [k, -k]).collect();
    let out_max = (m / 2 - 1) as i64;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(in_freqs.len());
    for &k in &in_freqs {
        let samples: Vec<C64> = psis.iter().map(|&p| C64::from_polar(1.0, k as f64 * p)).collect();
        cols.push(fft::fourier_bins(&samples));
    }
    let rows = 2 * out_max as usize;
    let s = CMat::from_fn(rows, in_freqs.len(), |i, j| {
        let kappa = if i % 2 == 0 { (i / 2 + 1) as i64 } else { -((i / 2 + 1) as i64) };
        let bin = cols[j][kappa.rem_euclid(m as i64) as usize];
        bin * (kappa.unsigned_abs() as f64).sqrt() / (in_freqs[j].unsigned_abs() as f64).sqrt()
    });
    if s.max_abs() > 1e12 || !s.max_abs().is_finite() {
        return Err(Error::Conditioning(
            "composition Gram form is numerically singular".into(),
        ));
    }
    largest_singular_value(&s, 1e-12)
}

/// Result of transporting far-side analytic data to the near side.
#[derive(Clone, Debug)]
pub struct Transmission {
    /// Band-limited boundary trace in the chart angle.
    pub trace: FourierBoundaryData,
    /// Trace energy dropped by the band truncation.
    pub spillover: f64,
    /// Harmonic extension of the trace through the near side of the chart.
    pub extension: HarmonicDiskFunction,
    /// Dirichlet energy of the transmitted extension.
    pub energy: f64,
    /// Largest extrapolation correction over the boundary grid; a diagnostic
    /// for how well the level-curve values settle toward the curve.
    pub max_correction: f64,
}

/// Transports a function analytic on the far side of the chart to the near
/// side: its boundary trace is recovered by extrapolating samples along the
/// far-side level curves toward the curve itself, band-limited, and extended
/// harmonically. The result is the unique near-side harmonic function with
/// the same boundary values. `h` receives `(u, w)` with `w = phi(u)` on each
/// level curve.
pub fn transmit<F: Fn(C64, C64) -> C64>(
    map: &UnivalentMap,
    h: &F,
    sched: &Schedule,
    band: usize,
) -> Result<Transmission> {
    if sched.approaches_from_inside() {
        return Err(Error::InvalidParameter(
            "transmission needs a far-side schedule (radii above 1)".into(),
        ));
    }
    if band == 0 {
        return Err(Error::InvalidParameter("band must be positive".into()));
    }
    let m = sched.m;
    let radii = sched.radii();
    let mut vals: Vec<Vec<C64>> = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let u = C64::from_polar(r, fft::theta(j, m));
            let w = map.chart(u)?;
            row.push(h(u, w));
        }
        vals.push(row);
    }
    let mut trace = vec![C64::new(0.0, 0.0); m];
    let mut max_corr = 0.0_f64;
    let mut scale = 1.0_f64;
    for j in 0..m {
        let col: Vec<C64> = vals.iter().map(|row| row[j]).collect();
        let ex = extrap::to_boundary(radii, &col);
        if !ex.value.re.is_finite() || !ex.value.im.is_finite() {
            return Err(Error::Regularity(
                "level-curve samples do not extend to the curve".into(),
            ));
        }
        max_corr = max_corr.max(ex.last_correction());
        scale = scale.max(ex.value.norm());
        trace[j] = ex.value;
    }
    // Data analytic across the curve leaves corrections far below the value
    // scale; anything larger means the trace did not settle.
    if max_corr > 1e-3 * scale {
        return Err(Error::Regularity(format!(
            "boundary trace fails to converge: correction {max_corr:.3e} at scale {scale:.3e}"
        )));
    }
    let (data, spillover) = FourierBoundaryData::from_samples(&trace, band)?;
    let extension = harmonic_extension(&data);
    let energy = dirichlet_energy(&extension);
    Ok(Transmission {
        trace: data,
        spillover,
        extension,
        energy,
        max_correction: max_corr,
    })
}

/// Conformal welding of a matched chart pair: the circle homeomorphism `psi`
/// with `g(1 / e^{i psi(theta)}) = f(e^{i theta})` for every angle, computed
/// by continuation with a Gauss-Newton step per node, exclusively from the
/// two families of level curves. The inner chart `f` is evaluated on its unit
/// level curve; each angle of the outer chart `g` is solved for on its own
/// unit curve. No extension of either map off its chart is ever constructed.
pub fn welding_phi(f: &UnivalentMap, g: &UnivalentMap, m: usize) -> Result<CircleHomeo> {
    if f.side() != Side::Interior || g.side() != Side::Exterior {
        return Err(Error::InvalidParameter(
            "welding pairs an interior chart with an exterior chart".into(),
        ));
    }
    if !m.is_power_of_two() || m < 8 {
        return Err(Error::InvalidParameter(format!(
            "welding grid {m} must be a power of two, at least 8"
        )));
    }
    let inner = f.level_curve(1.0, m)?;
    // Coarse seed for the first node.
    let probe = 4 * m;
    let mut tau0 = 0.0;
    let mut best = f64::INFINITY;
    for k in 0..probe {
        let t = fft::theta(k, probe);
        let d = (g.chart(C64::from_polar(1.0, -t))? - inner.nodes[0]).norm();
        if d < best {
            best = d;
            tau0 = t;
        }
    }
    let step = 2.0 * PI / m as f64;
    let mut psi = Vec::with_capacity(m);
    let mut prev = tau0 - step;
    for (j, &w) in inner.nodes.iter().enumerate() {
        let tau = newton_on_outer_curve(g, w, prev + step)?;
        if j > 0 && tau <= prev {
            return Err(Error::Pairing(format!(
                "welding parameter retreats at node {j}: the curves do not match"
            )));
        }
        psi.push(tau);
        prev = tau;
    }
    // Closing the grid must return to the first node one turn later.
    let closure = newton_on_outer_curve(g, inner.nodes[0], prev + step)?;
    if (closure - psi[0] - 2.0 * PI).abs() > 1e-6 {
        return Err(Error::Pairing(format!(
            "welding fails to close up: gap {:.3e}",
            (closure - psi[0] - 2.0 * PI).abs()
        )));
    }
    // Re-anchor the lift into [0, 2 pi).
    let shift = (psi[0] / (2.0 * PI)).floor() * 2.0 * PI;
    CircleHomeo::new(psi.iter().map(|v| v - shift).collect(), Some("welding".into()))
}

/// Solves `g(1 / e^{i tau}) = w` for the real angle `tau` near `guess` by
/// Gauss-Newton on the squared distance. Failure to converge means `w` does
/// not lie on the outer chart's unit curve.
fn newton_on_outer_curve(g: &UnivalentMap, w: C64, guess: f64) -> Result<f64> {
    let scale = 1.0 + w.norm();
    let mut tau = guess;
    for _ in 0..60 {
        let u = C64::from_polar(1.0, -tau);
        let val = g.chart(u)? - w;
        if val.norm() < 1e-12 * scale {
            return Ok(tau);
        }
        // d/dtau of g(e^{-i tau}) is g'(u) * (-i u).
        let dv = g.chart_deriv(u)? * C64::new(0.0, -1.0) * u;
        let denom = dv.norm_sqr();
        if denom < 1e-30 {
            return Err(Error::Pairing(
                "outer chart is stationary; welding step is undefined".into(),
            ));
        }
        let mut delta = -(dv.conj() * val).re / denom;
        delta = delta.clamp(-0.5, 0.5);
        tau += delta;
    }
    let val = (g.chart(C64::from_polar(1.0, -tau))? - w).norm();
    if val < 1e-9 * scale {
        Ok(tau)
    } else {
        Err(Error::Pairing(format!(
            "no outer-curve point matches the inner node: residual {val:.3e}"
        )))
    }
}
