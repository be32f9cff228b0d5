//! Boundary limits of Cauchy integrals over level-curve families, and the
//! singular integral transforms that appear in their derivatives.
//!
//! The central object is the limit
//!
//! ```text
//! J h(z) = lim (1/2 pi i) \oint_{phi(|u|=r)} h(w) [ 1/(w-z) - 1/(w-q) ] dw
//! ```
//!
//! taken along a schedule of level curves, oriented counterclockwise in the
//! chart variable, with the `q` term dropped when `q` is the point at
//! infinity. Both approach directions are supported: radii below 1 sweep the
//! declared side of the chart, radii above 1 sweep the far side through the
//! chart's analytic continuation. Boundary data is supplied in chart form as
//! a function of the contour parameter, so conjugate powers extend across
//! the collar the way harmonic extensions do (`conj(u)^n` on `|u| = r` is
//! `r^{2n} u^{-n}`), which keeps every contour value a polynomial in
//! `s = r^2` for finite-band data and makes the extrapolation exact.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::extrap::{self, Schedule};
use crate::fft::{self, next_pow2, theta};
use crate::linalg::{tree_sum, CMat};
use crate::maps::{LevelCurve, Side, UnivalentMap};
use crate::series::{self, FourierBoundaryData, LaurentSeries};

/// Level curves of one schedule together with the boundary data sampled on
/// their nodes. Building the family is the expensive step; evaluating the
/// Cauchy integral at a target afterwards is a plain weighted sum.
struct Family {
    radii: Vec<f64>,
    curves: Vec<LevelCurve>,
    data_vals: Vec<Vec<C64>>,
    m: usize,
}

impl Family {
    fn build<F: Fn(C64, C64) -> C64>(
        map: &UnivalentMap,
        data: &F,
        sched: &Schedule,
    ) -> Result<Family> {
        let m = sched.m;
        let mut curves = Vec::with_capacity(sched.radii().len());
        let mut data_vals = Vec::with_capacity(sched.radii().len());
        for &r in sched.radii() {
            let curve = map.level_curve(r, m)?;
            let vals = (0..m)
                .map(|j| data(C64::from_polar(r, theta(j, m)), curve.nodes[j]))
                .collect();
            curves.push(curve);
            data_vals.push(vals);
        }
        Ok(Family {
            radii: sched.radii().to_vec(),
            curves,
            data_vals,
            m,
        })
    }

    fn r_min(&self) -> f64 {
        self.radii.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn r_max(&self) -> f64 {
        self.radii.iter().cloned().fold(0.0, f64::max)
    }

    fn min_node_distance(&self, p: C64) -> f64 {
        self.curves
            .iter()
            .flat_map(|c| c.nodes.iter())
            .map(|&w| (w - p).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `(1/2 pi i) \oint dw/(w - z)` on one curve, rounded to an integer.
    fn winding(&self, i: usize, z: C64) -> i64 {
        let curve = &self.curves[i];
        let terms: Vec<C64> = (0..self.m)
            .map(|j| curve.tangents[j] * (curve.nodes[j] - z).inv())
            .collect();
        let v = tree_sum(&terms) * C64::new(0.0, -1.0 / self.m as f64);
        v.re.round() as i64
    }

    /// `(1/2 pi i) \oint data(w) [1/(w-z) - 1/(w-q)] dw` on every curve.
    fn j_values(&self, z: C64, q: Option<C64>) -> Vec<C64> {
        (0..self.curves.len())
            .map(|i| {
                let curve = &self.curves[i];
                let terms: Vec<C64> = (0..self.m)
                    .map(|j| {
                        let w = curve.nodes[j];
                        let mut k = (w - z).inv();
                        if let Some(qq) = q {
                            k -= (w - qq).inv();
                        }
                        self.data_vals[i][j] * k * curve.tangents[j]
                    })
                    .collect();
                tree_sum(&terms) * C64::new(0.0, -1.0 / self.m as f64)
            })
            .collect()
    }
}

/// A target is admissible when it keeps clear of the quadrature nodes and
/// does not sit inside the collar the family sweeps while approaching the
/// curve: a target between the contours and the boundary would see the
/// integrals jump mid-schedule and the extrapolation would silently return
/// an analytic continuation instead of a boundary limit.
fn validate_target(map: &UnivalentMap, fam: &Family, p: C64, label: &str) -> Result<()> {
    let scale = 1.0 + p.norm();
    if fam.min_node_distance(p) < 1e-6 * scale {
        return Err(Error::NodeCollision(format!(
            "{label} {p} lies within 1e-6 of a quadrature node"
        )));
    }
    let inside = fam.r_max() < 1.0;
    match map.invert(p) {
        Ok(u) => {
            let a = u.norm();
            let ok = if inside {
                a <= fam.r_min() - 0.02 || a >= 1.02
            } else {
                a >= fam.r_max() + 0.02 || a <= 0.98
            };
            if ok {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{label} {p} sits at chart radius {a:.4}, inside the collar swept by the \
                     level-curve family"
                )))
            }
        }
        // Beyond the chart continuation: certainly on the far side, as long
        // as it is well separated and every contour encloses it alike.
        Err(_) => {
            if fam.min_node_distance(p) < 0.05 * scale {
                return Err(Error::Domain(format!(
                    "{label} {p} is too close to the curve for a point outside the chart \
                     continuation"
                )));
            }
            if fam.winding(0, p) != fam.winding(fam.curves.len() - 1, p) {
                return Err(Error::Domain(format!(
                    "{label} {p} is not enclosed consistently by the level-curve family"
                )));
            }
            Ok(())
        }
    }
}

fn family_eval(map: &UnivalentMap, fam: &Family, z: C64, q: Option<C64>) -> Result<C64> {
    validate_target(map, fam, z, "target")?;
    if let Some(qq) = q {
        validate_target(map, fam, qq, "anchor point")?;
    }
    // No smallness check on the final Neville correction: with a
    // degree-matched schedule it carries the top-degree term of an exactly
    // polynomial contour value, so its size says nothing about convergence.
    let vals = fam.j_values(z, q);
    Ok(extrap::to_boundary(&fam.radii, &vals).value)
}

fn eval_with_retries<F: Fn(C64, C64) -> C64>(
    map: &UnivalentMap,
    data: &F,
    base: &Family,
    z: C64,
    q: Option<C64>,
    sched: &Schedule,
) -> Result<C64> {
    match family_eval(map, base, z, q) {
        Err(Error::NodeCollision(_)) => {}
        other => return other,
    }
    // Nudge the whole schedule toward the curve until the colliding point
    // falls between nodes; give up after a few rounds.
    for step in 0..3 {
        let fam = Family::build(map, data, &sched.perturbed(step))?;
        match family_eval(map, &fam, z, q) {
            Err(Error::NodeCollision(_)) if step < 2 => continue,
            other => return other,
        }
    }
    Err(Error::NodeCollision(format!(
        "target {z} keeps colliding with quadrature nodes under perturbed schedules"
    )))
}

/// Boundary limit of the Cauchy integral of `data` over the schedule's
/// level-curve family, evaluated at several targets. `data` receives the
/// chart parameter and the plane point of each contour node. `q = None`
/// anchors at infinity. Targets must stay off the collar swept by the
/// schedule; points colliding with quadrature nodes are retried on
/// perturbed schedules before reporting a collision.
pub fn cauchy_j_many<F: Fn(C64, C64) -> C64>(
    map: &UnivalentMap,
    data: &F,
    zs: &[C64],
    q: Option<C64>,
    sched: &Schedule,
) -> Result<Vec<C64>> {
    let base = Family::build(map, data, sched)?;
    zs.iter()
        .map(|&z| eval_with_retries(map, data, &base, z, q, sched))
        .collect()
}

/// Single-target form of [`cauchy_j_many`].
pub fn cauchy_j<F: Fn(C64, C64) -> C64>(
    map: &UnivalentMap,
    data: &F,
    z: C64,
    q: Option<C64>,
    sched: &Schedule,
) -> Result<C64> {
    Ok(cauchy_j_many(map, data, &[z], q, sched)?[0])
}

/// Decomposition of circle data into the difference of one-sided boundary
/// values, `h = h1 - h2` on `|u| = 1` in chart parameterization.
#[derive(Clone, Debug)]
pub struct JumpParts {
    /// Taylor coefficients of `h1 compose phi` at 0: the near-side component.
    pub h1: Vec<C64>,
    /// Faber-basis coefficients of the far-side component:
    /// `h2 = sum h2_faber[n-1] Phi_n + const`.
    pub h2_faber: Vec<C64>,
    /// Full collar Laurent expansion of `h2 compose phi`, usable anywhere in
    /// the continuation annulus (and on the curve itself).
    pub h2_collar: LaurentSeries,
    /// Sup distance on a dense boundary grid between the data and the
    /// reconstruction `h1 - h2`; reflects both truncation and quadrature.
    pub residual: f64,
}

/// Splits boundary data into one-sided components by evaluating the Cauchy
/// limit on a circle inside the contour family and on a circle across the
/// curve, reading off series coefficients by FFT. `band` is the number of
/// coefficients retained per side; what the truncation loses shows up
/// honestly in the reported residual.
pub fn jump_decompose(
    map: &UnivalentMap,
    data: &FourierBoundaryData,
    q: Option<C64>,
    band: usize,
) -> Result<JumpParts> {
    if band == 0 || band > 64 {
        return Err(Error::InvalidParameter(
            "jump band must lie in 1..=64".into(),
        ));
    }
    let top = map.max_chart_radius().min(1.35);
    if top <= 1.04 {
        return Err(Error::Domain(
            "the chart continues too little past the curve to resolve the far-side component"
                .into(),
        ));
    }
    let ext = series::harmonic_extension(data);
    let data_fn = |u: C64, _w: C64| ext.eval(u);
    let sched = Schedule::degree_matched(data.order().max(1), 512);

    let m1 = next_pow2(4 * (band + 1)).max(128);
    let rho1 = 0.68;
    let zs1: Vec<C64> = (0..m1)
        .map(|j| map.chart(C64::from_polar(rho1, theta(j, m1))))
        .collect::<Result<_>>()?;
    let v1 = cauchy_j_many(map, &data_fn, &zs1, q, &sched)?;
    let h1 = fft::laurent_coeffs(&v1, rho1, 0, band as i64);

    let rho2 = 1.0 + 0.45 * (top - 1.0);
    let zs2: Vec<C64> = (0..m1)
        .map(|j| map.chart(C64::from_polar(rho2, theta(j, m1))))
        .collect::<Result<_>>()?;
    let v2 = cauchy_j_many(map, &data_fn, &zs2, q, &sched)?;
    let e = fft::laurent_coeffs(&v2, rho2, -(band as i64), band as i64);
    let h2_collar = LaurentSeries::new(-(band as i64), e);
    let h2_faber: Vec<C64> = (1..=band).map(|n| h2_collar.coeff(-(n as i64))).collect();

    let grid = 512;
    let mut residual = 0.0f64;
    for j in 0..grid {
        let th = theta(j, grid);
        let u = C64::from_polar(1.0, th);
        let mut one_side = C64::new(0.0, 0.0);
        for &a in h1.iter().rev() {
            one_side = one_side * u + a;
        }
        let recon = one_side - h2_collar.eval(u);
        residual = residual.max((data.eval(th) - recon).norm());
    }

    Ok(JumpParts {
        h1,
        h2_faber,
        h2_collar,
        residual,
    })
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "need at least two radial nodes");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..(n + 1) / 2 {
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = x;
        nodes[n - 1 - k] = -x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    let nodes01 = nodes.iter().map(|x| 0.5 * (1.0 + x)).collect();
    let weights01 = weights.iter().map(|w| 0.5 * w).collect();
    (nodes01, weights01)
}

/// Legendre `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0f64, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let p2 = (((2 * j + 1) as f64) * x * p1 - (j as f64) * p0) / ((j + 1) as f64);
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Area-quadrature resolution for the singular integral transforms:
/// Gauss-Legendre in radius times trapezoid in angle.
#[derive(Clone, Copy, Debug)]
pub struct QuadSpec {
    pub nr: usize,
    pub ntheta: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { nr: 64, ntheta: 256 }
    }
}

/// Far-side singular transform: for a chart density `a` on the unit disk,
///
/// ```text
/// (1/pi) \iint_D conj(a(u)) phi'(u) / (phi(u) - z)^2 dA(u)
/// ```
///
/// at a target `z` on the far side of the curve. The kernel is formed
/// projectively, so chart poles inside the disk (far-side charts) are
/// harmless. With `check` set, the value is recomputed at doubled
/// resolution and a disagreement beyond 1e-6 relative is an error.
pub fn schiffer_t12<F: Fn(C64) -> C64>(
    map: &UnivalentMap,
    density: &F,
    z: C64,
    quad: QuadSpec,
    check: bool,
) -> Result<C64> {
    if let Ok(u) = map.invert(z) {
        if u.norm() < 1.0 - 1e-9 {
            return Err(Error::Domain(format!(
                "target {z} lies on the near side; this transform evaluates on the far side"
            )));
        }
    }
    let coarse = t12_once(map, density, z, quad.nr, quad.ntheta)?;
    if check {
        let fine = t12_once(map, density, z, 2 * quad.nr, 2 * quad.ntheta)?;
        let scale = 1.0f64.max(fine.norm());
        if (coarse - fine).norm() > 1e-6 * scale {
            return Err(Error::Resolution(format!(
                "far-side transform disagrees under refinement: {:.3e} at {} x {}",
                (coarse - fine).norm(),
                quad.nr,
                quad.ntheta
            )));
        }
    }
    Ok(coarse)
}

fn t12_once<F: Fn(C64) -> C64>(
    map: &UnivalentMap,
    density: &F,
    z: C64,
    nr: usize,
    ntheta: usize,
) -> Result<C64> {
    let (xs, ws) = gauss_legendre_01(nr);
    let dth = 2.0 * PI / ntheta as f64;
    let mut terms = Vec::with_capacity(nr * ntheta);
    for i in 0..nr {
        let rho = xs[i];
        let wr = ws[i] * rho * dth;
        for j in 0..ntheta {
            let u = C64::from_polar(rho, theta(j, ntheta));
            let (p, q, dp, dq) = map.chart_parts(u);
            let den = p - z * q;
            if den.norm() < 1e-12 {
                return Err(Error::Domain(format!(
                    "target {z} meets the chart image; it must lie on the far side"
                )));
            }
            let kernel = (dp * q - p * dq) / (den * den);
            terms.push(density(u).conj() * kernel * wr);
        }
    }
    Ok(tree_sum(&terms) / PI)
}

/// Local Taylor data of the chart at a disk point, `a[k] = phi^(k)(v)/k!`,
/// recovered from a small sampling circle. Used by the desingularized
/// near-side kernel close to its diagonal.
struct LocalTaylor {
    a: [C64; 7],
}

fn local_taylor(map: &UnivalentMap, v: C64) -> Result<LocalTaylor> {
    let mut sigma = 0.2f64;
    let r_cap = map.max_chart_radius();
    if r_cap.is_finite() {
        sigma = sigma.min(0.25 * (r_cap - v.norm()));
    }
    if map.side() == Side::Exterior {
        sigma = sigma.min(0.25 * v.norm());
    }
    if !(sigma > 1e-4) {
        return Err(Error::Domain(format!(
            "no room for a local expansion of the chart at {v}"
        )));
    }
    let m = 32;
    let samples: Vec<C64> = (0..m)
        .map(|j| map.chart(v + C64::from_polar(sigma, theta(j, m))))
        .collect::<Result<_>>()?;
    let bins = fft::fourier_bins(&samples);
    let mut a = [C64::new(0.0, 0.0); 7];
    for (k, slot) in a.iter_mut().enumerate() {
        *slot = fft::coeff_from_bins(&bins, sigma, k as i64);
    }
    let dv = map.chart_deriv(v)?;
    if (a[1] - dv).norm() > 1e-6 * (1.0 + dv.norm()) {
        return Err(Error::Consistency(format!(
            "local expansion at {v} disagrees with the chart derivative by {:.3e}",
            (a[1] - dv).norm()
        )));
    }
    Ok(LocalTaylor { a })
}

fn poly_mul6(a: &[C64; 6], b: &[C64; 6]) -> [C64; 6] {
    let mut c = [C64::new(0.0, 0.0); 6];
    for i in 0..6 {
        for j in 0..(6 - i) {
            c[i + j] += a[i] * b[j];
        }
    }
    c
}

/// Power-series quotient `num / den` truncated to degree 5; `den[0]` must
/// be 1.
fn poly_div6(num: &[C64; 6], den: &[C64; 6]) -> [C64; 6] {
    let mut q = [C64::new(0.0, 0.0); 6];
    for k in 0..6 {
        let mut acc = num[k];
        for i in 0..k {
            acc -= q[i] * den[k - i];
        }
        q[k] = acc;
    }
    q
}

/// Desingularized near-side kernel close to the diagonal: writing
/// `u = v + h`, the removable singularity cancels in the power series
///
/// ```text
/// K(v, v+h) = d2 + d3 h + d4 h^2 + d5 h^3 + O(h^4),
/// ```
///
/// whose coefficients come from the local Taylor data of the chart at `v`
/// (`d2` is one sixth of the Schwarzian derivative).
fn k_series(lt: &LocalTaylor, h: C64) -> C64 {
    let a1 = lt.a[1];
    let mut rho = [C64::new(0.0, 0.0); 6];
    rho[0] = C64::new(1.0, 0.0);
    for j in 1..6 {
        rho[j] = lt.a[j + 1] / a1;
    }
    let mut num = [C64::new(0.0, 0.0); 6];
    for j in 0..6 {
        num[j] = rho[j] * ((j + 1) as f64);
    }
    let s2 = poly_mul6(&rho, &rho);
    let d = poly_div6(&num, &s2);
    ((d[5] * h + d[4]) * h + d[3]) * h + d[2]
}

/// Desingularized near-side kernel away from the diagonal, in projective
/// form: `phi'(u) phi'(v) / (phi(u) - phi(v))^2 - 1/(u - v)^2`.
fn kernel_k(map: &UnivalentMap, u: C64, pv: C64, qv: C64, fv: C64, v: C64) -> Result<C64> {
    let (pu, qu, dpu, dqu) = map.chart_parts(u);
    let fu = dpu * qu - pu * dqu;
    let cross = pu * qv - pv * qu;
    if cross.norm() < 1e-140 {
        return Err(Error::Domain(format!(
            "chart values coincide at distinct points {u} and {v}"
        )));
    }
    let d = u - v;
    Ok(fu * fv / (cross * cross) - (d * d).inv())
}

/// The reproducing-kernel difference behind the near-side transform,
/// `(1/2 pi i) [ phi'(v) phi'(u) / (phi(v) - phi(u))^2 - 1/(v - u)^2 ]`,
/// with the diagonal filled in by its power series (value `S_phi(v)/12 pi i`
/// at `u = v`). Arguments are chart-disk points.
pub fn bergman_schiffer_kernel(map: &UnivalentMap, v: C64, u: C64) -> Result<C64> {
    if v.norm() >= 1.0 || u.norm() >= 1.0 {
        return Err(Error::Domain(
            "kernel arguments must lie in the open chart disk".into(),
        ));
    }
    let k = if (u - v).norm() < 1e-3 {
        let lt = local_taylor(map, v)?;
        k_series(&lt, u - v)
    } else {
        let (pv, qv, dpv, dqv) = map.chart_parts(v);
        let fv = dpv * qv - pv * dqv;
        kernel_k(map, u, pv, qv, fv, v)?
    };
    Ok(k * C64::new(0.0, -0.5 / PI))
}

/// Near-side singular transform, with the principal value removed against
/// the flat kernel: for a chart density `a` and a near-side target
/// `z = phi(v)`,
///
/// ```text
/// (1/(pi phi'(v))) \iint_D K(v,u) conj(a(u)) dA(u),
/// K(v,u) = phi'(u) phi'(v)/(phi(u)-phi(v))^2 - 1/(u-v)^2,
/// ```
///
/// which equals the principal-value transform on densities conjugate to
/// polynomials because the flat kernel integrates those to zero. On
/// far-side charts the target's chart radius must stay above 0.05 so the
/// local expansion of the kernel has room.
pub fn schiffer_t11<F: Fn(C64) -> C64>(
    map: &UnivalentMap,
    density: &F,
    z: C64,
    quad: QuadSpec,
    check: bool,
) -> Result<C64> {
    let v = map.invert(z)?;
    if v.norm() >= 1.0 - 1e-6 {
        return Err(Error::Domain(format!(
            "target {z} must lie strictly on the near side"
        )));
    }
    if map.side() == Side::Exterior && v.norm() < 0.05 {
        return Err(Error::Domain(format!(
            "target {z} sits too close to the chart's pole for the desingularized kernel"
        )));
    }
    let lt = local_taylor(map, v)?;
    let coarse = t11_once(map, density, v, &lt, quad.nr, quad.ntheta)?;
    if check {
        let fine = t11_once(map, density, v, &lt, 2 * quad.nr, 2 * quad.ntheta)?;
        let scale = 1.0f64.max(fine.norm());
        if (coarse - fine).norm() > 1e-6 * scale {
            return Err(Error::Resolution(format!(
                "near-side transform disagrees under refinement: {:.3e} at {} x {}",
                (coarse - fine).norm(),
                quad.nr,
                quad.ntheta
            )));
        }
    }
    Ok(coarse)
}

fn t11_once<F: Fn(C64) -> C64>(
    map: &UnivalentMap,
    density: &F,
    v: C64,
    lt: &LocalTaylor,
    nr: usize,
    ntheta: usize,
) -> Result<C64> {
    let (pv, qv, dpv, dqv) = map.chart_parts(v);
    let fv = dpv * qv - pv * dqv;
    let dphi_v = map.chart_deriv(v)?;
    let (xs, ws) = gauss_legendre_01(nr);
    let dth = 2.0 * PI / ntheta as f64;
    let mut terms = Vec::with_capacity(nr * ntheta);
    for i in 0..nr {
        let rho = xs[i];
        let wr = ws[i] * rho * dth;
        for j in 0..ntheta {
            let u = C64::from_polar(rho, theta(j, ntheta));
            let k = if (u - v).norm() < 1e-3 {
                k_series(lt, u - v)
            } else {
                kernel_k(map, u, pv, qv, fv, v)?
            };
            terms.push(k * density(u).conj() * wr);
        }
    }
    Ok(tree_sum(&terms) / (PI * dphi_v))
}

/// Residuals of the derivative identities for the Cauchy limit of the
/// conjugate-power data `conj(u)^n` at one evaluation point.
#[derive(Clone, Debug)]
pub struct WirtingerPoint {
    pub z: C64,
    /// `|d(Jh) - T(dbar h)|`: the holomorphic-derivative identity. The
    /// plain `dh` term vanishes for conjugate-power data.
    pub identity_residual: f64,
    /// `|dbar(Jh)|`: the limit must be holomorphic off the curve.
    pub dbar_residual: f64,
}

#[derive(Clone, Debug)]
pub struct WirtingerReport {
    pub side1: Vec<WirtingerPoint>,
    pub side2: Vec<WirtingerPoint>,
}

impl WirtingerReport {
    pub fn max_residual(&self) -> f64 {
        self.side1
            .iter()
            .chain(self.side2.iter())
            .map(|p| p.identity_residual.max(p.dbar_residual))
            .fold(0.0, f64::max)
    }
}

/// Checks, by central finite differences of step `fd_step`, that the
/// derivative of the Cauchy limit of `conj(u)^n` data is reproduced by the
/// matching singular transform of the chart density `n u^{n-1}`: the
/// desingularized near-side transform at near-side points and the far-side
/// transform at far-side points, with a vanishing conjugate derivative on
/// both sides. Points are given as chart parameters.
pub fn verify_wirtinger_identities(
    map: &UnivalentMap,
    n: usize,
    side1_params: &[C64],
    side2_params: &[C64],
    fd_step: f64,
    quad: QuadSpec,
) -> Result<WirtingerReport> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "conjugate-power data needs n >= 1".into(),
        ));
    }
    if !(fd_step > 0.0) || fd_step > 1e-2 {
        return Err(Error::InvalidParameter(
            "finite-difference step must lie in (0, 1e-2]".into(),
        ));
    }
    let data = |u: C64, _w: C64| u.conj().powu(n as u32);
    let density = |u: C64| u.powu(n as u32 - 1) * (n as f64);
    let sched = Schedule::degree_matched(n, 512);

    let mut zs = Vec::new();
    for &v in side1_params.iter().chain(side2_params.iter()) {
        let z = map.chart(v)?;
        zs.push(z + fd_step);
        zs.push(z - fd_step);
        zs.push(z + C64::new(0.0, fd_step));
        zs.push(z - C64::new(0.0, fd_step));
    }
    let jv = cauchy_j_many(map, &data, &zs, None, &sched)?;

    let mut report = WirtingerReport {
        side1: Vec::new(),
        side2: Vec::new(),
    };
    for (idx, &v) in side1_params
        .iter()
        .chain(side2_params.iter())
        .enumerate()
    {
        let z = map.chart(v)?;
        let dx = (jv[4 * idx] - jv[4 * idx + 1]) / (2.0 * fd_step);
        let dy = (jv[4 * idx + 2] - jv[4 * idx + 3]) / (2.0 * fd_step);
        let d = 0.5 * (dx - C64::i() * dy);
        let dbar = 0.5 * (dx + C64::i() * dy);
        let near_side = idx < side1_params.len();
        let t = if near_side {
            schiffer_t11(map, &density, z, quad, false)?
        } else {
            schiffer_t12(map, &density, z, quad, false)?
        };
        let point = WirtingerPoint {
            z,
            identity_residual: (d - t).norm(),
            dbar_residual: dbar.norm(),
        };
        if near_side {
            report.side1.push(point);
        } else {
            report.side2.push(point);
        }
    }
    Ok(report)
}

/// Collar data model for anchored limits: a finite Laurent part in the
/// chart variable, a finite expansion in its conjugate, and a multiple of
/// `log|u|`. Conjugate exponents must be nonnegative; a negative conjugate
/// power would contribute `s^{-m}` to the contour values and fall outside
/// the polynomial extrapolation model.
#[derive(Clone, Debug, Default)]
pub struct CollarData {
    /// Pairs `(m, alpha)` contributing `alpha u^m`; `m` may be negative.
    pub holo: Vec<(i64, C64)>,
    /// Pairs `(m, beta)` contributing `beta conj(u)^m`; `m >= 0`.
    pub antiholo: Vec<(i64, C64)>,
    /// Coefficient of `log|u|`.
    pub log_coeff: C64,
}

impl CollarData {
    pub fn eval(&self, u: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &(m, a) in &self.holo {
            acc += a * u.powi(m as i32);
        }
        for &(m, b) in &self.antiholo {
            acc += b * u.conj().powi(m as i32);
        }
        acc + self.log_coeff * u.norm().ln()
    }

    /// Largest conjugate exponent, which fixes the polynomial degree of the
    /// contour values in `s = r^2`.
    pub fn antiholo_degree(&self) -> usize {
        self.antiholo
            .iter()
            .map(|&(m, _)| m.max(0) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Harmonic extension of the boundary trace: the trace Fourier
    /// coefficient at frequency `n` collects `holo` terms with `m = n` and
    /// `antiholo` terms with `m = -n`; the `log|u|` part has zero trace.
    pub fn bounce(&self) -> CollarData {
        let mut trace: std::collections::BTreeMap<i64, C64> = std::collections::BTreeMap::new();
        for &(m, a) in &self.holo {
            *trace.entry(m).or_insert_with(|| C64::new(0.0, 0.0)) += a;
        }
        for &(m, b) in &self.antiholo {
            *trace.entry(-m).or_insert_with(|| C64::new(0.0, 0.0)) += b;
        }
        let mut out = CollarData::default();
        for (n, c) in trace {
            if c.norm() == 0.0 {
                continue;
            }
            if n >= 0 {
                out.holo.push((n, c));
            } else {
                out.antiholo.push((-n, c));
            }
        }
        out
    }
}

/// An anchored boundary limit: the extrapolated value after the logarithmic
/// drift of the contour integrals has been removed.
#[derive(Clone, Debug)]
pub struct AnchorValue {
    pub value: C64,
    /// Coefficient of `log r` in the contour values, computed independently
    /// by a residue on a single mid-schedule contour and subtracted before
    /// extrapolation.
    pub log_coefficient: C64,
}

/// Boundary limit of contour integrals of collar data whose model includes
/// a `log|u|` term. Without a kernel the raw integral `\oint A dw` is
/// extrapolated (the log term then integrates to zero against the closed
/// curve); with `kernel = Some((z, q))` the Cauchy-normalized integral
/// `(1/2 pi i) \oint A(u) [1/(w-z) - 1/(w-q)] dw` is anchored by computing
/// its `log r` coefficient from a residue and removing it, leaving data a
/// polynomial in `s = r^2` that extrapolates exactly.
pub fn anchor_limit(
    map: &UnivalentMap,
    data: &CollarData,
    kernel: Option<(C64, Option<C64>)>,
    sched: &Schedule,
) -> Result<AnchorValue> {
    for &(m, _) in &data.antiholo {
        if m < 0 {
            return Err(Error::InvalidParameter(
                "conjugate collar exponents must be nonnegative".into(),
            ));
        }
    }
    let data_fn = |u: C64, _w: C64| data.eval(u);
    let fam = Family::build(map, &data_fn, sched)?;
    match kernel {
        None => {
            let vals: Vec<C64> = (0..fam.curves.len())
                .map(|i| {
                    let terms: Vec<C64> = (0..fam.m)
                        .map(|j| fam.data_vals[i][j] * fam.curves[i].tangents[j])
                        .collect();
                    tree_sum(&terms) * (2.0 * PI / fam.m as f64)
                })
                .collect();
            let ext = extrap::to_boundary(&fam.radii, &vals);
            Ok(AnchorValue {
                value: ext.value,
                log_coefficient: C64::new(0.0, 0.0),
            })
        }
        Some((z, q)) => {
            validate_target(map, &fam, z, "target")?;
            if let Some(qq) = q {
                validate_target(map, &fam, qq, "anchor point")?;
            }
            // The log r coefficient is log_coeff times the residue of the
            // kernel against the curve element, which is radius-independent
            // across the collar; one mid-schedule contour pins it.
            let mid = fam.curves.len() / 2;
            let curve = &fam.curves[mid];
            let terms: Vec<C64> = (0..fam.m)
                .map(|j| {
                    let w = curve.nodes[j];
                    let mut k = (w - z).inv();
                    if let Some(qq) = q {
                        k -= (w - qq).inv();
                    }
                    k * curve.tangents[j]
                })
                .collect();
            let residue = tree_sum(&terms) * C64::new(0.0, -1.0 / fam.m as f64);
            let c_log = data.log_coeff * residue;
            let vals: Vec<C64> = fam
                .j_values(z, q)
                .iter()
                .zip(fam.radii.iter())
                .map(|(&v, &r)| v - c_log * r.ln())
                .collect();
            let ext = extrap::to_boundary(&fam.radii, &vals);
            Ok(AnchorValue {
                value: ext.value,
                log_coefficient: c_log,
            })
        }
    }
}

/// Assembles the coefficient matrix `b_{nk}` from far-side Cauchy limits of
/// conjugate powers: the negated limit of `conj(u)^n` data is the n-th
/// Faber polynomial on the far side, and its positive chart frequencies at
/// a sampling radius past the curve are the `b_{nk}`. Any anchor point `q`
/// must produce the same matrix; the anchor only shifts the constant term.
pub fn grunsky_via_jump(map: &UnivalentMap, n: usize, q: Option<C64>) -> Result<CMat> {
    if n == 0 {
        return Err(Error::InvalidParameter("matrix order must be >= 1".into()));
    }
    let top = map.max_chart_radius().min(1.35);
    if top <= 1.04 {
        return Err(Error::Domain(
            "the chart continues too little past the curve to sample the far side".into(),
        ));
    }
    let rho = 1.0 + 0.45 * (top - 1.0);
    let m = next_pow2(4 * n).max(64);
    let zs: Vec<C64> = (0..m)
        .map(|j| map.chart(C64::from_polar(rho, theta(j, m))))
        .collect::<Result<_>>()?;
    let mut b = CMat::zeros(n, n);
    for row in 1..=n {
        let data = |u: C64, _w: C64| u.conj().powu(row as u32);
        let sched = Schedule::degree_matched(row, 512);
        let vals = cauchy_j_many(map, &data, &zs, q, &sched)?;
        let neg: Vec<C64> = vals.iter().map(|&v| -v).collect();
        let bins = fft::fourier_bins(&neg);
        for k in 1..=n {
            b[(row - 1, k - 1)] = fft::coeff_from_bins(&bins, rho, k as i64);
        }
    }
    Ok(b)
}

/// Applies `w -> (m0 w + m1)/(m2 w + m3)`; `None` stands for the point at
/// infinity on either side.
pub fn moebius_point(m: &[C64; 4], p: Option<C64>) -> Option<C64> {
    match p {
        None => {
            if m[2].norm() < 1e-14 {
                None
            } else {
                Some(m[0] / m[2])
            }
        }
        Some(z) => {
            let den = m[2] * z + m[3];
            if den.norm() < 1e-12 * (1.0 + z.norm()) {
                None
            } else {
                Some((m[0] * z + m[1]) / den)
            }
        }
    }
}

/// Residuals of the Moebius change-of-variable laws.
#[derive(Clone, Debug)]
pub struct MobiusInvariance {
    /// Max over the supplied points of
    /// `|J^q h (z) - J^{M(q)} h (M z)|` for conjugate-power data.
    pub j_residual: f64,
    /// `|M'(z) T^{M phi}(a)(M z) - T^{phi}(a)(z)|` for the far-side
    /// transform at one far-side point.
    pub t12_residual: f64,
}

/// Exercises the exact Moebius covariance of the anchored Cauchy kernel and
/// the far-side transform by recomputing both through a postcomposed chart.
/// `j_params` are chart parameters off the curve (either side);
/// `t12_param` must be a far-side chart parameter.
pub fn mobius_invariance_suite(
    map: &UnivalentMap,
    m: [C64; 4],
    n: usize,
    j_params: &[C64],
    t12_param: C64,
    q: Option<C64>,
) -> Result<MobiusInvariance> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "conjugate-power data needs n >= 1".into(),
        ));
    }
    let det = m[0] * m[3] - m[1] * m[2];
    let wrapped = UnivalentMap::moebius_compose(m, map.clone())?;
    let data = |u: C64, _w: C64| u.conj().powu(n as u32);
    let sched = Schedule::degree_matched(n, 512);
    let q_m = match q {
        None => moebius_point(&m, None),
        Some(qq) => moebius_point(&m, Some(qq)),
    };

    let mut j_residual = 0.0f64;
    for &v in j_params {
        let z = map.chart(v)?;
        let zm = moebius_point(&m, Some(z)).ok_or_else(|| {
            Error::Domain(format!("evaluation point {z} maps to infinity"))
        })?;
        let base = cauchy_j(map, &data, z, q, &sched)?;
        let moved = cauchy_j(&wrapped, &data, zm, q_m, &sched)?;
        j_residual = j_residual.max((base - moved).norm());
    }

    let density = |u: C64| u.powu(n as u32 - 1) * (n as f64);
    let z = map.chart(t12_param)?;
    let zm = moebius_point(&m, Some(z))
        .ok_or_else(|| Error::Domain(format!("evaluation point {z} maps to infinity")))?;
    let den = m[2] * z + m[3];
    let m_prime = det / (den * den);
    let base = schiffer_t12(map, &density, z, QuadSpec::default(), false)?;
    let moved = schiffer_t12(&wrapped, &density, zm, QuadSpec::default(), false)?;
    let t12_residual = (m_prime * moved - base).norm();

    Ok(MobiusInvariance {
        j_residual,
        t12_residual,
    })
}

/// Compares the Cauchy limit of conjugate-power data computed along level
/// curves approaching from the near side against the family approaching
/// through the chart continuation on the far side, at targets beyond both
/// families. With matching chart orientation the two limits agree with no
/// sign flip. Returns the max disagreement over the supplied chart
/// parameters.
pub fn two_sided_agreement(map: &UnivalentMap, n: usize, chart_params: &[C64]) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "conjugate-power data needs n >= 1".into(),
        ));
    }
    let data = |u: C64, _w: C64| u.conj().powu(n as u32);
    let zs: Vec<C64> = chart_params
        .iter()
        .map(|&v| map.chart(v))
        .collect::<Result<_>>()?;
    let inner = Schedule::degree_matched(n, 512);
    let outer = Schedule::degree_matched_side2(n, 512, map.max_chart_radius())?;
    let a = cauchy_j_many(map, &data, &zs, None, &inner)?;
    let b = cauchy_j_many(map, &data, &zs, None, &outer)?;
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faber::{grunsky_matrix, FaberTable};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn same_side_limit_annihilates_conjugate_powers() {
        let map = UnivalentMap::identity(Side::Interior);
        let sched = Schedule::degree_matched(2, 256);
        let data = |u: C64, _: C64| u.conj().powu(2);
        let j = cauchy_j(&map, &data, c(0.3, 0.2), None, &sched).unwrap();
        assert!(j.norm() < 1e-12, "got {j}");
    }

    #[test]
    fn far_side_limit_reflects_conjugate_powers() {
        let map = UnivalentMap::identity(Side::Interior);
        let z = c(1.7, -0.4);
        for n in 1u32..=3 {
            let sched = Schedule::degree_matched(n as usize, 256);
            let data = move |u: C64, _: C64| u.conj().powu(n);
            let j = cauchy_j(&map, &data, z, None, &sched).unwrap();
            let expected = -z.powi(-(n as i32));
            assert!((j - expected).norm() < 1e-11, "n={n}: {j} vs {expected}");
        }
    }

    #[test]
    fn holomorphic_data_passes_through() {
        let map = UnivalentMap::identity(Side::Interior);
        let sched = Schedule::degree_matched(3, 256);
        let data = |u: C64, _: C64| u.powu(3);
        let inside = c(0.3, 0.2);
        let j_in = cauchy_j(&map, &data, inside, None, &sched).unwrap();
        assert!((j_in - inside.powu(3)).norm() < 1e-12);
        let j_out = cauchy_j(&map, &data, c(1.7, -0.4), None, &sched).unwrap();
        assert!(j_out.norm() < 1e-12);
    }

    #[test]
    fn far_side_values_build_faber_polynomials_for_exterior_identity() {
        let map = UnivalentMap::identity(Side::Exterior);
        let up = C64::from_polar(1.3, 0.7);
        let z = map.chart(up).unwrap();
        let sched = Schedule::degree_matched(3, 256);
        let data = |u: C64, _: C64| u.conj().powu(3);
        let j = cauchy_j(&map, &data, z, None, &sched).unwrap();
        let expected = up.powi(-3);
        assert!((-j - expected).norm() < 1e-11, "{j} vs {expected}");
    }

    #[test]
    fn joukowski_far_side_matches_faber_table() {
        let map = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        let table = FaberTable::build(&map, 5).unwrap();
        let sched = Schedule::degree_matched(3, 512);
        let data = |u: C64, _: C64| u.conj().powu(3);
        for &th in &[0.3, 2.1] {
            let z = map.chart(C64::from_polar(1.25, th)).unwrap();
            let j = cauchy_j(&map, &data, z, None, &sched).unwrap();
            let phi3 = table.apply(3, z);
            assert!((-j - phi3).norm() < 1e-9, "{j} vs {phi3}");
        }
    }

    #[test]
    fn points_in_the_swept_collar_are_rejected() {
        let map = UnivalentMap::identity(Side::Interior);
        let sched = Schedule::degree_matched(1, 64);
        let data = |u: C64, _: C64| u.conj();
        // A target between the contours and the curve never sees a clean
        // limit: the family crosses it mid-extrapolation.
        let err = cauchy_j(&map, &data, c(0.97, 0.0), None, &sched).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "got {err:?}");
        // Same veto for an anchor point riding on a quadrature node: the
        // perturbed retries move the contours but the point stays inside
        // the swept band.
        let r0 = sched.radii()[0];
        let colliding = C64::from_polar(r0, theta(5, 64)) + c(1e-8, 0.0);
        let err = cauchy_j(&map, &data, c(0.1, 0.05), Some(colliding), &sched).unwrap_err();
        assert!(
            matches!(err, Error::Domain(_) | Error::NodeCollision(_)),
            "got {err:?}"
        );
        // An anchor point independence check on valid geometry: moving q
        // only shifts both values identically, so differences agree.
        let (z1, z2) = (c(0.1, 0.05), c(-0.2, 0.1));
        let qa = Some(c(-2.0, 0.4));
        let qb = Some(c(1.6, -1.1));
        let da = cauchy_j(&map, &data, z1, qa, &sched).unwrap()
            - cauchy_j(&map, &data, z2, qa, &sched).unwrap();
        let db = cauchy_j(&map, &data, z1, qb, &sched).unwrap()
            - cauchy_j(&map, &data, z2, qb, &sched).unwrap();
        assert!((da - db).norm() < 1e-11, "{da} vs {db}");
    }

    #[test]
    fn jump_roundtrip_on_the_circle() {
        let map = UnivalentMap::identity(Side::Interior);
        let mut data = FourierBoundaryData::zero(4);
        data.set_coeff(0, c(0.3, 0.1));
        data.set_coeff(1, c(1.0, -0.5));
        data.set_coeff(3, c(0.2, 0.2));
        data.set_coeff(-1, c(-0.4, 0.9));
        data.set_coeff(-4, c(0.0, -0.6));
        let parts = jump_decompose(&map, &data, None, 4).unwrap();
        assert!(parts.residual < 1e-11, "residual {}", parts.residual);
        assert!((parts.h1[0] - data.coeff(0)).norm() < 1e-11);
        assert!((parts.h1[1] - data.coeff(1)).norm() < 1e-11);
        assert!((parts.h1[3] - data.coeff(3)).norm() < 1e-11);
        assert!((parts.h2_faber[0] + data.coeff(-1)).norm() < 1e-11);
        assert!((parts.h2_faber[3] + data.coeff(-4)).norm() < 1e-11);
    }

    #[test]
    fn jump_roundtrip_joukowski() {
        let map = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        let mut data = FourierBoundaryData::zero(3);
        data.set_coeff(0, c(0.2, 0.0));
        data.set_coeff(1, c(0.8, -0.3));
        data.set_coeff(2, c(-0.1, 0.4));
        data.set_coeff(-1, c(0.5, 0.25));
        data.set_coeff(-3, c(-0.3, 0.1));
        let parts = jump_decompose(&map, &data, None, 16).unwrap();
        assert!(parts.residual < 1e-6, "residual {}", parts.residual);
    }

    #[test]
    fn far_side_transform_disk_oracle() {
        let map = UnivalentMap::identity(Side::Interior);
        let z = C64::from_polar(2.0, 0.3);
        for n in 1u32..=5 {
            let density = move |u: C64| u.powu(n - 1);
            let got = schiffer_t12(&map, &density, z, QuadSpec::default(), true).unwrap();
            let expected = z.powi(-(n as i32) - 1);
            let rel = (got - expected).norm() / expected.norm();
            assert!(rel < 1e-7, "n={n}: rel {rel}");
        }
    }

    #[test]
    fn near_side_transform_vanishes_for_identity_and_moebius() {
        let density = |u: C64| u * 2.0;
        let ident = UnivalentMap::identity(Side::Interior);
        let z = c(0.3, 0.1);
        let v0 = schiffer_t11(&ident, &density, z, QuadSpec::default(), false).unwrap();
        assert!(v0.norm() < 1e-12, "identity gave {v0}");
        let mob = UnivalentMap::moebius_compose(
            [c(1.0, 0.0), c(0.2, 0.0), c(0.25, 0.0), c(1.0, 0.0)],
            UnivalentMap::identity(Side::Interior),
        )
        .unwrap();
        let zm = mob.chart(c(0.3, 0.1)).unwrap();
        let v1 = schiffer_t11(&mob, &density, zm, QuadSpec::default(), false).unwrap();
        assert!(v1.norm() < 1e-8, "moebius gave {v1}");
    }

    #[test]
    fn near_side_transform_matches_joukowski_closed_form() {
        let t = 0.5;
        let map = UnivalentMap::joukowski(c(t, 0.0)).unwrap();
        let v = c(0.4, 0.3);
        let z = map.chart(v).unwrap();
        let n = 2u32;
        let density = move |u: C64| u.powu(n - 1) * (n as f64);
        let got = schiffer_t11(&map, &density, z, QuadSpec::default(), true).unwrap();
        // (1/pi) \iint -t/(t u v - 1)^2 conj(n u^{n-1}) dA = -n t^n v^{n-1},
        // then divide by phi'(v).
        let dphi = map.chart_deriv(v).unwrap();
        let expected = -v.powu(n - 1) * (n as f64) * t.powi(n as i32) / dphi;
        let rel = (got - expected).norm() / expected.norm();
        assert!(rel < 1e-6, "rel {rel}: {got} vs {expected}");
    }

    #[test]
    fn kernel_series_matches_closed_form_near_diagonal() {
        let t = 0.5;
        let map = UnivalentMap::joukowski(c(t, 0.0)).unwrap();
        let v = c(0.3, 0.25);
        let closed = |u: C64, v: C64| {
            let d = u * v * t - 1.0;
            -t / (d * d)
        };
        // Separated points go through the projective kernel.
        let u_far = c(-0.5, 0.1);
        let k_far = bergman_schiffer_kernel(&map, v, u_far).unwrap() * C64::new(0.0, 2.0 * PI);
        assert!((k_far - closed(u_far, v)).norm() < 1e-12);
        // Near-diagonal points go through the local series.
        let u_near = v + c(7e-5, 7e-5);
        let k_near = bergman_schiffer_kernel(&map, v, u_near).unwrap() * C64::new(0.0, 2.0 * PI);
        let rel = (k_near - closed(u_near, v)).norm() / closed(u_near, v).norm();
        assert!(rel < 1e-8, "rel {rel}");
    }

    #[test]
    fn wirtinger_identities_hold_on_joukowski() {
        let map = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        let report = verify_wirtinger_identities(
            &map,
            2,
            &[C64::from_polar(0.45, 1.1)],
            &[C64::from_polar(1.25, 0.4)],
            1e-4,
            QuadSpec::default(),
        )
        .unwrap();
        assert!(
            report.max_residual() < 1e-5,
            "max residual {}",
            report.max_residual()
        );
    }

    #[test]
    fn anchored_limit_circle_oracle() {
        let map = UnivalentMap::identity(Side::Interior);
        let collar = CollarData {
            holo: vec![(-1, c(1.0, 0.0))],
            antiholo: vec![(1, c(1.0, 0.0))],
            log_coeff: c(0.0, 0.0),
        };
        let sched = Schedule::degree_matched(1, 256);
        let got = anchor_limit(&map, &collar, None, &sched).unwrap();
        let expected = c(0.0, 4.0 * PI);
        assert!((got.value - expected).norm() < 1e-10, "{}", got.value);
        let bounced = anchor_limit(&map, &collar.bounce(), None, &sched).unwrap();
        assert!((bounced.value - expected).norm() < 1e-10, "{}", bounced.value);
    }

    #[test]
    fn anchored_limit_removes_log_and_sees_zero_trace() {
        let map = UnivalentMap::identity(Side::Interior);
        let collar = CollarData {
            holo: vec![(-1, c(-1.0, 0.0))],
            antiholo: vec![(1, c(1.0, 0.0))],
            log_coeff: c(2.0, 0.0),
        };
        let sched = Schedule::degree_matched(1, 256);
        let got = anchor_limit(&map, &collar, Some((c(0.2, 0.0), None)), &sched).unwrap();
        assert!(got.value.norm() < 1e-8, "value {}", got.value);
        assert!(
            (got.log_coefficient - c(2.0, 0.0)).norm() < 1e-8,
            "log coefficient {}",
            got.log_coefficient
        );
    }

    #[test]
    fn jump_route_reproduces_grunsky_matrix_with_any_anchor_point() {
        let map = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        let n = 4;
        let reference = grunsky_matrix(&map, n).unwrap().b;
        let from_inf = grunsky_via_jump(&map, n, None).unwrap();
        let q = map.chart(c(1.3, 0.0)).unwrap();
        let from_q = grunsky_via_jump(&map, n, Some(q)).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (from_inf[(i, j)] - reference[(i, j)]).norm() < 1e-8,
                    "({i},{j}) anchored at infinity"
                );
                assert!(
                    (from_q[(i, j)] - from_inf[(i, j)]).norm() < 1e-8,
                    "({i},{j}) anchor independence"
                );
            }
        }
    }

    #[test]
    fn moebius_change_of_chart_leaves_limits_invariant() {
        let map = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        let m = [c(1.0, 0.0), c(0.3, 0.0), c(0.15, 0.0), c(1.0, 0.0)];
        let report = mobius_invariance_suite(
            &map,
            m,
            2,
            &[c(0.4, 0.0), C64::from_polar(1.25, 0.9)],
            C64::from_polar(1.3, 0.5),
            None,
        )
        .unwrap();
        assert!(report.j_residual < 1e-7, "J residual {}", report.j_residual);
        assert!(
            report.t12_residual < 1e-7,
            "transform residual {}",
            report.t12_residual
        );
    }

    #[test]
    fn both_approach_directions_agree_off_the_curve() {
        let map = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        let pts = [C64::from_polar(1.3, 0.2), C64::from_polar(1.3, 2.4)];
        let diff = two_sided_agreement(&map, 2, &pts).unwrap();
        assert!(diff < 1e-8, "two-sided disagreement {diff}");
    }
}
