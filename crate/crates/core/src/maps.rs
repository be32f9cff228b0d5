//! Catalog of conformal maps onto the two sides of an analytic curve.
//!
//! Every map exposes one *chart* `phi : D -> Omega_1` over the unit disk in
//! the parameter `u`. A map declared on the interior side uses its native
//! series directly, `phi(u) = f(u)`; a map declared on the exterior side is
//! folded through `u = 1/z`, so `phi(u) = g(1/u)` and `phi(0)` is the point
//! at infinity. Level curves `Gamma_r = phi(r S^1)` always carry the
//! counterclockwise orientation *in u*; for exterior charts that is the
//! clockwise orientation in the plane, and all operator code in this crate
//! is written against the chart orientation.
//!
//! Charts are evaluated projectively as pairs `(p, q)` with `phi = p / q`,
//! which keeps poles (the chart value at infinity, Moebius denominators)
//! exact instead of overflowing.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Which canonical domain the native map is defined on. The chart image is
/// side 1 in either case; side 2 is the complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

#[derive(Clone, Debug)]
enum MapKind {
    Identity { side: Side },
    /// `f(u) = a_1 u + a_2 u^2 + ...`, `a_1 != 0`, fixing `f(0) = 0`.
    Taylor { coeffs: Vec<C64> },
    /// `g(z) = z + t/z` on `|z| > 1`.
    Joukowski { t: C64 },
    /// `w -> (m0 w + m1)/(m2 w + m3)` applied after the inner map.
    Moebius { m: [C64; 4], inner: Box<UnivalentMap> },
}

/// A conformal map from one side of the unit circle onto one side of an
/// analytic curve, addressed through its disk chart.
#[derive(Clone, Debug)]
pub struct UnivalentMap {
    kind: MapKind,
    jordan_required: bool,
}

/// Chart value, denominator, and their `u`-derivatives: `phi = p/q`,
/// `phi' = (p'q - pq')/q^2`.
#[derive(Clone, Copy, Debug)]
struct Proj {
    p: C64,
    q: C64,
    dp: C64,
    dq: C64,
}

/// One discretized level curve `Gamma_r` with `m` uniform chart nodes.
#[derive(Clone, Debug)]
pub struct LevelCurve {
    pub r: f64,
    /// `phi(r e^{i theta_j})`.
    pub nodes: Vec<C64>,
    /// `d/dtheta phi(r e^{i theta_j})`, counterclockwise in `u`.
    pub tangents: Vec<C64>,
}

/// Outcome of the pairwise separation / derivative screen for injectivity.
#[derive(Clone, Debug)]
pub struct UnivalenceReport {
    pub min_separation_ratio: f64,
    pub min_derivative: f64,
    pub witness: Option<(C64, C64)>,
    pub passes: bool,
}

impl UnivalentMap {
    pub fn identity(side: Side) -> Self {
        UnivalentMap {
            kind: MapKind::Identity { side },
            jordan_required: true,
        }
    }

    /// Interior map given by Taylor coefficients `a_1..a_K` of
    /// `f(u) = sum a_k u^k`. Univalence on the disk is the caller's claim;
    /// [`UnivalentMap::univalence_check`] screens it numerically.
    pub fn taylor_interior(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs[0].norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "taylor map needs a nonzero linear coefficient".into(),
            ));
        }
        Ok(UnivalentMap {
            kind: MapKind::Taylor { coeffs },
            jordan_required: true,
        })
    }

    /// Exterior map `g(z) = z + t/z`, `|t| <= 1`. With `|t| = 1` the image
    /// curve degenerates (cusps), which is rejected while a Jordan curve is
    /// required.
    pub fn joukowski(t: C64) -> Result<Self> {
        Self::joukowski_with(t, true)
    }

    pub fn joukowski_with(t: C64, jordan_required: bool) -> Result<Self> {
        if t.norm() > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "joukowski parameter |t| = {} exceeds 1; the map is not injective",
                t.norm()
            )));
        }
        if jordan_required && (t.norm() - 1.0).abs() < 1e-14 {
            return Err(Error::InvalidParameter(
                "joukowski with |t| = 1 produces a cusped curve, not a Jordan curve".into(),
            ));
        }
        Ok(UnivalentMap {
            kind: MapKind::Joukowski { t },
            jordan_required,
        })
    }

    /// Post-composition with the Moebius map `w -> (m0 w + m1)/(m2 w + m3)`.
    /// Pole collisions with the curve are reported lazily at evaluation.
    pub fn moebius_compose(m: [C64; 4], inner: UnivalentMap) -> Result<Self> {
        let det = m[0] * m[3] - m[1] * m[2];
        if det.norm() < 1e-14 {
            return Err(Error::InvalidParameter(
                "moebius matrix is singular".into(),
            ));
        }
        let jordan_required = inner.jordan_required;
        Ok(UnivalentMap {
            kind: MapKind::Moebius {
                m,
                inner: Box::new(inner),
            },
            jordan_required,
        })
    }

    pub fn side(&self) -> Side {
        match &self.kind {
            MapKind::Identity { side } => *side,
            MapKind::Taylor { .. } => Side::Interior,
            MapKind::Joukowski { .. } => Side::Exterior,
            MapKind::Moebius { inner, .. } => inner.side(),
        }
    }

    pub fn jordan_required(&self) -> bool {
        self.jordan_required
    }

    fn proj(&self, u: C64) -> Proj {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match &self.kind {
            MapKind::Identity { side: Side::Interior } => Proj {
                p: u,
                q: one,
                dp: one,
                dq: zero,
            },
            MapKind::Identity { side: Side::Exterior } => Proj {
                p: one,
                q: u,
                dp: zero,
                dq: one,
            },
            MapKind::Taylor { coeffs } => {
                let mut p = zero;
                let mut dp = zero;
                for (k, a) in coeffs.iter().enumerate().rev() {
                    dp = dp * u + (k + 1) as f64 * a;
                    p = p * u + a;
                }
                Proj {
                    p: p * u,
                    q: one,
                    dp,
                    dq: zero,
                }
            }
            MapKind::Joukowski { t } => Proj {
                // phi(u) = 1/u + t u = (1 + t u^2)/u.
                p: one + t * u * u,
                q: u,
                dp: 2.0 * t * u,
                dq: one,
            },
            MapKind::Moebius { m, inner } => {
                let b = inner.proj(u);
                Proj {
                    p: m[0] * b.p + m[1] * b.q,
                    q: m[2] * b.p + m[3] * b.q,
                    dp: m[0] * b.dp + m[1] * b.dq,
                    dq: m[2] * b.dp + m[3] * b.dq,
                }
            }
        }
    }

    /// Projective chart data `(p, q, p', q')` with `phi = p/q`; lets kernel
    /// code form expressions like `phi'(u)/(phi(u) - z)^2` without meeting
    /// the chart pole.
    pub(crate) fn chart_parts(&self, u: C64) -> (C64, C64, C64, C64) {
        let pr = self.proj(u);
        (pr.p, pr.q, pr.dp, pr.dq)
    }

    fn scale(&self) -> f64 {
        match &self.kind {
            MapKind::Identity { .. } => 1.0,
            MapKind::Taylor { coeffs } => coeffs.iter().map(|a| a.norm()).sum::<f64>().max(1.0),
            MapKind::Joukowski { .. } => 2.0,
            MapKind::Moebius { m, inner } => {
                let mm = m.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1.0);
                mm * inner.scale()
            }
        }
    }

    /// `phi(u)`; a pole of the chart (the point at infinity, or a Moebius
    /// denominator zero on the curve) is a domain error.
    pub fn chart(&self, u: C64) -> Result<C64> {
        let pr = self.proj(u);
        if pr.q.norm() <= 1e-290 || pr.q.norm() < 1e-14 * pr.p.norm().min(1.0) {
            return Err(Error::Domain(format!(
                "chart pole at u = {u}; the value there is the point at infinity"
            )));
        }
        Ok(pr.p / pr.q)
    }

    /// `phi'(u)` with the same pole handling as [`UnivalentMap::chart`].
    pub fn chart_deriv(&self, u: C64) -> Result<C64> {
        let pr = self.proj(u);
        if pr.q.norm() <= 1e-290 {
            return Err(Error::Domain(format!("chart pole at u = {u}")));
        }
        Ok((pr.dp * pr.q - pr.p * pr.dq) / (pr.q * pr.q))
    }

    /// `phi(0)` when finite; `None` marks the point at infinity.
    pub fn basepoint(&self) -> Option<C64> {
        self.chart(C64::new(0.0, 0.0)).ok()
    }

    /// Radius up to which the chart continues analytically and injectively
    /// past the unit circle: `1/sqrt|t|` for the Joukowski family, the
    /// smallest critical radius for Taylor maps, unbounded for the identity.
    /// Moebius wrapping inherits the inner radius; its pole is still checked
    /// lazily at evaluation.
    pub fn max_chart_radius(&self) -> f64 {
        match &self.kind {
            MapKind::Identity { .. } => f64::INFINITY,
            MapKind::Taylor { coeffs } => {
                // Critical points solve f'(u) = sum (k+1) a_{k+1} u^k = 0.
                let deriv: Vec<C64> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| (k + 1) as f64 * a)
                    .collect();
                polynomial_roots(&deriv)
                    .into_iter()
                    .map(|z| z.norm())
                    .fold(f64::INFINITY, f64::min)
            }
            MapKind::Joukowski { t } => {
                if t.norm() == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / t.norm().sqrt()
                }
            }
            MapKind::Moebius { inner, .. } => inner.max_chart_radius(),
        }
    }

    /// Solves `phi(u) = w` by damped Newton iteration from the best of a
    /// coarse grid of starting points.
    pub fn invert(&self, w: C64) -> Result<C64> {
        let r_cap = self.max_chart_radius().min(1.6);
        let mut best = C64::new(0.0, 0.0);
        let mut best_res = f64::INFINITY;
        let mut starts: Vec<C64> = vec![C64::new(0.0, 0.0)];
        for &r in &[0.2, 0.45, 0.7, 0.9, 1.05_f64.min(0.5 + r_cap / 2.0)] {
            if r >= r_cap {
                continue;
            }
            for j in 0..16 {
                starts.push(C64::from_polar(r, fft::theta(j, 16)));
            }
        }
        let resid = |u: C64| -> f64 {
            let pr = self.proj(u);
            // |p - w q| scales both branches of the pole uniformly.
            (pr.p - w * pr.q).norm() / (1.0 + pr.q.norm() * (1.0 + w.norm()))
        };
        for &s in &starts {
            let r = resid(s);
            if r < best_res {
                best_res = r;
                best = s;
            }
        }
        let tol = 1e-12 * (1.0 + w.norm()).min(self.scale() * 10.0);
        let mut u = best;
        for _ in 0..50 {
            let pr = self.proj(u);
            let f = pr.p - w * pr.q;
            if pr.q.norm() > 1e-200 && (f / pr.q).norm() <= tol * (1.0 + w.norm()) {
                return Ok(u);
            }
            let df = pr.dp - w * pr.dq;
            if df.norm() < 1e-290 {
                break;
            }
            let full = f / df;
            // Damp until the residual decreases.
            let cur = resid(u);
            let mut lambda = 1.0;
            let mut moved = false;
            for _ in 0..25 {
                let cand = u - lambda * full;
                if cand.norm() < r_cap && resid(cand) < cur {
                    u = cand;
                    moved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let pr = self.proj(u);
        if pr.q.norm() > 1e-200 && (pr.p / pr.q - w).norm() <= 1e-9 * (1.0 + w.norm()) {
            return Ok(u);
        }
        Err(Error::Inversion(format!(
            "newton failed to solve phi(u) = {w} within the chart radius {r_cap}"
        )))
    }

    /// Discretizes `Gamma_r = phi(r S^1)` on `m` uniform nodes (`m` a power
    /// of two). Tangents are theta-derivatives, so a contour integral is
    /// `(2 pi / m) sum h(node_j) tangent_j / (2 pi i)`.
    pub fn level_curve(&self, r: f64, m: usize) -> Result<LevelCurve> {
        if !m.is_power_of_two() || m < 4 {
            return Err(Error::InvalidParameter(format!(
                "level curve grid {m} must be a power of two (>= 4)"
            )));
        }
        if r <= 0.0 || r >= self.max_chart_radius() {
            return Err(Error::Domain(format!(
                "level curve radius {r} outside the chart's validity (0, {})",
                self.max_chart_radius()
            )));
        }
        let mut nodes = Vec::with_capacity(m);
        let mut tangents = Vec::with_capacity(m);
        for j in 0..m {
            let u = C64::from_polar(r, fft::theta(j, m));
            nodes.push(self.chart(u)?);
            tangents.push(self.chart_deriv(u)? * u * C64::new(0.0, 1.0));
        }
        Ok(LevelCurve { r, nodes, tangents })
    }

    /// Screens injectivity on a polar grid: the smallest divided difference
    /// `|phi(u) - phi(v)|/|u - v|` over all pairs and the smallest `|phi'|`
    /// must both clear `threshold`. Failure reports a witness pair. A pass
    /// is evidence, not proof.
    pub fn univalence_check(&self, m: usize, threshold: f64) -> Result<UnivalenceReport> {
        let radii = [0.3, 0.6, 0.9, 0.99];
        let mut pts = Vec::with_capacity(radii.len() * m);
        for &r in &radii {
            if r >= self.max_chart_radius() {
                continue;
            }
            for j in 0..m {
                pts.push(C64::from_polar(r, fft::theta(j, m)));
            }
        }
        let vals: Vec<C64> = pts.iter().map(|&u| self.chart(u)).collect::<Result<_>>()?;
        let mut min_ratio = f64::INFINITY;
        let mut witness = None;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let du = (pts[i] - pts[j]).norm();
                if du < 1e-9 {
                    continue;
                }
                let ratio = (vals[i] - vals[j]).norm() / du;
                if ratio < min_ratio {
                    min_ratio = ratio;
                    witness = Some((pts[i], pts[j]));
                }
            }
        }
        let mut min_deriv = f64::INFINITY;
        for &u in &pts {
            // Compare the chart derivative on the native scale: for exterior
            // charts |phi'| blows up at 0 and decays like 1/|u|^2, so weight
            // it back.
            let d = self.chart_deriv(u)?.norm()
                * match self.side() {
                    Side::Interior => 1.0,
                    Side::Exterior => u.norm_sqr(),
                };
            min_deriv = min_deriv.min(d);
        }
        let passes = min_ratio > threshold && min_deriv > threshold;
        Ok(UnivalenceReport {
            min_separation_ratio: min_ratio,
            min_derivative: min_deriv,
            witness: if passes { None } else { witness },
            passes,
        })
    }

    pub fn from_config(cfg: &MapConfig) -> Result<Self> {
        match cfg {
            MapConfig::Identity { side } => Ok(UnivalentMap::identity(*side)),
            MapConfig::Taylor { coeffs } => {
                UnivalentMap::taylor_interior(coeffs.iter().map(C64::from).collect())
            }
            MapConfig::Joukowski { t, jordan_required } => {
                UnivalentMap::joukowski_with(t.into(), *jordan_required)
            }
            MapConfig::Moebius { matrix, inner } => {
                let m = [
                    C64::from(&matrix[0]),
                    C64::from(&matrix[1]),
                    C64::from(&matrix[2]),
                    C64::from(&matrix[3]),
                ];
                UnivalentMap::moebius_compose(m, UnivalentMap::from_config(inner)?)
            }
        }
    }

    pub fn to_config(&self) -> MapConfig {
        match &self.kind {
            MapKind::Identity { side } => MapConfig::Identity { side: *side },
            MapKind::Taylor { coeffs } => MapConfig::Taylor {
                coeffs: coeffs.iter().map(ComplexWire::from).collect(),
            },
            MapKind::Joukowski { t } => MapConfig::Joukowski {
                t: ComplexWire::from(t),
                jordan_required: self.jordan_required,
            },
            MapKind::Moebius { m, inner } => MapConfig::Moebius {
                matrix: [
                    ComplexWire::from(&m[0]),
                    ComplexWire::from(&m[1]),
                    ComplexWire::from(&m[2]),
                    ComplexWire::from(&m[3]),
                ],
                inner: Box::new(inner.to_config()),
            },
        }
    }

    /// Short name for reports.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            MapKind::Identity { .. } => "identity",
            MapKind::Taylor { .. } => "taylor",
            MapKind::Joukowski { .. } => "joukowski",
            MapKind::Moebius { .. } => "moebius",
        }
    }
}

/// Wire form of a complex number.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexWire {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<&ComplexWire> for C64 {
    fn from(w: &ComplexWire) -> C64 {
        C64::new(w.re, w.im)
    }
}

impl From<&C64> for ComplexWire {
    fn from(c: &C64) -> ComplexWire {
        ComplexWire { re: c.re, im: c.im }
    }
}

fn default_true() -> bool {
    true
}

/// JSON description of a catalog map.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapConfig {
    Identity {
        side: Side,
    },
    Taylor {
        coeffs: Vec<ComplexWire>,
    },
    Joukowski {
        t: ComplexWire,
        #[serde(default = "default_true")]
        jordan_required: bool,
    },
    Moebius {
        matrix: [ComplexWire; 4],
        inner: Box<MapConfig>,
    },
}

/// All roots of `c_0 + c_1 z + ... + c_d z^d` by Weierstrass simultaneous
/// iteration; adequate for the small derivative polynomials of the catalog.
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut c = coeffs.to_vec();
    while c.last().map(|t| t.norm() < 1e-300).unwrap_or(false) {
        c.pop();
    }
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let monic: Vec<C64> = c.iter().map(|a| a / lead).collect();
    let eval = |z: C64| -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for a in monic.iter().rev() {
            s = s * z + a;
        }
        s
    };
    // Cauchy bound on root moduli.
    let bound = 1.0 + monic[..d].iter().map(|a| a.norm()).fold(0.0f64, f64::max);
    let mut roots: Vec<C64> = (0..d)
        .map(|k| C64::from_polar(0.5 * bound, 0.37 + 2.0 * std::f64::consts::PI * k as f64 / d as f64))
        .collect();
    for _ in 0..300 {
        let mut max_step = 0.0f64;
        for k in 0..d {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..d {
                if j != k {
                    denom *= roots[k] - roots[j];
                }
            }
            if denom.norm() < 1e-290 {
                continue;
            }
            let step = eval(roots[k]) / denom;
            roots[k] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 * bound {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_charts() {
        let fi = UnivalentMap::identity(Side::Interior);
        assert_eq!(fi.chart(c(0.3, 0.1)).unwrap(), c(0.3, 0.1));
        assert_eq!(fi.chart_deriv(c(0.3, 0.1)).unwrap(), c(1.0, 0.0));
        assert_eq!(fi.basepoint(), Some(c(0.0, 0.0)));

        let fe = UnivalentMap::identity(Side::Exterior);
        assert!((fe.chart(c(0.5, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((fe.chart_deriv(c(0.5, 0.0)).unwrap() - c(-4.0, 0.0)).norm() < 1e-15);
        assert_eq!(fe.basepoint(), None);
        assert!(matches!(fe.chart(c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn joukowski_chart_and_radius() {
        let g = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        let u = c(0.4, -0.2);
        let want = 1.0 / u + 0.5 * u;
        assert!((g.chart(u).unwrap() - want).norm() < 1e-14);
        let want_d = -1.0 / (u * u) + c(0.5, 0.0);
        assert!((g.chart_deriv(u).unwrap() - want_d).norm() < 1e-13);
        assert!((g.max_chart_radius() - 2.0f64.sqrt()).abs() < 1e-14);
        assert!(UnivalentMap::joukowski(c(1.0, 0.0)).is_err());
        assert!(UnivalentMap::joukowski_with(c(1.0, 0.0), false).is_ok());
        assert!(UnivalentMap::joukowski(c(1.2, 0.0)).is_err());
    }

    #[test]
    fn taylor_chart_and_critical_radius() {
        let f = UnivalentMap::taylor_interior(vec![c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        let u = c(0.2, 0.3);
        assert!((f.chart(u).unwrap() - (u + 0.5 * u * u)).norm() < 1e-15);
        // f'(u) = 1 + u vanishes at -1: critical radius 1.
        assert!((f.max_chart_radius() - 1.0).abs() < 1e-9);
        assert!(UnivalentMap::taylor_interior(vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn moebius_wrap_and_lazy_pole() {
        // w -> 1/w turns the exterior identity chart into the interior one.
        let m = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let wrapped =
            UnivalentMap::moebius_compose(m, UnivalentMap::identity(Side::Exterior)).unwrap();
        let u = c(0.3, -0.6);
        assert!((wrapped.chart(u).unwrap() - u).norm() < 1e-15);
        assert_eq!(wrapped.basepoint(), Some(c(0.0, 0.0)));

        // Pole of w -> 1/(w - 0.5) sits on the chart at u = 0.5.
        let m2 = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-0.5, 0.0)];
        let shifted =
            UnivalentMap::moebius_compose(m2, UnivalentMap::identity(Side::Interior)).unwrap();
        assert!(matches!(shifted.chart(c(0.5, 0.0)), Err(Error::Domain(_))));
        assert!(shifted.chart(c(0.4, 0.0)).is_ok());

        let singular = [c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)];
        assert!(
            UnivalentMap::moebius_compose(singular, UnivalentMap::identity(Side::Interior))
                .is_err()
        );
    }

    #[test]
    fn invert_round_trips() {
        let maps = vec![
            UnivalentMap::identity(Side::Interior),
            UnivalentMap::identity(Side::Exterior),
            UnivalentMap::joukowski(c(0.5, 0.2)).unwrap(),
            UnivalentMap::taylor_interior(vec![c(1.0, 0.0), c(0.3, -0.1), c(0.0, 0.05)]).unwrap(),
        ];
        for map in &maps {
            for j in 0..8 {
                let u = C64::from_polar(0.8, fft::theta(j, 8) + 0.1);
                let w = map.chart(u).unwrap();
                let back = map.invert(w).unwrap();
                assert!(
                    (back - u).norm() < 1e-9,
                    "{} failed at u = {u}: got {back}",
                    map.kind_name()
                );
            }
        }
        // A point far outside any chart image radius errors.
        let f = UnivalentMap::taylor_interior(vec![c(1.0, 0.0), c(0.3, 0.0)]).unwrap();
        assert!(f.invert(c(50.0, 0.0)).is_err());
    }

    #[test]
    fn level_curve_orientation_is_chart_ccw() {
        // Interior identity: winding of Gamma_r around 0 is +1.
        let fi = UnivalentMap::identity(Side::Interior);
        let lc = fi.level_curve(0.7, 64).unwrap();
        let winding: C64 = lc
            .nodes
            .iter()
            .zip(&lc.tangents)
            .map(|(z, t)| t / z)
            .sum::<C64>()
            / c(0.0, 64.0);
        assert!((winding - c(1.0, 0.0)).norm() < 1e-12);

        // Exterior chart: same u-orientation winds -1 around an interior
        // point of the complement (clockwise in the plane).
        let g = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        let lc2 = g.level_curve(0.9, 128).unwrap();
        let winding2: C64 = lc2
            .nodes
            .iter()
            .zip(&lc2.tangents)
            .map(|(z, t)| t / z)
            .sum::<C64>()
            / c(0.0, 128.0);
        assert!((winding2 + c(1.0, 0.0)).norm() < 1e-12);

        assert!(g.level_curve(1.5, 64).is_err());
        assert!(fi.level_curve(0.5, 48).is_err());
    }

    #[test]
    fn univalence_screen_flags_folding_quadratics() {
        let good = UnivalentMap::taylor_interior(vec![c(1.0, 0.0), c(0.3, 0.0)]).unwrap();
        let rep = good.univalence_check(48, 0.05).unwrap();
        assert!(rep.passes, "ratio {}", rep.min_separation_ratio);

        let bad = UnivalentMap::taylor_interior(vec![c(1.0, 0.0), c(0.8, 0.0)]).unwrap();
        let rep2 = bad.univalence_check(48, 0.05).unwrap();
        assert!(!rep2.passes);
        let (a, b) = rep2.witness.expect("failing screen carries a witness");
        let fa = bad.chart(a).unwrap();
        let fb = bad.chart(b).unwrap();
        assert!((fa - fb).norm() / (a - b).norm() < 0.05);

        let jk = UnivalentMap::joukowski(c(0.5, 0.0)).unwrap();
        assert!(jk.univalence_check(48, 0.05).unwrap().passes);
    }

    #[test]
    fn config_round_trip() {
        let cfg_json = r#"{
            "kind": "moebius",
            "matrix": [{"re":1.0}, {"re":0.0}, {"re":0.0,"im":0.1}, {"re":1.0}],
            "inner": {"kind": "joukowski", "t": {"re": 0.5, "im": 0.0}}
        }"#;
        let cfg: MapConfig = serde_json::from_str(cfg_json).unwrap();
        let map = UnivalentMap::from_config(&cfg).unwrap();
        assert_eq!(map.kind_name(), "moebius");
        assert_eq!(map.side(), Side::Exterior);
        let echo = map.to_config();
        let map2 = UnivalentMap::from_config(&echo).unwrap();
        let u = c(0.5, 0.25);
        assert!((map.chart(u).unwrap() - map2.chart(u).unwrap()).norm() < 1e-15);

        let ident: MapConfig =
            serde_json::from_str(r#"{"kind":"identity","side":"interior"}"#).unwrap();
        assert_eq!(
            UnivalentMap::from_config(&ident).unwrap().kind_name(),
            "identity"
        );
    }

    #[test]
    fn weierstrass_roots_of_small_polynomials() {
        // (z - 1)(z - 2i)(z + 3) = z^3 + (2 - 2i) z^2 + (-3 - 4i) z + ... compute directly.
        let r1 = c(1.0, 0.0);
        let r2 = c(0.0, 2.0);
        let r3 = c(-3.0, 0.0);
        let c2 = -(r1 + r2 + r3);
        let c1 = r1 * r2 + r1 * r3 + r2 * r3;
        let c0 = -r1 * r2 * r3;
        let mut roots = polynomial_roots(&[c0, c1, c2, C64::new(1.0, 0.0)]);
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let mut want = vec![r1, r2, r3];
        want.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (got, expect) in roots.iter().zip(&want) {
            assert!((got - expect).norm() < 1e-9, "{got} vs {expect}");
        }
    }
}
