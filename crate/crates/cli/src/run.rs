//! Command implementations: each turns one validated config into a
//! deterministic JSON payload, a residual table, and CSV tables.
//!
//! Payloads are built only from the configuration and the library results,
//! so identical configs yield byte-identical payloads; timing and version
//! information stay outside, in the report envelope.

use anyhow::{bail, Context, Result};
use quasikit_core::cauchy::{
    grunsky_via_jump, jump_decompose, two_sided_agreement, verify_wirtinger_identities, QuadSpec,
};
use quasikit_core::extrap::Schedule;
use quasikit_core::faber::{
    classify, energy_identity_check, faber_coefficients, grunsky_matrix, grunsky_norm,
    side2_energy, FaberTable, Verdict,
};
use quasikit_core::fft;
use quasikit_core::maps::UnivalentMap;
use quasikit_core::series::{douglas_energy, FourierBoundaryData, LaurentSeries};
use quasikit_core::transmit::{compose_boundary, energy_ratio_norm, transmit, CircleHomeo};
use quasikit_core::C64;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::report::{ResidualRow, Table};

/// The eight experiment commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Faber,
    Grunsky,
    Classify,
    Jump,
    Approx,
    Transmit,
    Verify,
    Energy,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Faber => "faber",
            CommandKind::Grunsky => "grunsky",
            CommandKind::Classify => "classify",
            CommandKind::Jump => "jump",
            CommandKind::Approx => "approx",
            CommandKind::Transmit => "transmit",
            CommandKind::Verify => "verify",
            CommandKind::Energy => "energy",
        }
    }

    /// Process exit code when this command's residual table has failures,
    /// so scripts can tell which suite failed without parsing output.
    pub fn failure_exit_code(self) -> u8 {
        match self {
            CommandKind::Faber => 10,
            CommandKind::Grunsky => 11,
            CommandKind::Classify => 12,
            CommandKind::Jump => 13,
            CommandKind::Approx => 14,
            CommandKind::Transmit => 15,
            CommandKind::Verify => 16,
            CommandKind::Energy => 17,
        }
    }
}

/// Everything a command produces besides the report envelope.
pub struct RunOutput {
    pub payload: Value,
    pub residuals: Vec<ResidualRow>,
    pub tables: Vec<Table>,
}

pub fn run(kind: CommandKind, cfg: &ExperimentConfig) -> Result<RunOutput> {
    let map = UnivalentMap::from_config(&cfg.map).context("invalid map configuration")?;
    match kind {
        CommandKind::Faber => run_faber(cfg, &map),
        CommandKind::Grunsky => run_grunsky(cfg, &map),
        CommandKind::Classify => run_classify(cfg, &map),
        CommandKind::Jump => run_jump(cfg, &map),
        CommandKind::Approx => run_approx(cfg, &map),
        CommandKind::Transmit => run_transmit(cfg, &map),
        CommandKind::Verify => run_verify(cfg, &map),
        CommandKind::Energy => run_energy(cfg, &map),
    }
}

fn cjson(z: C64) -> Value {
    json!([z.re, z.im])
}

fn fexp(x: f64) -> String {
    format!("{x:e}")
}

fn rnd(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    ((*state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

/// Boundary data from `params.data` (`[[k, re, im], ...]`), or a seeded
/// pseudo-random trigonometric polynomial controlled by `params.seed`,
/// `params.degree`, and `params.amplitude`.
fn boundary_data(cfg: &ExperimentConfig, default_degree: usize) -> Result<FourierBoundaryData> {
    if let Some(list) = cfg.param_coeff_list("data")? {
        let band = list.iter().map(|p| p.0.unsigned_abs()).max().unwrap() as usize;
        if band > 512 {
            bail!("params.data reaches frequency {band}; at most 512 is supported");
        }
        let mut d = FourierBoundaryData::zero(band.max(1));
        for &(k, c) in &list {
            d.set_coeff(k, d.coeff(k) + c);
        }
        Ok(d)
    } else {
        let mut state = cfg.param_u64("seed", 7)?;
        let degree = cfg.param_usize("degree", default_degree)?;
        if degree == 0 || degree > 512 {
            bail!("params.degree must lie in 1..=512 (got {degree})");
        }
        let amp = cfg.param_f64("amplitude", 0.5)?;
        let mut d = FourierBoundaryData::zero(degree);
        for k in -(degree as i64)..=degree as i64 {
            d.set_coeff(k, C64::new(rnd(&mut state), rnd(&mut state)) * amp);
        }
        Ok(d)
    }
}

fn laurent_from_pairs(pairs: &[(i64, C64)]) -> LaurentSeries {
    let n_min = pairs.iter().map(|p| p.0).min().unwrap();
    let n_max = pairs.iter().map(|p| p.0).max().unwrap();
    let mut coeffs = vec![C64::new(0.0, 0.0); (n_max - n_min + 1) as usize];
    for &(k, c) in pairs {
        coeffs[(k - n_min) as usize] += c;
    }
    LaurentSeries::new(n_min, coeffs)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Quasicircle => "quasicircle",
        Verdict::Indeterminate => "indeterminate",
        Verdict::NotQuasicircle => "not_quasicircle",
    }
}

/// A chart radius safely across the curve: three quarters of the way to
/// the continuation limit, capped like the level-curve schedules.
fn far_radius(map: &UnivalentMap) -> f64 {
    1.0 + 0.75 * (map.max_chart_radius().min(1.35) - 1.0)
}

fn run_faber(cfg: &ExperimentConfig, map: &UnivalentMap) -> Result<RunOutput> {
    let table = FaberTable::build(map, cfg.n)?;
    let gr = grunsky_matrix(map, cfg.n)?;

    let frame = &table.frame;
    let polys: Vec<Value> = (1..=cfg.n)
        .map(|n| Value::Array(table.polynomial(n).iter().map(|&c| cjson(c)).collect()))
        .collect();
    let payload = json!({
        "order": cfg.n,
        "frame": {
            "center": frame.center.map(cjson).unwrap_or(Value::Null),
            "kappa": cjson(frame.kappa),
            "coeffs": frame.coeffs.iter().map(|&c| cjson(c)).collect::<Vec<_>>(),
        },
        "polynomials": polys,
    });

    let residuals = vec![
        ResidualRow::new(
            "frame_conversion",
            frame.conversion_residual,
            cfg.tol("frame_conversion", 1e-9),
        ),
        ResidualRow::new(
            "grunsky_symmetry",
            gr.symmetry_residual,
            cfg.tol("symmetry", 1e-9),
        ),
        ResidualRow::new(
            "radius_agreement",
            gr.radius_agreement,
            cfg.tol("radius_agreement", 1e-7),
        ),
    ];

    let mut t = Table::new("faber_polynomials", &["n", "k", "re", "im"]);
    for n in 1..=cfg.n {
        for (k, c) in table.polynomial(n).iter().enumerate() {
            t.push(vec![n.to_string(), k.to_string(), fexp(c.re), fexp(c.im)]);
        }
    }
    Ok(RunOutput {
        payload,
        residuals,
        tables: vec![t],
    })
}

fn run_grunsky(cfg: &ExperimentConfig, map: &UnivalentMap) -> Result<RunOutput> {
    let (norm, gr) = grunsky_norm(map, cfg.n)?;
    let matrix: Vec<Value> = (0..gr.n)
        .map(|j| Value::Array((0..gr.n).map(|k| cjson(gr.b[(j, k)])).collect()))
        .collect();
    let payload = json!({
        "order": cfg.n,
        "norm": norm,
        "symmetry_residual": gr.symmetry_residual,
        "radius_agreement": gr.radius_agreement,
        "normalization_residual": gr.normalization_residual,
        "matrix": matrix,
    });
    let residuals = vec![
        ResidualRow::new(
            "grunsky_symmetry",
            gr.symmetry_residual,
            cfg.tol("symmetry", 1e-9),
        ),
        ResidualRow::new(
            "radius_agreement",
            gr.radius_agreement,
            cfg.tol("radius_agreement", 1e-7),
        ),
        ResidualRow::new(
            "frame_normalization",
            gr.normalization_residual,
            cfg.tol("normalization", 1e-9),
        ),
    ];
    let mut t = Table::new("grunsky_matrix", &["row", "col", "re", "im"]);
    for j in 0..gr.n {
        for k in 0..gr.n {
            let c = gr.b[(j, k)];
            t.push(vec![
                (j + 1).to_string(),
                (k + 1).to_string(),
                fexp(c.re),
                fexp(c.im),
            ]);
        }
    }
    Ok(RunOutput {
        payload,
        residuals,
        tables: vec![t],
    })
}

fn run_classify(cfg: &ExperimentConfig, map: &UnivalentMap) -> Result<RunOutput> {
    let delta = cfg.param_f64("delta", 0.02)?;
    if !(delta > 0.0 && delta < 1.0) {
        bail!("params.delta must lie in (0, 1) (got {delta})");
    }
    let c = classify(map, cfg.n, delta)?;
    let gr = grunsky_matrix(map, cfg.n)?;
    let payload = json!({
        "order": c.n,
        "delta": c.delta,
        "norm_full": c.norm_full,
        "norm_half": c.norm_half,
        "verdict": verdict_name(c.verdict),
    });
    let residuals = vec![
        ResidualRow::new(
            "grunsky_symmetry",
            gr.symmetry_residual,
            cfg.tol("symmetry", 1e-9),
        ),
        ResidualRow::new(
            "radius_agreement",
            gr.radius_agreement,
            cfg.tol("radius_agreement", 1e-7),
        ),
    ];
    Ok(RunOutput {
        payload,
        residuals,
        tables: Vec::new(),
    })
}

fn run_jump(cfg: &ExperimentConfig, map: &UnivalentMap) -> Result<RunOutput> {
    let data = boundary_data(cfg, 8)?;
    let band = cfg.param_usize("band", (2 * data.order()).clamp(1, 64))?;
    let q = cfg.param_complex_opt("anchor")?;
    let parts = jump_decompose(map, &data, q, band)?;

    let collar = &parts.h2_collar;
    let payload = json!({
        "band": band,
        "data_order": data.order(),
        "taylor": parts.h1.iter().map(|&c| cjson(c)).collect::<Vec<_>>(),
        "faber": parts.h2_faber.iter().map(|&c| cjson(c)).collect::<Vec<_>>(),
        "collar": {
            "n_min": collar.n_min(),
            "coeffs": collar.coeffs().iter().map(|&c| cjson(c)).collect::<Vec<_>>(),
        },
        "residual": parts.residual,
    });
    let residuals = vec![ResidualRow::new(
        "reconstruction_sup",
        parts.residual,
        cfg.tol("residual", 1e-6),
    )];

    let mut taylor = Table::new("jump_taylor", &["k", "re", "im"]);
    for (k, c) in parts.h1.iter().enumerate() {
        taylor.push(vec![k.to_string(), fexp(c.re), fexp(c.im)]);
    }
    let mut faber = Table::new("jump_faber", &["n", "re", "im"]);
    for (i, c) in parts.h2_faber.iter().enumerate() {
        faber.push(vec![(i + 1).to_string(), fexp(c.re), fexp(c.im)]);
    }
    let mut coll = Table::new("jump_collar", &["k", "re", "im"]);
    for (i, c) in collar.coeffs().iter().enumerate() {
        coll.push(vec![
            (collar.n_min() + i as i64).to_string(),
            fexp(c.re),
            fexp(c.im),
        ]);
    }
    Ok(RunOutput {
        payload,
        residuals,
        tables: vec![taylor, faber, coll],
    })
}

fn run_approx(cfg: &ExperimentConfig, map: &UnivalentMap) -> Result<RunOutput> {
    let pole = cfg.param_complex("pole", C64::new(0.3, 0.0))?;
    if !(pole.norm() < 1.0) {
        bail!("params.pole must lie strictly inside the unit disk");
    }
    let r1 = cfg.param_f64("r1", 0.55)?;
    let r2 = cfg.param_f64("r2", 0.75)?;
    for r in [r1, r2] {
        if !(pole.norm() < r && r < 1.0) {
            bail!(
                "extraction radii must separate the pole parameter from the curve \
                 (need {:.3} < r < 1, got {r})",
                pole.norm()
            );
        }
    }
    let a = map.chart(pole)?;
    let h = |w: C64| 1.0 / (w - a);
    let coeffs = faber_coefficients(map, h, cfg.n, r1, r2)?;
    let table = FaberTable::build(map, cfg.n)?;

    let step = cfg.param_usize("order_step", 4)?;
    if step == 0 || step > cfg.n {
        bail!("params.order_step must lie in 1..=n (got {step})");
    }
    let orders: Vec<usize> = (step..=cfg.n).step_by(step).collect();
    let er = cfg.param_f64("energy_radius", 0.95)?;
    if !(pole.norm() < er && er < 1.0) {
        bail!("params.energy_radius must lie between the pole parameter and 1");
    }
    let band = cfg.param_usize("energy_band", 32)?;
    let mut tails = Vec::with_capacity(orders.len());
    for &ord in &orders {
        let partial = &coeffs[..ord];
        let e = side2_energy(map, |w| h(w) - table.apply_sum(partial, w), er, band)?;
        tails.push(e);
    }

    // Least-squares decay fit on the coefficient magnitudes; the fitted
    // ratio should match the modulus of the pole parameter.
    let kmax = cfg.n.min(20);
    let floor = 1e-13 * coeffs[0].norm();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in 1..=kmax {
        let mag = coeffs[k - 1].norm();
        if mag > floor {
            xs.push(k as f64);
            ys.push(mag.ln());
        }
    }
    let ratio = if xs.len() < 2 {
        f64::NAN
    } else {
        let m = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        ((m * sxy - sx * sy) / (m * sxx - sx * sx)).exp()
    };

    let mut worst_tail_ratio = 0.0f64;
    for w in tails.windows(2) {
        if w[0] <= 0.0 || w[1] <= 0.0 {
            worst_tail_ratio = f64::INFINITY;
            break;
        }
        worst_tail_ratio = worst_tail_ratio.max(w[1] / w[0]);
    }

    let payload = json!({
        "pole_parameter": cjson(pole),
        "pole_location": cjson(a),
        "coefficients": coeffs.iter().map(|&c| cjson(c)).collect::<Vec<_>>(),
        "orders": orders,
        "tail_energies": tails,
        "decay_ratio": ratio,
    });
    let residuals = vec![
        ResidualRow::new(
            "decay_ratio_error",
            (ratio - pole.norm()).abs(),
            cfg.tol("decay_ratio", 0.03),
        ),
        ResidualRow::new(
            "tail_contraction",
            worst_tail_ratio,
            cfg.tol("tail_ratio", 0.99),
        ),
    ];

    let mut tc = Table::new("approx_coefficients", &["n", "re", "im"]);
    for (i, c) in coeffs.iter().enumerate() {
        tc.push(vec![(i + 1).to_string(), fexp(c.re), fexp(c.im)]);
    }
    let mut te = Table::new("approx_errors", &["order", "tail_energy"]);
    for (&ord, &e) in orders.iter().zip(&tails) {
        te.push(vec![ord.to_string(), fexp(e)]);
    }
    Ok(RunOutput {
        payload,
        residuals,
        tables: vec![tc, te],
    })
}

fn run_transmit(cfg: &ExperimentConfig, map: &UnivalentMap) -> Result<RunOutput> {
    let pairs = cfg
        .param_coeff_list("data")?
        .unwrap_or_else(|| vec![(-1, C64::new(1.0, 0.0))]);
    let series = laurent_from_pairs(&pairs);
    let band = cfg.param_usize("band", cfg.n)?;
    let degree = cfg.schedule.degree.unwrap_or(cfg.n);
    let sched = Schedule::degree_matched_side2(degree, cfg.schedule.grid, map.max_chart_radius())?;
    let tr = transmit(map, &|u, _w| series.eval(u), &sched, band)?;

    let order = tr.trace.order() as i64;
    let trace: Vec<Value> = (-order..=order).map(|k| cjson(tr.trace.coeff(k))).collect();
    let payload = json!({
        "band": band,
        "trace_min_frequency": -order,
        "trace": trace,
        "energy": tr.energy,
        "spillover": tr.spillover,
        "max_correction": tr.max_correction,
    });
    let residuals = vec![
        ResidualRow::new(
            "extrapolation_correction",
            tr.max_correction,
            cfg.tol("correction", 1e-6),
        ),
        ResidualRow::new("band_spillover", tr.spillover, cfg.tol("spillover", 1e-9)),
    ];
    let mut t = Table::new("transmit_trace", &["k", "re", "im"]);
    for k in -order..=order {
        let c = tr.trace.coeff(k);
        t.push(vec![k.to_string(), fexp(c.re), fexp(c.im)]);
    }
    Ok(RunOutput {
        payload,
        residuals,
        tables: vec![t],
    })
}

fn run_verify(cfg: &ExperimentConfig, map: &UnivalentMap) -> Result<RunOutput> {
    let n = cfg.n;
    let quad = QuadSpec {
        nr: cfg.quadrature.nr,
        ntheta: cfg.quadrature.ntheta,
    };
    let mut rows = Vec::new();

    let (norm, gr) = grunsky_norm(map, n)?;
    rows.push(ResidualRow::new(
        "grunsky_symmetry",
        gr.symmetry_residual,
        cfg.tol("symmetry", 1e-9),
    ));
    rows.push(ResidualRow::new(
        "radius_agreement",
        gr.radius_agreement,
        cfg.tol("radius_agreement", 1e-7),
    ));
    rows.push(ResidualRow::new(
        "frame_normalization",
        gr.normalization_residual,
        cfg.tol("normalization", 1e-9),
    ));

    // Energy identity on seeded data of unit coefficient energy.
    let table = FaberTable::build(map, n)?;
    let deg = n.min(10);
    let mut state = cfg.param_u64("seed", 11)?;
    let mut h: Vec<C64> = (0..deg)
        .map(|_| C64::new(rnd(&mut state), rnd(&mut state)))
        .collect();
    let input: f64 = h
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1) as f64 * c.norm_sqr())
        .sum();
    let scale = input.sqrt().recip();
    for c in &mut h {
        *c *= scale;
    }
    let id = energy_identity_check(map, &table, &gr, &h)?;
    rows.push(ResidualRow::new(
        "energy_identity",
        (id.analytic - id.coefficient).abs(),
        cfg.tol("energy_identity", 1e-6),
    ));

    // The remaining identities need the chart to continue across the curve.
    let far = map.max_chart_radius() > 1.04;
    if far {
        let r_out = far_radius(map);

        let nj = n.min(6).max(2);
        let q = map.chart(C64::from_polar(r_out, 0.4))?;
        let b0 = grunsky_via_jump(map, nj, None)?;
        let b1 = grunsky_via_jump(map, nj, Some(q))?;
        let mut dev = 0.0f64;
        for j in 0..nj {
            for k in 0..nj {
                dev = dev.max((b0[(j, k)] - gr.b[(j, k)]).norm());
                dev = dev.max((b1[(j, k)] - gr.b[(j, k)]).norm());
            }
        }
        rows.push(ResidualRow::new(
            "anchor_independence",
            dev,
            cfg.tol("anchor_independence", 1e-8),
        ));

        let mut jstate = cfg.param_u64("seed", 11)?.wrapping_add(17);
        let mut data = FourierBoundaryData::zero(8);
        for k in -8i64..=8 {
            data.set_coeff(k, C64::new(rnd(&mut jstate), rnd(&mut jstate)) * 0.4);
        }
        let parts = jump_decompose(map, &data, None, 16)?;
        rows.push(ResidualRow::new(
            "jump_reconstruction",
            parts.residual,
            cfg.tol("jump_residual", 1e-6),
        ));

        let side1 = [C64::from_polar(0.45, 0.3), C64::from_polar(0.45, 2.4)];
        let side2 = [C64::from_polar(r_out, 1.1), C64::from_polar(r_out, 4.0)];
        let rep = verify_wirtinger_identities(map, 2, &side1, &side2, 1e-4, quad)?;
        rows.push(ResidualRow::new(
            "wirtinger_identities",
            rep.max_residual(),
            cfg.tol("wirtinger", 1e-5),
        ));

        let pts = [
            C64::from_polar(r_out, 0.7),
            C64::from_polar(r_out, 2.1),
            C64::from_polar(r_out, 3.9),
        ];
        let gap = two_sided_agreement(map, 3, &pts)?;
        rows.push(ResidualRow::new(
            "two_sided_limits",
            gap,
            cfg.tol("two_sided", 1e-5),
        ));
    }

    let values: serde_json::Map<String, Value> = rows
        .iter()
        .map(|r| (r.name.clone(), json!(r.value)))
        .collect();
    let payload = json!({
        "order": n,
        "grunsky_norm": norm,
        "far_side_checks": far,
        "checks": values,
    });
    Ok(RunOutput {
        payload,
        residuals: rows,
        tables: Vec::new(),
    })
}

fn run_energy(cfg: &ExperimentConfig, _map: &UnivalentMap) -> Result<RunOutput> {
    let data = boundary_data(cfg, 6)?;
    let m = cfg.param_usize("m", 512)?;
    let coeff = data.h_half_energy();
    let douglas = douglas_energy(&data, m)?;
    let rel = (douglas - coeff).abs() / coeff.max(1e-300);

    let mut residuals = vec![ResidualRow::new(
        "douglas_vs_coefficient",
        rel,
        cfg.tol("energy_match", 1e-9),
    )];
    let mut payload = json!({
        "data_order": data.order(),
        "coefficient_energy": coeff,
        "douglas_energy": douglas,
        "quadrature_m": m,
    });

    // Optional composition with the boundary homeomorphism
    // `theta + amplitude * sin(theta)`.
    if cfg.params.contains_key("homeo_amplitude") {
        let amp = cfg.param_f64("homeo_amplitude", 0.0)?;
        if !(amp.abs() < 1.0) {
            bail!("params.homeo_amplitude must have magnitude below 1");
        }
        let grid = cfg.param_usize("homeo_grid", 1024)?;
        let phi = CircleHomeo::from_function(|t| t + amp * t.sin(), grid)?;
        let out_band = cfg.param_usize("composed_band", (4 * data.order()).max(16))?;
        let compose_grid = cfg.param_usize("compose_grid", cfg.schedule.grid.max(4 * out_band))?;
        let (composed, spill) = compose_boundary(&data, &phi, compose_grid, out_band)?;
        let cd = douglas_energy(&composed, m.max(2 * out_band + 1))?;
        let crel = (cd - composed.h_half_energy()).abs() / composed.h_half_energy().max(1e-300);
        residuals.push(ResidualRow::new(
            "composed_energy_match",
            crel,
            cfg.tol("energy_match", 1e-9),
        ));
        residuals.push(ResidualRow::new(
            "composition_spillover",
            spill / coeff.max(1e-300),
            cfg.tol("spillover_fraction", 0.1),
        ));

        let ratio_order = cfg.param_usize("ratio_order", 8)?;
        let ratio_grid = fft::next_pow2(4 * ratio_order.max(1)).max(64);
        let chat = energy_ratio_norm(&phi, ratio_order, ratio_grid)?;
        payload["composition"] = json!({
            "amplitude": amp,
            "grid": grid,
            "composed_band": out_band,
            "composed_coefficient_energy": composed.h_half_energy(),
            "composed_douglas_energy": cd,
            "spillover": spill,
            "energy_ratio_norm": chat,
            "ratio_order": ratio_order,
        });
    }

    let mut t = Table::new("energy_data", &["k", "re", "im"]);
    let ord = data.order() as i64;
    for k in -ord..=ord {
        let c = data.coeff(k);
        t.push(vec![k.to_string(), fexp(c.re), fexp(c.im)]);
    }
    Ok(RunOutput {
        payload,
        residuals,
        tables: vec![t],
    })
}
