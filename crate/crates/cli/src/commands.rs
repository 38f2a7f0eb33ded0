//! One function per subcommand. Rates and times are in units of Γ₀ and
//! 1/Γ₀; lengths are written in nanometres.

use std::path::Path;

use bic_entangle::cdos::{cdos, effective_beta, BicKind, BicMode};
use bic_entangle::constants::gamma0;
use bic_entangle::dynamics::{integrate, DickeState, Method, SimulationGrid};
use bic_entangle::entanglement::{
    c_max_analytic, exact_concurrence_symmetric, t_max_analytic, ConcurrenceTrace,
};
use bic_entangle::fitting::{
    fit_cdos, fit_purcell, load_series, purcell_profile, standard_separations, synthetic_cdos,
    synthetic_purcell, FitResult, LengthUnit, SampleSeries,
};
use bic_entangle::greens::{free_space_rates, EmitterConfig, RateSet};
use bic_entangle::lattice::{ed_cosine_coefficients, md_cosine_coefficients, LatticeParams};
use bic_entangle::optimize::golden_max;
use bic_entangle::validity::regime_report;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{dipole, required, section, RunConfig, ScanSection};
use crate::error::CliError;
use crate::output::{Output, Table};

const NM: f64 = 1e-9;

/// Shared state for one invocation.
pub struct Context<'a> {
    pub config: &'a RunConfig,
    /// Directory that relative data paths are resolved against.
    pub base_dir: &'a Path,
    pub seed: u64,
}

fn config_err(path: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {e}"))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Separation grid in metres from `[scan]`, with defaults in nanometres.
fn scan_grid(
    scan: Option<&ScanSection>,
    default_min_nm: f64,
    default_max_nm: f64,
) -> Result<Vec<f64>, CliError> {
    let d_min = scan.and_then(|s| s.d_min_nm).unwrap_or(default_min_nm);
    let d_max = scan.and_then(|s| s.d_max_nm).unwrap_or(default_max_nm);
    let n = scan.and_then(|s| s.n_points).unwrap_or(200);
    if !(d_min > 0.0 && d_max >= d_min && d_max.is_finite()) {
        return Err(CliError::Config(format!(
            "scan: need 0 < d_min_nm <= d_max_nm, got {d_min} and {d_max}"
        )));
    }
    if n == 0 {
        return Err(CliError::Config("scan.n_points must be at least 1".into()));
    }
    Ok(linspace(d_min * NM, d_max * NM, n))
}

// ---------------------------------------------------------------- rates

pub fn rates(ctx: &Context, out: &mut Output) -> Result<(), CliError> {
    let cfg = ctx.config;
    if cfg.rates.is_some() {
        let rs = ingest_rates(cfg)?;
        let [g11, g22, g12, o12] = rs.normalized();
        let mut t = Table::new(&["gamma11", "gamma22", "gamma12", "omega12"]);
        t.push(vec![g11, g22, g12, o12]);
        if rs.cauchy_schwarz_excess() > 0.0 {
            t.note("warning", "|gamma12| exceeds sqrt(gamma11 gamma22)");
        }
        out.table("rates", &t)?;
        return Ok(());
    }
    let e = section(&cfg.emitters, "emitters")?;
    let p = dipole(e.p, e.p_debye, "emitters")?;
    let lambda0 = required(e.lambda0_nm, "emitters.lambda0_nm")? * NM;
    let o = e.orientation.unwrap_or([0.0, 0.0, 1.0]);
    let lambda_nm = lambda0 / NM;
    let grid = scan_grid(cfg.scan.as_ref(), 0.1 * lambda_nm, 5.0 * lambda_nm)?;
    let e1 =
        EmitterConfig::new([0.0; 3], o, p, lambda0).map_err(|err| config_err("emitters", err))?;
    let mut t = Table::new(&["d_nm", "d_over_lambda", "gamma12", "omega12"]);
    for d in grid {
        let e2 = EmitterConfig::new([d, 0.0, 0.0], o, p, lambda0)?;
        let [_, _, g12, o12] = free_space_rates(&e1, &e2)?.normalized();
        t.push(vec![d / NM, d / lambda0, g12, o12]);
    }
    t.note("geometry", "emitters separated along x, common orientation");
    t.note("gamma0_per_s", format!("{:e}", gamma0(p, lambda0)?));
    out.table("rates", &t)?;
    Ok(())
}

/// Normalized rates from `[rates]`, with Γ₀ = 1.
fn ingest_rates(cfg: &RunConfig) -> Result<RateSet, CliError> {
    let r = section(&cfg.rates, "rates")?;
    let g11 = required(r.gamma11, "rates.gamma11")?;
    let g22 = required(r.gamma22, "rates.gamma22")?;
    let g12 = required(r.gamma12, "rates.gamma12")?;
    let o12 = required(r.omega12, "rates.omega12")?;
    RateSet::from_normalized(g11, g22, g12, o12, 1.0).map_err(|e| config_err("rates", e))
}

// ---------------------------------------------------------- lattice-coeffs

pub fn lattice_coeffs(ctx: &Context, out: &mut Output) -> Result<(), CliError> {
    let l = section(&ctx.config.lattice, "lattice")?;
    let kind = required(l.kind, "lattice.kind")?;
    let a = l.a_nm.unwrap_or(400.0) * NM;
    let lambda = required(l.lambda_nm, "lattice.lambda_nm")? * NM;
    let z = required(l.z_nm, "lattice.z_nm")? * NM;
    let mut params = LatticeParams::new(a, lambda, z).map_err(|e| config_err("lattice", e))?;
    if let Some(x0) = l.x0_a {
        params = params.with_x0(x0 * a);
    }
    params = params.with_truncation(
        l.harmonics.unwrap_or(params.harmonics),
        l.sum_terms.unwrap_or(params.sum_terms),
    );
    params.validate().map_err(|e| config_err("lattice", e))?;
    let exp = match kind {
        BicKind::Ed => ed_cosine_coefficients(&params)?,
        BicKind::Md => {
            if l.x0_a.is_none() {
                return Err(CliError::Config("missing field lattice.x0_a".into()));
            }
            md_cosine_coefficients(&params)?
        }
    };
    let mut t = Table::new(&["n", "gamma_raw", "c_n"]);
    for (n, (g, c)) in exp.gamma_raw.iter().zip(&exp.c_n).enumerate() {
        t.push(vec![n as f64, *g, *c]);
    }
    t.note("harmonics", params.harmonics);
    t.note("sum_terms", params.sum_terms);
    t.note(
        "max_rel_change_on_doubling",
        format!("{:e}", exp.max_rel_change),
    );
    out.table("lattice_coeffs", &t)?;
    Ok(())
}

// ------------------------------------------------------------- cdos-model

pub fn cdos_model(ctx: &Context, out: &mut Output) -> Result<(), CliError> {
    let mode = ctx.config.bic_mode()?;
    let a_nm = mode.a / NM;
    let grid = scan_grid(
        ctx.config.scan.as_ref(),
        mode.min_valid_distance() / NM,
        20.0 * a_nm,
    )?;
    let mut t = Table::new(&["d_nm", "d_over_a", "gamma12", "beta_bar"]);
    for d in grid {
        t.push(vec![
            d / NM,
            d / mode.a,
            cdos(d, &mode, mode.purcell),
            effective_beta(d, &mode),
        ]);
    }
    t.note("purcell", mode.purcell);
    t.note("min_valid_d_nm", mode.min_valid_distance() / NM);
    out.table("cdos_model", &t)?;
    Ok(())
}

// --------------------------------------------------------------- simulate

#[derive(Debug, Serialize)]
struct SimulationSummary {
    t_max: f64,
    c_max: f64,
    beta_bar: Option<f64>,
    purcell: Option<f64>,
    t_max_analytic: Option<f64>,
    c_max_analytic: Option<f64>,
    rates: [f64; 4],
    rate_source: &'static str,
}

fn method(cfg: &RunConfig) -> Result<Method, CliError> {
    let s = cfg.simulation.as_ref();
    let name = s.and_then(|s| s.method.as_deref()).unwrap_or("rk45");
    let def = match Method::default() {
        Method::Rk45 { rtol, atol } => (rtol, atol),
        _ => (1e-10, 1e-10),
    };
    match name {
        "closed_form" => Ok(Method::ClosedForm),
        "rk4" => Ok(Method::Rk4),
        "rk45" => Ok(Method::Rk45 {
            rtol: s.and_then(|s| s.rtol).unwrap_or(def.0),
            atol: s.and_then(|s| s.atol).unwrap_or(def.1),
        }),
        other => Err(CliError::Config(format!(
            "simulation.method: unknown method '{other}' (expected closed_form, rk4 or rk45)"
        ))),
    }
}

pub fn simulate(ctx: &Context, out: &mut Output) -> Result<(), CliError> {
    let cfg = ctx.config;
    let (rs, beta_bar, purcell, source) = if cfg.rates.is_some() {
        let rs = ingest_rates(cfg)?;
        let g = rs.mean_decay();
        let bb = (g > 0.0).then(|| rs.gamma12 / g);
        (rs, bb, None, "rates")
    } else {
        let mode = cfg.bic_mode()?;
        let e = section(&cfg.emitters, "emitters")?;
        let d = required(e.d_nm, "emitters.d_nm")? * NM;
        if !mode.in_validity_range(d) {
            log::warn!(
                "d = {} nm is below the model's validity distance {} nm",
                d / NM,
                mode.min_valid_distance() / NM
            );
        }
        let bb = effective_beta(d, &mode);
        let f = mode.purcell;
        let rs = RateSet::from_normalized(f, f, f * bb, 0.0, 1.0)?;
        (rs, Some(bb), Some(f), "mode")
    };
    let sim = cfg.simulation.as_ref();
    let g = rs.mean_decay();
    let t_end = sim
        .and_then(|s| s.t_end)
        .unwrap_or(if g > 0.0 { 10.0 / g } else { 10.0 });
    let n_steps = sim.and_then(|s| s.n_steps).unwrap_or(2000);
    let grid = SimulationGrid::new(t_end, n_steps, method(cfg)?)
        .map_err(|e| config_err("simulation", e))?;
    let traj = integrate(&DickeState::first_excited(), &rs, &grid)?;
    let trace = ConcurrenceTrace::from_trajectory(&traj)?;

    let mut tt = Table::new(&[
        "t",
        "rho_ee",
        "rho_ss",
        "rho_aa",
        "rho_gg",
        "re_rho_as",
        "im_rho_as",
    ]);
    for (t, s) in &traj {
        let mut row = vec![*t];
        row.extend_from_slice(&s.to_array());
        tt.push(row);
    }
    out.table("trajectory", &tt)?;
    let mut ct = Table::new(&["t", "C"]);
    for (t, c) in trace.times.iter().zip(&trace.concurrence) {
        ct.push(vec![*t, *c]);
    }
    out.table("concurrence", &ct)?;

    let analytic = match (beta_bar, purcell.or((g > 0.0).then_some(g))) {
        (Some(b), Some(f)) if b > 0.0 && b < 1.0 => {
            Some((t_max_analytic(b, f, 1.0)?, c_max_analytic(b)?))
        }
        _ => None,
    };
    let summary = SimulationSummary {
        t_max: trace.t_max,
        c_max: trace.c_max,
        beta_bar,
        purcell,
        t_max_analytic: analytic.map(|a| a.0),
        c_max_analytic: analytic.map(|a| a.1),
        rates: rs.normalized(),
        rate_source: source,
    };
    out.json("summary", &summary)?;
    Ok(())
}

// ------------------------------------------------------------------ sweep

struct SweepRow {
    d: f64,
    beta_bar: f64,
    c_max: f64,
    t_max: f64,
    clipped: bool,
    numeric: Option<f64>,
}

fn sweep_point(d: f64, mode: &BicMode, numeric: bool) -> Result<SweepRow, CliError> {
    let bb = effective_beta(d, mode);
    let f = mode.purcell;
    let clipped = bb <= 0.0;
    let (c_max, t_max) = if clipped {
        (0.0, 0.0)
    } else {
        (c_max_analytic(bb)?, t_max_analytic(bb, f, 1.0)?)
    };
    let numeric = if numeric {
        let rs = RateSet::from_normalized(f, f, f * bb, 0.0, 1.0)?;
        let t_hi = if bb.abs() > 0.0 {
            4.0 * t_max_analytic(bb.abs(), f, 1.0)?
        } else {
            1.0 / f
        };
        let (_, c) = golden_max(
            |t| exact_concurrence_symmetric(t, &rs).unwrap_or(f64::NAN),
            0.0,
            t_hi,
            1e-12 * t_hi,
        );
        Some(c)
    } else {
        None
    };
    Ok(SweepRow {
        d,
        beta_bar: bb,
        c_max,
        t_max,
        clipped,
        numeric,
    })
}

pub fn sweep(ctx: &Context, out: &mut Output) -> Result<(), CliError> {
    let mode = ctx.config.bic_mode()?;
    let grid = scan_grid(
        ctx.config.scan.as_ref(),
        mode.min_valid_distance() / NM,
        20.0 * mode.a / NM,
    )?;
    let numeric = ctx
        .config
        .sweep
        .as_ref()
        .and_then(|s| s.numeric)
        .unwrap_or(false);
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&d| sweep_point(d, &mode, numeric))
        .collect::<Result<_, _>>()?;
    let mut cols = vec!["d_nm", "d_over_a", "beta_bar", "c_max", "t_max", "clipped"];
    if numeric {
        cols.push("c_max_numeric");
    }
    let mut t = Table::new(&cols);
    for r in &rows {
        let mut row = vec![
            r.d / NM,
            r.d / mode.a,
            r.beta_bar,
            r.c_max,
            r.t_max,
            if r.clipped { 1.0 } else { 0.0 },
        ];
        row.extend(r.numeric);
        t.push(row);
    }
    t.note(
        "clipped",
        "1 where beta_bar <= 0; c_max and t_max are then reported as 0",
    );
    t.note("purcell", mode.purcell);
    out.table("sweep", &t)?;
    Ok(())
}

// -------------------------------------------------------------------- fit

#[derive(Debug, Serialize)]
struct FitReport<'a> {
    model: &'a str,
    data_source: String,
    n_input: usize,
    fit: FitResult,
}

pub fn fit(ctx: &Context, out: &mut Output) -> Result<(), CliError> {
    let cfg = ctx.config;
    let f = section(&cfg.fit, "fit")?;
    let model = required(f.model.as_deref(), "fit.model")?;
    let unit = match &f.unit {
        Some(u) => LengthUnit::parse(u)
            .ok_or_else(|| CliError::Config(format!("fit.unit: unknown length unit '{u}'")))?,
        None => LengthUnit::Nanometre,
    };
    match model {
        "cdos" => {
            let mode = cfg.bic_mode()?;
            let (data, source) = match (&f.data, &f.synthetic) {
                (Some(p), None) => load(ctx.base_dir, p, unit)?,
                (None, Some(s)) => {
                    let d =
                        standard_separations(&mode, s.n_a.unwrap_or(20.0), s.per_a.unwrap_or(10));
                    let data = synthetic_cdos(&mode, &d, s.noise.unwrap_or(0.0), ctx.seed)?;
                    (data, format!("synthetic (seed {})", ctx.seed))
                }
                _ => {
                    return Err(CliError::Config(
                        "fit: set exactly one of fit.data and [fit.synthetic]".into(),
                    ))
                }
            };
            let res = fit_cdos(&data, &mode, f.d_min_nm.map(|v| v * NM))?;
            let (b, k) = (res.param("beta"), res.param("k_res"));
            let model_y = |x: f64| {
                let m = BicMode {
                    beta: b,
                    k_res: k,
                    ..mode.clone()
                };
                cdos(x, &m, m.purcell)
            };
            write_fit(out, "cdos", source, &data, model_y, res)
        }
        "purcell" => {
            let a = f.a_nm.unwrap_or(400.0) * NM;
            let r = required(f.r_sphere_nm, "fit.r_sphere_nm")? * NM;
            let (data, source) = match (&f.data, &f.synthetic) {
                (Some(p), None) => load(ctx.base_dir, p, unit)?,
                (None, Some(s)) => {
                    let amp = required(s.amplitude, "fit.synthetic.amplitude")?;
                    let decay = required(s.decay, "fit.synthetic.decay")?;
                    let dz = s.dz_nm.unwrap_or(5.0) * NM;
                    let n = s.n_points.unwrap_or(60);
                    let z: Vec<f64> = (1..=n).map(|i| r + i as f64 * dz).collect();
                    let data =
                        synthetic_purcell(amp, decay, a, r, &z, s.noise.unwrap_or(0.0), ctx.seed)?;
                    (data, format!("synthetic (seed {})", ctx.seed))
                }
                _ => {
                    return Err(CliError::Config(
                        "fit: set exactly one of fit.data and [fit.synthetic]".into(),
                    ))
                }
            };
            let res = fit_purcell(&data, a, r)?;
            let (amp, decay) = (res.param("A"), res.param("B"));
            write_fit(
                out,
                "purcell",
                source,
                &data,
                |z| purcell_profile(z, amp, decay, a, r),
                res,
            )
        }
        other => Err(CliError::Config(format!(
            "fit.model: unknown model '{other}' (expected cdos or purcell)"
        ))),
    }
}

fn load(base: &Path, p: &Path, unit: LengthUnit) -> Result<(SampleSeries, String), CliError> {
    let path = base.join(p);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "fit.data: file not found: {}",
            path.display()
        )));
    }
    let data = load_series(&path, None, unit)?;
    Ok((data, p.display().to_string()))
}

fn write_fit(
    out: &mut Output,
    model: &str,
    data_source: String,
    data: &SampleSeries,
    model_y: impl Fn(f64) -> f64,
    fit: FitResult,
) -> Result<(), CliError> {
    let mut t = Table::new(&["x_nm", "y", "y_model"]);
    for (x, y) in data.x.iter().zip(&data.y) {
        t.push(vec![x / NM, *y, model_y(*x)]);
    }
    out.table("fit_data", &t)?;
    let report = FitReport {
        model,
        data_source,
        n_input: data.len(),
        fit,
    };
    out.json("fit", &report)?;
    Ok(())
}

// --------------------------------------------------------------- validity

pub fn validity(ctx: &Context, out: &mut Output) -> Result<(), CliError> {
    let cfg = ctx.config;
    let v = section(&cfg.validity, "validity")?;
    let p = dipole(v.p, v.p_debye, "validity")?;
    let mode = if cfg.mode.is_some() {
        Some(cfg.bic_mode()?)
    } else {
        None
    };
    let pick = |own: Option<f64>, scale: f64, from_mode: Option<f64>, path: &str| {
        own.map(|x| x * scale)
            .or(from_mode)
            .ok_or_else(|| CliError::Config(format!("missing field {path}")))
    };
    let purcell = pick(
        v.purcell,
        1.0,
        mode.as_ref().map(|m| m.purcell),
        "validity.purcell",
    )?;
    let lambda = pick(
        v.lambda_nm,
        NM,
        mode.as_ref().map(|m| m.lambda_bic),
        "validity.lambda_nm",
    )?;
    let fwhm = pick(
        v.fwhm_nm,
        NM,
        mode.as_ref().map(|m| m.fwhm),
        "validity.fwhm_nm",
    )?;
    let report = regime_report(p, purcell, lambda, fwhm).map_err(|e| config_err("validity", e))?;
    out.json("validity", &report)?;
    Ok(())
}
