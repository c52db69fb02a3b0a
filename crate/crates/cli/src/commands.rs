//! The four workflows. Each writes its files into `RunConfig::output_dir`
//! and returns a short human-readable summary for stdout.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use magnoncat::analysis::{wigner, GridSpec};
use magnoncat::device::{coupling_grp, coupling_j, critical_distance, thermal_occupation, transmon_frequency};
use magnoncat::hilbert::{partial_trace, Dims, Subsystem};
use magnoncat::protocol::run_protocol;
use magnoncat::{CouplingSet, DensityMatrix, Error};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{csv_error, csv_writer, read_state, write_state, write_text, write_wigner_csv, write_wigner_pgm};

pub const COUPLINGS_HEADER: [&str; 8] = [
    "phi_b_over_pi",
    "aJ",
    "J_MHz",
    "J_corrected_MHz",
    "grp_MHz",
    "grp_corrected_MHz",
    "omega_q_GHz",
    "transmon_regime_ok",
];

fn prepare_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Unlike `{}`, keeps NaN and infinities readable by most CSV tools.
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        x.to_string()
    }
}

/// Value, or NaN where the SQUID is degenerate.
fn or_nan(r: magnoncat::Result<f64>) -> CliResult<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::DegenerateSquid(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

pub fn couplings(cfg: &RunConfig) -> CliResult<String> {
    prepare_dir(&cfg.output_dir)?;
    cfg.protocol.device.validate()?;
    let s = &cfg.sweep;
    let grid: Vec<(f64, f64)> = s
        .a_j
        .iter()
        .flat_map(|&a| {
            (0..s.points).map(move |k| {
                let frac = k as f64 / (s.points - 1) as f64;
                (s.phi_b_min_over_pi + frac * (s.phi_b_max_over_pi - s.phi_b_min_over_pi), a)
            })
        })
        .collect();
    let rows: Vec<[String; 8]> = grid
        .par_iter()
        .map(|&(phi, a)| -> CliResult<[String; 8]> {
            let mut p = cfg.protocol.device.clone();
            p.phi_b = phi * std::f64::consts::PI;
            p.a_j = a;
            Ok([
                fmt(phi),
                fmt(a),
                fmt(or_nan(coupling_j(&p, false))?),
                fmt(or_nan(coupling_j(&p, true))?),
                fmt(or_nan(coupling_grp(&p, false))?),
                fmt(or_nan(coupling_grp(&p, true))?),
                fmt(or_nan(transmon_frequency(&p))?),
                p.transmon_regime_ok().to_string(),
            ])
        })
        .collect::<CliResult<_>>()?;

    let path = cfg.output_dir.join("couplings.csv");
    let mut w = csv_writer(&path)?;
    let err = csv_error(&path);
    w.write_record(COUPLINGS_HEADER).map_err(&err)?;
    for row in &rows {
        w.write_record(row).map_err(&err)?;
    }
    w.flush().map_err(CliError::io(&path))?;
    Ok(format!("wrote {} rows to {}\n", rows.len(), path.display()))
}

pub fn protocol(cfg: &RunConfig) -> CliResult<String> {
    prepare_dir(&cfg.output_dir)?;
    let run = run_protocol(&cfg.protocol)?;
    let traj = &run.trajectory;

    let path = cfg.output_dir.join("trajectory.csv");
    let mut w = csv_writer(&path)?;
    let err = csv_error(&path);
    let mut header = vec!["t_us".to_string()];
    header.extend(traj.names.iter().cloned());
    header.push("trunc_flag".into());
    w.write_record(&header).map_err(&err)?;
    for ((t, row), flag) in traj.times.iter().zip(&traj.rows).zip(&traj.truncation) {
        let mut fields = vec![fmt(*t)];
        fields.extend(row.iter().map(|v| fmt(*v)));
        fields.push(u8::from(*flag).to_string());
        w.write_record(&fields).map_err(&err)?;
    }
    w.flush().map_err(CliError::io(&path))?;

    let mut summary = String::new();
    let p = &cfg.protocol;
    let _ = writeln!(summary, "dims = {} x {}", p.dims.qubit, p.dims.magnon);
    let _ = writeln!(summary, "t_final_us = {}", fmt(p.t_final));
    let _ = writeln!(summary, "dt_us = {}", fmt(p.dt));
    let _ = writeln!(summary, "g_tilde_MHz = {}", fmt(run.g_tilde));
    let _ = writeln!(summary, "n_th = {}", fmt(run.n_th));
    let _ = writeln!(summary, "target_beta = {} + {}i", fmt(run.target.beta.re), fmt(run.target.beta.im));
    let _ = writeln!(summary, "target_S = {}", fmt(run.target.beta.norm_sqr()));
    for (k, prob) in run.outcome_probabilities.iter().enumerate() {
        let _ = writeln!(summary, "P({k}) = {}", fmt(*prob));
    }
    for name in ["E_N", "S", "F_even"] {
        if let Some(col) = traj.column(name) {
            let (k, max) = col
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
            let _ = writeln!(summary, "max {name} = {} at t_us = {}", fmt(max), fmt(traj.times[k]));
        }
    }
    let _ = writeln!(summary, "truncation_suspect = {}", traj.any_truncation_suspect());
    for c in &run.conditional {
        let file = format!("conditional_outcome{}.csv", c.outcome);
        match &c.state {
            Some(state) => {
                write_state(&cfg.output_dir.join(&file), state)?;
                let _ = writeln!(summary, "outcome {} -> {file}", c.outcome);
            }
            None => {
                let _ = writeln!(summary, "outcome {} has negligible probability, no file written", c.outcome);
            }
        }
    }
    write_text(&cfg.output_dir.join("summary.txt"), &summary)?;
    Ok(summary)
}

/// Window wide enough for a cat of the state's mean occupation.
pub fn default_half_width(rho: &DensityMatrix) -> f64 {
    let n_mean: f64 = rho.matrix().diag().iter().enumerate().map(|(k, z)| k as f64 * z.re).sum();
    1.5 * ((2.0 * n_mean.max(0.0)).sqrt() + 2.0)
}

pub fn wigner_cmd(cfg: &RunConfig) -> CliResult<String> {
    let state_path: PathBuf =
        cfg.wigner.state.clone().ok_or_else(|| CliError::Config("wigner: no state file given".into()))?;
    let rho = read_state(&state_path)?;
    let rho = match rho.dims() {
        Dims::Single(_) => rho,
        Dims::Composite(_) => partial_trace(&rho, Subsystem::Magnon)?,
    };
    prepare_dir(&cfg.output_dir)?;
    let half = cfg.wigner.half_width.unwrap_or_else(|| default_half_width(&rho));
    let grid = wigner(&rho, &GridSpec::square(half, cfg.wigner.points))?;
    write_wigner_csv(&cfg.output_dir.join("wigner.csv"), &grid)?;
    if cfg.wigner.pgm {
        write_wigner_pgm(&cfg.output_dir.join("wigner.pgm"), &grid)?;
    }
    let (x, y) = grid.argmax();
    let mut out = String::new();
    let _ = writeln!(out, "half_width = {}", fmt(half));
    let _ = writeln!(out, "min W = {}", fmt(grid.min()));
    let _ = writeln!(out, "max W = {} at ({}, {})", fmt(grid.max()), fmt(x), fmt(y));
    let _ = writeln!(out, "sum W dA = {}", fmt(grid.riemann_sum()));
    let _ = writeln!(out, "truncation_suspect = {}", grid.truncation_suspect);
    Ok(out)
}

pub fn design(cfg: &RunConfig) -> CliResult<String> {
    prepare_dir(&cfg.output_dir)?;
    let dev = &cfg.protocol.device;
    dev.validate()?;
    let d = &cfg.design;
    let c = &dev.constants;

    let path = cfg.output_dir.join("critical_distance.csv");
    let mut w = csv_writer(&path)?;
    let err = csv_error(&path);
    w.write_record(["Bc_T", "d_c_m"]).map_err(&err)?;
    for k in 0..d.bc_points {
        let bc = d.bc_min + (d.bc_max - d.bc_min) * k as f64 / (d.bc_points - 1) as f64;
        w.write_record([fmt(bc), fmt(critical_distance(c, bc, d.ms, dev.r_yig, d.d_w))]).map_err(&err)?;
    }
    w.flush().map_err(CliError::io(&path))?;

    let path = cfg.output_dir.join("thermal_occupation.csv");
    let mut w = csv_writer(&path)?;
    let err = csv_error(&path);
    w.write_record(["T_mK", "f_m_GHz", "n_th"]).map_err(&err)?;
    for &t in &d.temperatures_mk {
        w.write_record([fmt(t), fmt(dev.f_m), fmt(thermal_occupation(c, dev.f_m, t * 1e-3))]).map_err(&err)?;
    }
    w.flush().map_err(CliError::io(&path))?;

    let d_c = critical_distance(c, d.bc, d.ms, dev.r_yig, d.d_w);
    let mut r = String::new();
    let _ = writeln!(r, "sphere radius R_yig_m = {}", fmt(dev.r_yig));
    let _ = writeln!(r, "centre-to-loop distance d_m = {}", fmt(dev.d));
    let _ = writeln!(r, "critical distance at Bc_T = {}: d_c_m = {}", fmt(d.bc), fmt(d_c));
    let _ = writeln!(r, "nearest loop distance d_min_m = {}", fmt(dev.d_min()));
    let _ = writeln!(r, "d_min >= d_c: {}", dev.d_min() >= d_c);
    let _ = writeln!(r, "far field (R_squid >= 3 d): {} (R_squid_m = {})", dev.far_field_ok(), fmt(dev.r_squid));
    let _ = writeln!(
        r,
        "transmon regime (E_J S / E_C >= 20): {} (ratio = {})",
        dev.transmon_regime_ok(),
        fmt(dev.regime_ratio())
    );
    match CouplingSet::evaluate(dev, cfg.protocol.phi_ac) {
        Ok(set) => {
            let _ = writeln!(r, "phi_b_over_pi = {}", fmt(dev.phi_b / std::f64::consts::PI));
            let _ = writeln!(r, "omega_q_GHz = {}", fmt(set.omega_q));
            let _ = writeln!(r, "J_MHz = {}", fmt(set.j));
            let _ = writeln!(r, "J_prime_MHz = {}", fmt(set.j_prime));
            let _ = writeln!(r, "grp_MHz = {}", fmt(set.g_rp));
            let _ = writeln!(r, "grp_prime_MHz = {}", fmt(set.g_rp_prime));
            let _ = writeln!(r, "g_tilde_MHz = {}", fmt(set.g_tilde));
            let _ = writeln!(r, "phi_zpf = {}", fmt(set.phi_zpf));
            let _ = writeln!(r, "weak flux: {}", set.weak_flux_ok);
            let _ = writeln!(r, "weak drive: {}", set.weak_drive_ok);
        }
        Err(Error::DegenerateSquid(s)) => {
            let _ = writeln!(r, "operating point is a degenerate SQUID (S = {s:e}); couplings undefined");
        }
        Err(e) => return Err(e.into()),
    }
    write_text(&cfg.output_dir.join("design_report.txt"), &r)?;
    Ok(r)
}
