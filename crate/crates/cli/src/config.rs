//! Flat `key = value` configuration.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored.
//! Later assignments win, and `--set key=value` flags are applied after the
//! file. The recognised keys are listed in [`KEYS`].

use std::path::{Path, PathBuf};

use magnoncat::dynamics::Dephasing;
use magnoncat::hilbert::SpaceDims;
use magnoncat::protocol::{Outcome, ProtocolConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// 3 x 140 levels, 3 us.
    Paper,
    /// 3 x 60 levels, 1.2 us.
    Ci,
}

/// Flux-bias sweep for `couplings`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub phi_b_min_over_pi: f64,
    pub phi_b_max_over_pi: f64,
    pub points: usize,
    pub a_j: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerConfig {
    pub state: Option<PathBuf>,
    /// Defaults to a window sized from the state's mean occupation.
    pub half_width: Option<f64>,
    pub points: usize,
    pub pgm: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignConfig {
    /// A/m
    pub ms: f64,
    /// Wire thickness, m.
    pub d_w: f64,
    /// Critical-field table range, T.
    pub bc_min: f64,
    pub bc_max: f64,
    pub bc_points: usize,
    /// Critical field of the intended wire material, T.
    pub bc: f64,
    pub temperatures_mk: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub output_dir: PathBuf,
    /// Holds the device parameters too.
    pub protocol: ProtocolConfig<f64>,
    pub sweep: SweepConfig,
    pub wigner: WignerConfig,
    pub design: DesignConfig,
}

/// Every accepted key with its unit and meaning.
pub const KEYS: &[(&str, &str)] = &[
    ("device.EJ_max_GHz", "maximum Josephson energy E_J^max/h"),
    ("device.EC_GHz", "charging energy E_C/h"),
    ("device.aJ", "SQUID junction asymmetry, 0..1"),
    ("device.phi_b_over_pi", "static flux bias Phi_b/Phi_0"),
    ("device.cap_asym", "junction capacitance asymmetry C_delta/C_sigma"),
    ("device.R_yig_m", "YIG sphere radius"),
    ("device.d_m", "sphere centre to loop edge distance"),
    ("device.R_squid_m", "SQUID loop radius (far-field diagnostic only)"),
    ("device.N_spins", "number of spins in the sphere"),
    ("device.Ix", "stray-field geometry factor I_x"),
    ("device.Iy", "stray-field geometry factor I_y"),
    ("device.Iz", "stray-field geometry factor I_z"),
    ("device.f_m_GHz", "Kittel mode frequency"),
    ("device.alpha_G", "Gilbert damping"),
    ("device.B_ani_T", "anisotropy field"),
    ("protocol.phi_ac_over_pi", "ac flux amplitude / pi"),
    ("protocol.delta_MHz", "magnon detuning from the drive"),
    ("protocol.g_tilde_MHz", "override the modulated coupling"),
    ("protocol.t_final_us", "evolution time"),
    ("protocol.dt_us", "RK4 step"),
    ("protocol.record_every", "steps between trajectory rows"),
    ("protocol.dim_qubit", "transmon levels"),
    ("protocol.dim_magnon", "magnon Fock levels"),
    ("protocol.T_K", "temperature"),
    ("protocol.T1_us", "transmon relaxation time, inf disables"),
    ("protocol.T2_us", "transmon dephasing time, inf disables"),
    ("protocol.dephasing", "literal | pure"),
    ("protocol.outcome", "both | 0 | 1"),
    ("protocol.magnon_drive", "include the constant magnon drive, true | false"),
    ("protocol.dissipationless", "true switches off all noise and sets T = 0"),
    ("couplings.phi_b_min_over_pi", "sweep start"),
    ("couplings.phi_b_max_over_pi", "sweep end"),
    ("couplings.phi_b_points", "sweep points"),
    ("couplings.aJ_list", "comma-separated asymmetries"),
    ("wigner.state", "state file to analyse"),
    ("wigner.half_width", "grid half width in alpha units"),
    ("wigner.points", "points per grid axis"),
    ("wigner.pgm", "also write a PGM image, true | false"),
    ("design.Ms_A_per_m", "YIG saturation magnetisation"),
    ("design.d_w_m", "superconducting wire thickness"),
    ("design.Bc_T", "critical field of the wire"),
    ("design.Bc_min_T", "critical-distance table start"),
    ("design.Bc_max_T", "critical-distance table end"),
    ("design.Bc_points", "critical-distance table rows"),
    ("design.T_mK_list", "comma-separated temperatures for the occupation table"),
];

/// Splits a config file into `(key, value, line)` triples.
pub fn parse_key_values(text: &str) -> CliResult<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", k + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", k + 1)));
        }
        out.push((key.to_string(), value.to_string(), k + 1));
    }
    Ok(out)
}

fn number(key: &str, value: &str) -> CliResult<f64> {
    value.parse::<f64>().map_err(|_| CliError::Config(format!("{key}: `{value}` is not a number")))
}

fn count(key: &str, value: &str) -> CliResult<usize> {
    value.parse::<usize>().map_err(|_| CliError::Config(format!("{key}: `{value}` is not a non-negative integer")))
}

fn flag(key: &str, value: &str) -> CliResult<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: `{value}` is not true/false"))),
    }
}

fn list(key: &str, value: &str) -> CliResult<Vec<f64>> {
    value.split(',').map(|v| number(key, v.trim())).collect()
}

impl RunConfig {
    pub fn from_preset(preset: Preset) -> Self {
        let protocol = match preset {
            Preset::Paper => ProtocolConfig::paper(),
            Preset::Ci => ProtocolConfig::ci(),
        };
        Self {
            preset,
            output_dir: PathBuf::from("."),
            protocol,
            sweep: SweepConfig { phi_b_min_over_pi: 0.0, phi_b_max_over_pi: 1.0, points: 101, a_j: vec![0.0, 0.01, 0.3, 0.6] },
            wigner: WignerConfig { state: None, half_width: None, points: 201, pgm: false },
            design: DesignConfig {
                ms: 2.0e5,
                d_w: 100e-9,
                bc_min: 0.01,
                bc_max: 1.0,
                bc_points: 41,
                bc: 0.12,
                temperatures_mk: vec![5.0, 10.0, 15.0, 20.0, 30.0, 50.0, 100.0],
            },
        }
    }

    /// Preset, then the file, then `key=value` overrides.
    pub fn load(preset: Preset, file: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let mut cfg = Self::from_preset(preset);
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            for (key, value, line) in parse_key_values(&text)? {
                cfg.set(&key, &value).map_err(|e| match e {
                    CliError::Config(msg) => CliError::Config(format!("{}:{line}: {msg}", path.display())),
                    other => other,
                })?;
            }
        }
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set `{item}`: expected key=value")))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let p = &mut self.protocol;
        let dev = &mut p.device;
        let pi = std::f64::consts::PI;
        match key {
            "device.EJ_max_GHz" => dev.ej_max = number(key, value)?,
            "device.EC_GHz" => dev.ec = number(key, value)?,
            "device.aJ" => dev.a_j = number(key, value)?,
            "device.phi_b_over_pi" => dev.phi_b = number(key, value)? * pi,
            "device.cap_asym" => dev.cap_asym = number(key, value)?,
            "device.R_yig_m" => dev.r_yig = number(key, value)?,
            "device.d_m" => dev.d = number(key, value)?,
            "device.R_squid_m" => dev.r_squid = number(key, value)?,
            "device.N_spins" => dev.n_spins = number(key, value)?,
            "device.Ix" => dev.geometry.ix = number(key, value)?,
            "device.Iy" => dev.geometry.iy = number(key, value)?,
            "device.Iz" => dev.geometry.iz = number(key, value)?,
            "device.f_m_GHz" => dev.f_m = number(key, value)?,
            "device.alpha_G" => dev.alpha_g = number(key, value)?,
            "device.B_ani_T" => dev.b_ani = number(key, value)?,
            "protocol.phi_ac_over_pi" => p.phi_ac = number(key, value)? * pi,
            "protocol.delta_MHz" => p.delta = number(key, value)?,
            "protocol.g_tilde_MHz" => p.g_tilde_override = Some(number(key, value)?),
            "protocol.t_final_us" => p.t_final = number(key, value)?,
            "protocol.dt_us" => p.dt = number(key, value)?,
            "protocol.record_every" => p.record_every = count(key, value)?,
            "protocol.dim_qubit" => p.dims.qubit = count(key, value)?,
            "protocol.dim_magnon" => p.dims.magnon = count(key, value)?,
            "protocol.T_K" => p.temperature = number(key, value)?,
            "protocol.T1_us" => p.t1 = number(key, value)?,
            "protocol.T2_us" => p.t2 = number(key, value)?,
            "protocol.dephasing" => {
                p.dephasing = match value {
                    "literal" => Dephasing::Literal,
                    "pure" => Dephasing::PureFromT2,
                    _ => return Err(CliError::Config(format!("{key}: expected literal or pure"))),
                }
            }
            "protocol.outcome" => {
                p.outcome = match value {
                    "both" => Outcome::Both,
                    "0" => Outcome::Project0,
                    "1" => Outcome::Project1,
                    _ => return Err(CliError::Config(format!("{key}: expected both, 0 or 1"))),
                }
            }
            "protocol.magnon_drive" => p.magnon_drive = flag(key, value)?,
            "protocol.dissipationless" => {
                if flag(key, value)? {
                    *p = p.clone().dissipationless();
                }
            }
            "couplings.phi_b_min_over_pi" => self.sweep.phi_b_min_over_pi = number(key, value)?,
            "couplings.phi_b_max_over_pi" => self.sweep.phi_b_max_over_pi = number(key, value)?,
            "couplings.phi_b_points" => self.sweep.points = count(key, value)?,
            "couplings.aJ_list" => self.sweep.a_j = list(key, value)?,
            "wigner.state" => self.wigner.state = Some(PathBuf::from(value)),
            "wigner.half_width" => self.wigner.half_width = Some(number(key, value)?),
            "wigner.points" => self.wigner.points = count(key, value)?,
            "wigner.pgm" => self.wigner.pgm = flag(key, value)?,
            "design.Ms_A_per_m" => self.design.ms = number(key, value)?,
            "design.d_w_m" => self.design.d_w = number(key, value)?,
            "design.Bc_T" => self.design.bc = number(key, value)?,
            "design.Bc_min_T" => self.design.bc_min = number(key, value)?,
            "design.Bc_max_T" => self.design.bc_max = number(key, value)?,
            "design.Bc_points" => self.design.bc_points = count(key, value)?,
            "design.T_mK_list" => self.design.temperatures_mk = list(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        self.protocol.validate()?;
        SpaceDims::new(self.protocol.dims.qubit, self.protocol.dims.magnon)?;
        let s = &self.sweep;
        if s.points < 2 || s.a_j.is_empty() || !(s.phi_b_min_over_pi < s.phi_b_max_over_pi) {
            return Err(CliError::Config("couplings: need >= 2 points, an increasing range and at least one aJ".into()));
        }
        if s.a_j.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(CliError::Config("couplings.aJ_list: values must lie in [0, 1]".into()));
        }
        if self.wigner.points < 2 || self.wigner.half_width.is_some_and(|h| !(h > 0.0)) {
            return Err(CliError::Config("wigner: need >= 2 points and a positive half width".into()));
        }
        let d = &self.design;
        let positive = [d.ms, d.d_w, d.bc, d.bc_min, d.bc_max].iter().all(|v| *v > 0.0 && v.is_finite());
        if !positive || d.bc_points < 2 || !(d.bc_min < d.bc_max) {
            return Err(CliError::Config("design: fields, lengths and Ms must be positive; need >= 2 Bc points".into()));
        }
        if d.temperatures_mk.iter().any(|t| !(*t >= 0.0)) {
            return Err(CliError::Config("design.T_mK_list: temperatures must be non-negative".into()));
        }
        Ok(())
    }
}
