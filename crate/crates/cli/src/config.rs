//! Scenario files: parsing, validation and resolution into natural units.

use std::collections::BTreeMap;

use dcesim::cavity::{fundamental_eta, CavityConfig, Mode, ModeClass};
use dcesim::effective::{
    resonance_report, squeezing_parameter, thermal_occupation, velocity_parameter, DriveConfig,
};
use dcesim::units::{beta_from_kelvin, frequency_from_si, frequency_to_si, time_from_si};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "SI")]
    Si,
    #[serde(rename = "natural")]
    Natural,
}

impl Units {
    /// Frequency in the file's units to natural units.
    pub fn freq_in(self, v: f64) -> f64 {
        match self {
            Units::Si => frequency_from_si(v),
            Units::Natural => v,
        }
    }

    pub fn freq_out(self, v: f64) -> f64 {
        match self {
            Units::Si => frequency_to_si(v),
            Units::Natural => v,
        }
    }

    /// Times and inverse temperatures share the same conversion.
    pub fn time_in(self, v: f64) -> f64 {
        match self {
            Units::Si => time_from_si(v),
            Units::Natural => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadratic,
    MasterAnalytic,
    MasterNumeric,
    Propagator,
    FockOracle,
    Detuning,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Quadratic => "quadratic",
            Method::MasterAnalytic => "master-analytic",
            Method::MasterNumeric => "master-numeric",
            Method::Propagator => "propagator",
            Method::FockOracle => "fock-oracle",
            Method::Detuning => "detuning",
        }
    }
}

/// Two-mirror cavity; lengths in metres and γ in 1/m in both unit systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub a0: f64,
    pub b: f64,
    pub c: f64,
    pub dy: f64,
    pub dz: f64,
    pub gamma: f64,
    /// `[nx, ny, nz]` of the right partner; found from the drive when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_mode: Option<[u32; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Effective {
    pub xi: f64,
    pub chis: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Drive {
    pub epsilon: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
}

/// At most one of the three ways to fix the initial occupations; none means vacuum.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Temperature {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kelvin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupations: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.start];
        }
        let n = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| self.start + (self.end - self.start) * k as f64 / n)
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_big: Option<f64>,
}

fn default_fock() -> [usize; 2] {
    [40, 20]
}

fn default_master_cap() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_fock")]
    pub fock_cutoffs: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_cutoff: Option<usize>,
    /// Largest automatically chosen master-equation cutoff.
    #[serde(default = "default_master_cap")]
    pub master_cutoff_cap: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            fock_cutoffs: default_fock(),
            master_cutoff: None,
            master_cutoff_cap: default_master_cap(),
        }
    }
}

/// Either an explicit list or `{start, end, samples}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    Values(Vec<f64>),
    Linear(TimeGrid),
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Range::Values(v) => v.clone(),
            Range::Linear(g) => g.points(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Epsilon,
    Gamma,
    T,
    Beta,
    Delta,
    DeltaBig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    #[default]
    Cartesian,
    Zip,
}

fn default_cap() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default)]
    pub mode: SweepMode,
    #[serde(default = "default_cap")]
    pub cap: usize,
    pub axes: BTreeMap<Axis, Range>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdInput {
    pub delta_big: Range,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<Drive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<Effective>,
    #[serde(default)]
    pub temperature: Temperature,
    pub methods: Vec<Method>,
    pub time: TimeGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<DetuningInput>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdInput>,
}

fn invalid(path: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{path}: {reason}"))
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<(), CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, format!("must be non-negative and finite, got {v}")))
    }
}

/// Parse a scenario file or a metadata sidecar written by a previous run.
pub fn parse(text: &str) -> Result<Config, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
    let inner = match value.get("config") {
        Some(c) if value.get("tool").is_some() => c.clone(),
        _ => value,
    };
    let cfg: Config =
        serde_json::from_value(inner).map_err(|e| CliError::Validation(format!("config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

impl Config {
    pub fn validate(&self) -> Result<(), CliError> {
        match (&self.geometry, &self.effective) {
            (Some(_), Some(_)) => {
                return Err(invalid("geometry", "give either `geometry` or `effective`, not both"))
            }
            (None, None) => return Err(invalid("geometry", "one of `geometry` or `effective` is required")),
            _ => {}
        }
        if let Some(g) = &self.geometry {
            non_negative("geometry.a0", g.a0)?;
            if !(g.a0 < g.b && g.b < g.c) {
                return Err(invalid("geometry.b", "need a0 < b < c"));
            }
            positive("geometry.dy", g.dy)?;
            positive("geometry.dz", g.dz)?;
            positive("geometry.gamma", g.gamma)?;
            if let Some(m) = g.right_mode {
                if m.contains(&0) {
                    return Err(invalid("geometry.right_mode", "mode numbers start at 1"));
                }
            }
            let d = self.drive.as_ref().ok_or_else(|| invalid("drive", "required with `geometry`"))?;
            non_negative("drive.epsilon", d.epsilon)?;
            if !d.delta.is_finite() {
                return Err(invalid("drive.delta", "must be finite"));
            }
            if let Some(t) = d.duration {
                positive("drive.duration", t)?;
            }
        }
        if let Some(e) = &self.effective {
            non_negative("effective.xi", e.xi)?;
            if e.chis.is_empty() {
                return Err(invalid("effective.chis", "need at least one hopping rate"));
            }
            for (i, c) in e.chis.iter().enumerate() {
                if !c.is_finite() {
                    return Err(invalid(&format!("effective.chis[{i}]"), "must be finite"));
                }
            }
            if let Some(w) = e.omega_l {
                positive("effective.omega_l", w)?;
            }
            if let Some(w) = e.omega_r {
                positive("effective.omega_r", w)?;
            }
            if self.drive.is_some() {
                return Err(invalid("drive", "only used with `geometry`"));
            }
        }
        let t = &self.temperature;
        let given = [t.kelvin.is_some(), t.beta.is_some(), t.occupations.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(invalid("temperature", "give at most one of kelvin, beta, occupations"));
        }
        if let Some(k) = t.kelvin {
            non_negative("temperature.kelvin", k)?;
        }
        if let Some(b) = t.beta {
            positive("temperature.beta", b)?;
        }
        if let Some([a, b]) = t.occupations {
            non_negative("temperature.occupations[0]", a)?;
            non_negative("temperature.occupations[1]", b)?;
        }
        if self.methods.is_empty() {
            return Err(invalid("methods", "select at least one method"));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(invalid("methods", "methods must not repeat"));
        }
        let g = &self.time;
        non_negative("time.start", g.start)?;
        if g.samples == 0 {
            return Err(invalid("time.samples", "must be at least 1"));
        }
        if g.samples > 1 && !(g.end > g.start && g.end.is_finite()) {
            return Err(invalid("time.end", "the grid must be strictly increasing"));
        }
        let [cl, cr] = self.numerics.fock_cutoffs;
        if cl < 2 || cr < 2 {
            return Err(invalid("numerics.fock_cutoffs", "both must be at least 2"));
        }
        if let Some(c) = self.numerics.master_cutoff {
            if c < 4 {
                return Err(invalid("numerics.master_cutoff", "must be at least 4"));
            }
        }
        if self.effective.is_some() && self.needs_detuning() && self.omega_l_effective().is_none() {
            return Err(invalid("effective.omega_l", "required by the detuning analysis"));
        }
        if let Some(d) = &self.detuning {
            if self.geometry.is_some() && (d.delta.is_some() || d.delta_big.is_some()) {
                return Err(invalid("detuning", "with `geometry` the detunings follow from drive and partner"));
            }
        }
        if let Some(s) = &self.sweep {
            for (axis, range) in &s.axes {
                let path = format!("sweep.axes.{}", axis_name(*axis));
                if let Range::Linear(g) = range {
                    if g.samples == 0 || (g.samples > 1 && !(g.end > g.start)) {
                        return Err(invalid(&path, "range must be strictly increasing with at least one sample"));
                    }
                }
                if range.values().is_empty() {
                    return Err(invalid(&path, "empty range"));
                }
                let geometric = matches!(axis, Axis::Epsilon | Axis::Gamma);
                if geometric && self.geometry.is_none() {
                    return Err(invalid(&path, "only available with `geometry`"));
                }
                if *axis == Axis::DeltaBig && self.geometry.is_some() {
                    return Err(invalid(&path, "with `geometry` Delta follows from the partner mode"));
                }
            }
            if s.axes.is_empty() {
                return Err(invalid("sweep.axes", "need at least one axis"));
            }
        }
        Ok(())
    }

    fn needs_detuning(&self) -> bool {
        self.methods.contains(&Method::Detuning) || self.threshold.is_some()
    }

    fn omega_l_effective(&self) -> Option<f64> {
        self.effective.as_ref().and_then(|e| e.omega_l)
    }

    /// Canonical serialisation, the basis of the config hash.
    pub fn canonical(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("config serialises")
    }
}

pub fn axis_name(a: Axis) -> &'static str {
    match a {
        Axis::Epsilon => "epsilon",
        Axis::Gamma => "gamma",
        Axis::T => "t",
        Axis::Beta => "beta",
        Axis::Delta => "delta",
        Axis::DeltaBig => "delta_big",
    }
}

/// A scenario in natural units, ready for the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub xi: f64,
    pub chis: Vec<f64>,
    pub omega_l: Option<f64>,
    pub omega_r: Option<f64>,
    pub eta: Option<f64>,
    pub beta: Option<f64>,
    pub n_l0: f64,
    pub n_r0: f64,
    pub delta: f64,
    pub delta_big: f64,
    /// `(value in file units, value in natural units)` per sample.
    pub times: Vec<(f64, f64)>,
    pub right_mode: Option<[u32; 3]>,
    pub warnings: Vec<String>,
}

impl Resolved {
    pub fn chi_eff(&self) -> f64 {
        self.chis.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

pub fn resolve(cfg: &Config) -> Result<Resolved, CliError> {
    let u = cfg.units;
    let times: Vec<(f64, f64)> = cfg.time.points().into_iter().map(|t| (t, u.time_in(t))).collect();
    let t_end = times.last().map(|p| p.1).unwrap_or(0.0);
    let mut warnings = Vec::new();

    let (xi, chis, omega_l, omega_r, eta, delta, delta_big, right_mode) = if let Some(g) = &cfg.geometry {
        let d = cfg.drive.as_ref().expect("validated");
        let cav = CavityConfig::new(g.a0, g.b, g.c, g.dy, g.dz, g.gamma)?;
        let duration = d.duration.map(|t| u.time_in(t)).unwrap_or(if t_end > 0.0 { t_end } else { 1.0 });
        let drive = DriveConfig::resonant(&cav, d.epsilon, d.delta, duration)?;
        warnings.extend(drive.warnings());
        let right = match g.right_mode {
            Some([nx, ny, nz]) => Mode::solve(&cav, nx, ny, nz, ModeClass::RightDominated)?,
            None => resonance_report(&cav, &drive, None)?
                .partner_mode()
                .cloned()
                .ok_or_else(|| {
                    invalid("geometry.right_mode", "no right-dominated mode is resonant with the drive; name one explicitly")
                })?,
        };
        let l = Mode::fundamental(&cav)?;
        let xi = squeezing_parameter(&cav, &drive)?;
        let chi = velocity_parameter(&cav, &drive, &right)?;
        let eta = fundamental_eta(&cav)?;
        let delta_big = right.omega_total / l.omega_total - 3.0;
        (
            xi,
            vec![chi],
            Some(l.omega_total),
            Some(right.omega_total),
            Some(eta),
            d.delta,
            delta_big,
            Some([right.nx, right.ny, right.nz]),
        )
    } else {
        let e = cfg.effective.as_ref().expect("validated");
        let det = cfg.detuning.clone().unwrap_or_default();
        (
            u.freq_in(e.xi),
            e.chis.iter().map(|&c| u.freq_in(c)).collect(),
            e.omega_l.map(|w| u.freq_in(w)),
            e.omega_r.map(|w| u.freq_in(w)),
            None,
            det.delta.unwrap_or(0.0),
            det.delta_big.unwrap_or(0.0),
            None,
        )
    };

    let t = &cfg.temperature;
    let beta = match (t.kelvin, t.beta) {
        (Some(k), _) => Some(beta_from_kelvin(k)),
        (_, Some(b)) => Some(u.time_in(b)),
        _ => None,
    };
    let (n_l0, n_r0) = if let Some([a, b]) = t.occupations {
        (a, b)
    } else if let Some(beta) = beta {
        let wl = omega_l.ok_or_else(|| invalid("effective.omega_l", "required to turn a temperature into occupations"))?;
        let wr = omega_r.ok_or_else(|| invalid("effective.omega_r", "required to turn a temperature into occupations"))?;
        (thermal_occupation(beta, wl)?, thermal_occupation(beta, wr)?)
    } else {
        (0.0, 0.0)
    };

    Ok(Resolved {
        xi,
        chis,
        omega_l,
        omega_r,
        eta,
        beta,
        n_l0,
        n_r0,
        delta,
        delta_big,
        times,
        right_mode,
        warnings,
    })
}
