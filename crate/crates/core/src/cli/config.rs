//! `key = value` run configuration with dotted section prefixes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::control::{SweepMode, SweepParameter};
use crate::entangle::DephasingNoise;
use crate::physmodel::{
    build_channel, channel_from_geometry, effective_controls, ChannelKind, ChannelSpec,
    ControlParams,
};
use crate::qmat::{ComplexMat4, DensityMatrix, C64};

/// Configuration problem, always tied to the key that caused it.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key '{}': {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = std::result::Result<T, ConfigError>;

const KEYS: &[&str] = &[
    "model.channel",
    "model.gamma",
    "model.gamma12",
    "model.eta0",
    "model.theta",
    "model.k0_r12",
    "control.mu1",
    "control.phi1",
    "control.mu2",
    "control.phi2",
    "control.xi",
    "control.delta",
    "control.eps1",
    "control.eps2",
    "noise.gamma1",
    "noise.gamma2",
    "noise.delta_r_over_lambda",
    "initial.state",
    "initial.kappa",
    "run.t_max",
    "run.dt",
    "run.samples",
    "run.adaptive_tol",
    "run.mode",
    "run.output",
    "sweep.parameter",
    "sweep.start",
    "sweep.stop",
    "sweep.steps",
    "sweep.values",
    "figure.kind",
    "figure.r",
    "figure.title",
];

fn is_known(key: &str) -> bool {
    if KEYS.contains(&key) {
        return true;
    }
    // Custom initial-state entries initial.rIJ, I, J in 1..=4.
    if let Some(rest) = key.strip_prefix("initial.r") {
        let b = rest.as_bytes();
        return b.len() == 2 && (b'1'..=b'4').contains(&b[0]) && (b'1'..=b'4').contains(&b[1]);
    }
    false
}

/// Raw parsed key/value pairs; later `set` calls override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> CResult<Self> {
        let mut raw = RawConfig::default();
        raw.merge_text(text)?;
        Ok(raw)
    }

    pub fn merge_text(&mut self, text: &str) -> CResult<()> {
        for (n, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ConfigError::new(line, format!("line {} is not of the form key = value", n + 1))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> CResult<()> {
        if !is_known(key) {
            return Err(ConfigError::new(key, "unknown key"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Parses a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> CResult<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| ConfigError::new(pair, "override must be key=value"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn has_prefix(&self, prefix: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(prefix))
    }

    fn f64(&self, key: &str) -> CResult<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> CResult<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn complex(&self, key: &str) -> CResult<Option<C64>> {
        self.get(key).map(|v| parse_complex(key, v)).transpose()
    }

    fn list(&self, key: &str) -> CResult<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|item| parse_f64(key, item.trim()))
                    .collect::<CResult<Vec<f64>>>()
            })
            .transpose()
    }
}

/// Accepts plain floats plus `pi`, `pi/N`, `N*pi` shorthands.
fn parse_f64(key: &str, v: &str) -> CResult<f64> {
    let t = v.trim();
    let bad = || ConfigError::new(key, format!("'{v}' is not a number"));
    if let Some(i) = t.find("pi") {
        let (pre, post) = (&t[..i], &t[i + 2..]);
        let factor = match pre.trim_end_matches('*').trim() {
            "" => 1.0,
            "-" => -1.0,
            s => s.parse::<f64>().map_err(|_| bad())?,
        };
        let div = match post.trim() {
            "" => 1.0,
            s => s
                .strip_prefix('/')
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        return Ok(factor * PI / div);
    }
    let x = t.parse::<f64>().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    Ok(x)
}

/// `re` or `re, im`.
fn parse_complex(key: &str, v: &str) -> CResult<C64> {
    let mut parts = v.split(',');
    let re = parse_f64(key, parts.next().unwrap_or(""))?;
    let im = match parts.next() {
        Some(p) => parse_f64(key, p)?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(ConfigError::new(key, "expected 're' or 're, im'"));
    }
    Ok(C64::new(re, im))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSection {
    pub kind: ChannelKind,
    /// Decay rate in the user's rate unit; all other rates scale with it.
    pub gamma: f64,
    /// Γ₁₂/Γ.
    pub gamma12: Option<f64>,
    /// η₀/Γ.
    pub eta0: Option<f64>,
    pub theta: Option<f64>,
    pub k0_r12: Option<f64>,
}

impl ModelSection {
    /// Channel in units where Γ = 1.
    pub fn channel(&self) -> CResult<ChannelSpec> {
        if let (Some(x), None, None) = (self.k0_r12, self.gamma12, self.eta0) {
            let theta = self.theta.ok_or_else(|| {
                ConfigError::new("model.theta", "required together with model.k0_r12")
            })?;
            return channel_from_geometry(self.kind, 1.0, x, theta)
                .map_err(|e| ConfigError::new("model.k0_r12", e.to_string()));
        }
        build_channel(self.kind, 1.0, self.gamma12, self.eta0).map_err(|e| {
            let key = if self.kind == ChannelKind::Independent && self.eta0.is_some_and(|v| v != 0.0) {
                "model.eta0"
            } else {
                "model.gamma12"
            };
            ConfigError::new(key, e.to_string())
        })
    }
}

/// Named or explicit initial state.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    Named(String),
    SingletMix(f64),
    Custom(ComplexMat4),
}

pub const INITIAL_STATES: &[&str] = &[
    "ground",
    "bell_phi_plus",
    "singlet_mix",
    "paper_rho01_s3",
    "paper_rho02",
    "paper_rho01_s4",
    "custom",
];

fn x_matrix(diag: [f64; 4], corner: f64) -> ComplexMat4 {
    let mut m = ComplexMat4::from_real_diag(diag);
    m.0[0][3] = C64::new(corner, 0.0);
    m.0[3][0] = C64::new(corner, 0.0);
    m
}

/// The fixed initial states.
pub fn named_state(name: &str) -> Option<DensityMatrix> {
    let mat = match name {
        "ground" => ComplexMat4::from_real_diag([1.0, 0.0, 0.0, 0.0]),
        "bell_phi_plus" | "paper_rho01_s3" => x_matrix([0.5, 0.0, 0.0, 0.5], 0.5),
        "paper_rho02" => x_matrix([0.85, 0.03, 0.07, 0.05], 0.1),
        "paper_rho01_s4" => x_matrix([0.375, 0.125, 0.125, 0.375], 0.375),
        _ => return None,
    };
    Some(DensityMatrix::new_unchecked(mat))
}

impl InitialSpec {
    pub fn resolve(&self) -> CResult<DensityMatrix> {
        match self {
            InitialSpec::Named(n) => {
                named_state(n).ok_or_else(|| ConfigError::new("initial.state", format!("unknown state '{n}'")))
            }
            InitialSpec::SingletMix(k) => crate::control::singlet_mix(*k)
                .map_err(|e| ConfigError::new("initial.kappa", e.to_string())),
            InitialSpec::Custom(m) => DensityMatrix::new(*m)
                .map_err(|e| ConfigError::new("initial.state", e.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSection {
    /// In units of 1/Γ.
    pub t_max: f64,
    /// In units of 1/Γ.
    pub dt: Option<f64>,
    pub samples: usize,
    pub adaptive_tol: Option<f64>,
    pub mode: SweepMode,
    pub output: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// Figure-specific preset settings.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureSection {
    pub kind: Option<String>,
    pub r: Vec<f64>,
    pub title: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelSection,
    /// In units of Γ.
    pub control: ControlParams,
    pub control_warnings: Vec<String>,
    pub noise: DephasingNoise,
    pub initial: InitialSpec,
    pub run: RunSection,
    pub sweep: SweepSection,
    pub figure: FigureSection,
}

const DIRECT: [&str; 4] = ["control.mu1", "control.phi1", "control.mu2", "control.phi2"];
const PHYSICAL: [&str; 4] = ["control.xi", "control.delta", "control.eps1", "control.eps2"];

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> CResult<Self> {
        let kind = match raw.get("model.channel") {
            Some(v) => v
                .parse::<ChannelKind>()
                .map_err(|_| ConfigError::new("model.channel", format!("unknown channel '{v}'")))?,
            None => ChannelKind::Independent,
        };
        let gamma = raw.f64_or("model.gamma", 1.0)?;
        if !(gamma > 0.0) {
            return Err(ConfigError::new("model.gamma", "must be > 0"));
        }
        let model = ModelSection {
            kind,
            gamma,
            gamma12: raw.f64("model.gamma12")?,
            eta0: raw.f64("model.eta0")?,
            theta: raw.f64("model.theta")?,
            k0_r12: raw.f64("model.k0_r12")?,
        };
        model.channel()?;

        let direct = DIRECT.iter().find(|k| raw.get(k).is_some());
        let physical = PHYSICAL.iter().find(|k| raw.get(k).is_some());
        let (control, control_warnings) = match (direct, physical) {
            (Some(d), Some(p)) => {
                return Err(ConfigError::new(
                    *p,
                    format!("cannot combine physical control with direct key '{d}'"),
                ))
            }
            (_, Some(_)) => {
                let mut vals = [C64::new(0.0, 0.0); 4];
                for (v, key) in vals.iter_mut().zip(PHYSICAL.iter()) {
                    *v = raw
                        .complex(key)?
                        .ok_or_else(|| ConfigError::new(*key, "required for physical control"))?;
                }
                if vals[1].im != 0.0 {
                    return Err(ConfigError::new("control.delta", "detuning must be real"));
                }
                let red = effective_controls(vals[0], vals[1].re, vals[2], vals[3])
                    .map_err(|e| ConfigError::new("control.delta", e.to_string()))?;
                let c = red.value;
                (
                    ControlParams {
                        mu1: c.mu1 / gamma,
                        phi1: c.phi1,
                        mu2: c.mu2 / gamma,
                        phi2: c.phi2,
                    },
                    red.warnings,
                )
            }
            _ => {
                let mut v = [0.0; 4];
                for (x, key) in v.iter_mut().zip(DIRECT.iter()) {
                    *x = raw.f64_or(key, 0.0)?;
                }
                let c = ControlParams::new(v[0], v[1], v[2], v[3]).map_err(|e| {
                    let key = if v[0] < 0.0 { "control.mu1" } else { "control.mu2" };
                    ConfigError::new(key, e.to_string())
                })?;
                (c, Vec::new())
            }
        };

        let noise = match raw.f64("noise.delta_r_over_lambda")? {
            Some(x) => {
                if raw.get("noise.gamma1").is_some() || raw.get("noise.gamma2").is_some() {
                    return Err(ConfigError::new(
                        "noise.delta_r_over_lambda",
                        "cannot combine with noise.gamma1/noise.gamma2",
                    ));
                }
                DephasingNoise::symmetric(2.0 * PI * PI * x * x)
            }
            None => DephasingNoise::new(raw.f64_or("noise.gamma1", 0.0)?, raw.f64_or("noise.gamma2", 0.0)?),
        }
        .map_err(|e| ConfigError::new("noise.gamma1", e.to_string()))?;

        let initial = parse_initial(raw)?;
        initial.resolve()?;

        let t_max = raw.f64_or("run.t_max", 20.0)?;
        if !(t_max > 0.0) {
            return Err(ConfigError::new("run.t_max", "must be > 0"));
        }
        let dt = raw.f64("run.dt")?;
        if dt.is_some_and(|d| !(d > 0.0)) {
            return Err(ConfigError::new("run.dt", "must be > 0"));
        }
        let samples = match raw.get("run.samples") {
            Some(v) => v
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| ConfigError::new("run.samples", "must be a positive integer"))?,
            None => 400,
        };
        let adaptive_tol = raw.f64("run.adaptive_tol")?;
        if adaptive_tol.is_some_and(|t| !(t > 0.0)) {
            return Err(ConfigError::new("run.adaptive_tol", "must be > 0"));
        }
        let mode = match raw.get("run.mode") {
            Some(v) => v
                .parse::<SweepMode>()
                .map_err(|_| ConfigError::new("run.mode", format!("expected analytic or numeric, got '{v}'")))?,
            None => SweepMode::Analytic,
        };
        let run = RunSection {
            t_max,
            dt,
            samples,
            adaptive_tol,
            mode,
            output: raw.get("run.output").map(str::to_string),
        };

        let sweep = parse_sweep(raw)?;
        let figure = FigureSection {
            kind: raw.get("figure.kind").map(str::to_string),
            r: raw.list("figure.r")?.unwrap_or_default(),
            title: raw.get("figure.title").map(str::to_string),
        };
        Ok(RunConfig {
            model,
            control,
            control_warnings,
            noise,
            initial,
            run,
            sweep,
            figure,
        })
    }

    /// The channel with Γ = 1.
    pub fn channel(&self) -> ChannelSpec {
        self.model.channel().expect("validated at parse time")
    }

    pub fn initial_state(&self) -> DensityMatrix {
        self.initial.resolve().expect("validated at parse time")
    }
}

fn parse_initial(raw: &RawConfig) -> CResult<InitialSpec> {
    let name = raw.get("initial.state").unwrap_or("ground");
    let has_entries = (1..=4).any(|i| (1..=4).any(|j| raw.get(&format!("initial.r{i}{j}")).is_some()));
    if has_entries && name != "custom" {
        return Err(ConfigError::new(
            "initial.state",
            "matrix entries initial.rIJ need initial.state = custom",
        ));
    }
    if raw.get("initial.kappa").is_some() && name != "singlet_mix" {
        return Err(ConfigError::new("initial.kappa", "only used with initial.state = singlet_mix"));
    }
    match name {
        "singlet_mix" => Ok(InitialSpec::SingletMix(raw.f64_or("initial.kappa", 0.5)?)),
        "custom" => {
            let mut m = ComplexMat4::zeros();
            let mut seen = [[false; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    let key = format!("initial.r{}{}", i + 1, j + 1);
                    if let Some(v) = raw.complex(&key)? {
                        m.0[i][j] = v;
                        seen[i][j] = true;
                    }
                }
            }
            for i in 0..4 {
                for j in 0..4 {
                    if !seen[i][j] && seen[j][i] {
                        m.0[i][j] = m.0[j][i].conj();
                    }
                }
            }
            Ok(InitialSpec::Custom(m))
        }
        n if named_state(n).is_some() => Ok(InitialSpec::Named(n.to_string())),
        n => Err(ConfigError::new(
            "initial.state",
            format!("unknown state '{n}' (expected one of {})", INITIAL_STATES.join(", ")),
        )),
    }
}

fn parse_sweep(raw: &RawConfig) -> CResult<SweepSection> {
    let parameter = match raw.get("sweep.parameter") {
        Some(v) => v
            .parse::<SweepParameter>()
            .map_err(|e| ConfigError::new("sweep.parameter", e.to_string()))?,
        None => SweepParameter::Mu1OverGamma,
    };
    let values = match raw.list("sweep.values")? {
        Some(v) => {
            for key in ["sweep.start", "sweep.stop", "sweep.steps"] {
                if raw.get(key).is_some() {
                    return Err(ConfigError::new(key, "cannot combine with sweep.values"));
                }
            }
            v
        }
        None => {
            let start = raw.f64_or("sweep.start", 0.0)?;
            let stop = raw.f64_or("sweep.stop", 2.0)?;
            let steps = match raw.get("sweep.steps") {
                Some(v) => v
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| ConfigError::new("sweep.steps", "must be a positive integer"))?,
                None => 200,
            };
            if !(stop > start) {
                return Err(ConfigError::new("sweep.stop", "must exceed sweep.start"));
            }
            // Integer-indexed so that grid values are reproducible exactly.
            (0..=steps)
                .map(|k| start + (stop - start) * k as f64 / steps as f64)
                .collect()
        }
    };
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::new("sweep.values", "must be strictly ascending"));
    }
    Ok(SweepSection { parameter, values })
}
