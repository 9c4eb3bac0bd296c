//! Command-line front end.

pub mod config;
pub mod csv;
pub mod presets;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::control::{
    dephase_corner, improvement_interval, optimize_mu1, sweep, Objective, Scenario, SweepGrid,
};
use crate::dynamics::{propagate, ModelSpec, PropagateSettings, StepControl, Trajectory};
use crate::entangle;
use crate::physmodel::{ChannelKind, ChannelSpec, ControlParams};
use crate::qmat::{coherence_components, idx, DensityMatrix};

use self::config::{ConfigError, RawConfig, RunConfig};
use self::csv::{fmt_sig, Cell, Table};
use self::svg::{Chart, Marker, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "entlab", version, about = "Stationary two-atom entanglement under squeezed-field control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Start from a built-in configuration.
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    pub out: PathBuf,
    /// Also write an SVG chart.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Append the 15 coherence-vector components to trajectory output.
    #[arg(long, global = true)]
    pub emit_coherence: bool,
    /// Override a configuration key, e.g. `--set control.mu1=0.3`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Integrate the master equation and write the trajectory.
    Simulate,
    /// Stationary state summary.
    Steady,
    /// Stationary concurrence and fidelity over a parameter grid.
    Sweep,
    /// Maximize the stationary concurrence over μ₁.
    Optimize,
    /// Regenerate the data and chart of a built-in figure.
    Reproduce {
        /// fig2, fig3a, fig3b, fig4a, fig4b, fig5a or fig5b.
        figure: String,
    },
    /// List built-in presets.
    Presets,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numeric(crate::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Numeric(e) => write!(f, "numeric failure: {e}"),
            CliError::Io(e) => write!(f, "i/o failure: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Numeric(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns the files written.
pub fn execute(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let common = &cli.common;
    match &cli.command {
        Command::Presets => {
            for name in presets::names() {
                println!("{name}");
            }
            Ok(Vec::new())
        }
        Command::Reproduce { figure } => {
            if presets::preset(figure).is_none() {
                return Err(ConfigError::new(
                    "figure",
                    format!("unknown figure '{figure}' (expected one of {})", presets::names().join(", ")),
                )
                .into());
            }
            let cfg = load_config(common, Some(figure))?;
            reproduce(figure, &cfg, common)
        }
        cmd => {
            let cfg = load_config(common, common.preset.as_deref())?;
            for w in &cfg.control_warnings {
                eprintln!("warning: {w}");
            }
            match cmd {
                Command::Simulate => simulate(&cfg, common),
                Command::Steady => steady(&cfg, common),
                Command::Sweep => run_sweep(&cfg, common),
                Command::Optimize => optimize(&cfg, common),
                _ => unreachable!(),
            }
        }
    }
}

/// Preset, then config file, then `--set` overrides.
pub fn load_config(common: &CommonArgs, preset: Option<&str>) -> CliResult<RunConfig> {
    let mut raw = RawConfig::default();
    if let Some(name) = preset {
        let text = presets::preset(name).ok_or_else(|| {
            ConfigError::new("--preset", format!("unknown preset '{name}' (expected one of {})", presets::names().join(", ")))
        })?;
        raw.merge_text(text)?;
    }
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
        raw.merge_text(&text)?;
    }
    for pair in &common.overrides {
        raw.set_pair(pair)?;
    }
    Ok(RunConfig::from_raw(&raw)?)
}

fn write_file(path: &Path, contents: &str) -> CliResult<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

fn output_stem(cfg: &RunConfig, default: &str) -> String {
    cfg.run.output.clone().unwrap_or_else(|| default.to_string())
}

fn write_outputs(
    common: &CommonArgs,
    stem: &str,
    table: &Table,
    chart: Option<Chart>,
) -> CliResult<Vec<PathBuf>> {
    let mut paths = vec![write_file(&common.out.join(format!("{stem}.csv")), &table.to_csv())?];
    if let Some(chart) = chart {
        paths.push(write_file(&common.out.join(format!("{stem}.svg")), &chart.render())?);
    }
    Ok(paths)
}

fn state_concurrence(rho: &DensityMatrix) -> CliResult<f64> {
    Ok(entangle::state_concurrence(rho)?)
}

fn settings(cfg: &RunConfig) -> PropagateSettings {
    match cfg.run.adaptive_tol {
        Some(tol) => PropagateSettings {
            step: StepControl::Adaptive { tol },
            samples: cfg.run.samples,
        },
        None => PropagateSettings::fixed(cfg.run.dt, cfg.run.samples),
    }
}

fn scenario(cfg: &RunConfig) -> Scenario {
    let channel = cfg.channel();
    Scenario {
        kind: cfg.model.kind,
        gamma: 1.0,
        gamma12: (cfg.model.kind != ChannelKind::Independent).then_some(channel.gamma12()),
        eta0: channel.eta0(),
        ctrl: cfg.control,
        kappa: None,
        noise: cfg.noise,
        rho0: Some(cfg.initial_state()),
    }
}

fn simulate(cfg: &RunConfig, common: &CommonArgs) -> CliResult<Vec<PathBuf>> {
    let model = ModelSpec::new(&cfg.control, cfg.channel());
    let traj = propagate(&cfg.initial_state(), &model, cfg.run.t_max, &settings(cfg))?;
    let mut header: Vec<String> = ["t", "C", "purity", "p00", "p01", "p10", "p11", "re_w", "re_z"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if common.emit_coherence {
        header.extend(idx::NAMES.iter().map(|s| s.to_string()));
    }
    let mut table = Table::new(header);
    for (&t, state) in traj.times.iter().zip(&traj.states) {
        let rho = dephase_corner(state, &cfg.noise);
        let m = rho.mat();
        let mut row: Vec<Cell> = vec![t.into(), state_concurrence(&rho)?.into(), rho.purity().into()];
        row.extend(rho.populations().map(Cell::Num));
        row.push(m.0[0][3].re.into());
        row.push(m.0[1][2].re.into());
        if common.emit_coherence {
            row.extend(coherence_components(m)?.map(Cell::Num));
        }
        table.push(row);
    }
    let chart = common.svg.then(|| Chart {
        title: "Concurrence".into(),
        x_label: "t Γ".into(),
        y_label: "C".into(),
        x_range: (0.0, cfg.run.t_max),
        y_range: (0.0, 1.0),
        series: vec![Series::new("C(t)", &traj.times, &table.column("C").unwrap_or_default())],
    });
    write_outputs(common, &output_stem(cfg, "trajectory"), &table, chart)
}

fn steady(cfg: &RunConfig, common: &CommonArgs) -> CliResult<Vec<PathBuf>> {
    let rep = scenario(cfg).evaluate(cfg.run.mode)?;
    let m = rep.state.mat();
    let mut header: Vec<String> = [
        "mu1_over_gamma", "C", "fidelity", "kappa", "r", "beta", "p00", "p01", "p10", "p11", "re_w",
        "im_w", "re_z", "im_z",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(rep.weights.iter().map(|(n, _)| format!("w_{n}")));
    let mut row: Vec<Cell> = vec![
        cfg.control.mu1.into(),
        rep.concurrence.into(),
        rep.fidelity_to_rho_m.into(),
        rep.kappa.into(),
        rep.r.into(),
        rep.beta.into(),
    ];
    row.extend(rep.state.populations().map(Cell::Num));
    for z in [m.0[0][3], m.0[1][2]] {
        row.push(z.re.into());
        row.push(z.im.into());
    }
    row.extend(rep.weights.iter().map(|(_, w)| Cell::Num(*w)));
    let mut table = Table::new(header);
    table.push(row);
    write_outputs(common, &output_stem(cfg, "steady"), &table, None)
}

fn run_sweep(cfg: &RunConfig, common: &CommonArgs) -> CliResult<Vec<PathBuf>> {
    let grid = SweepGrid::new(cfg.sweep.parameter, cfg.sweep.values.clone())?;
    let rows = sweep(&grid, &scenario(cfg), cfg.run.mode);
    let name = cfg.sweep.parameter.name();
    let mut table = Table::new([name, "C", "fidelity", "status"]);
    let mut failed = 0;
    for row in &rows {
        match &row.result {
            Ok(d) => table.push(vec![row.value.into(), d.concurrence.into(), d.fidelity.into(), "ok".into()]),
            Err(e) => {
                failed += 1;
                table.push(vec![row.value.into(), Cell::Empty, Cell::Empty, e.to_string().into()]);
            }
        }
    }
    if failed > 0 {
        eprintln!("warning: {failed} of {} sweep rows failed", rows.len());
    }
    let chart = common.svg.then(|| Chart {
        title: format!("Stationary concurrence vs {name}"),
        x_label: name.into(),
        y_label: "C".into(),
        x_range: (grid.values[0], *grid.values.last().expect("nonempty grid")),
        y_range: (0.0, 1.0),
        series: vec![Series::new("C", &grid.values, &table.column("C").unwrap_or_default())],
    });
    write_outputs(common, &output_stem(cfg, "sweep"), &table, chart)
}

fn optimize(cfg: &RunConfig, common: &CommonArgs) -> CliResult<Vec<PathBuf>> {
    let sc = scenario(cfg);
    let (objective, kappa) = match cfg.model.kind {
        ChannelKind::Independent | ChannelKind::Mixed => (
            Objective::Independent {
                gamma: 1.0,
                noise: cfg.noise,
            },
            None,
        ),
        ChannelKind::Collective => {
            let kappa = sc.resolved_kappa()?;
            (Objective::Collective { gamma: 1.0, kappa }, Some(kappa))
        }
    };
    let opt = optimize_mu1(&objective)?;
    let mut header = vec!["channel", "mu1_star_over_gamma", "C_max", "analytic_mu1_over_gamma", "agreed"];
    let mut row: Vec<Cell> = vec![
        cfg.model.kind.name().into(),
        opt.mu1_star.into(),
        opt.value.into(),
        opt.analytic_mu1.into(),
        if opt.agreed { "true" } else { "false" }.into(),
    ];
    if let Some(k) = kappa {
        header.extend(["kappa", "interval_lo", "interval_hi"]);
        let interval = improvement_interval(k, 1.0)?;
        row.push(k.into());
        row.push(interval.map(|i| i.0).into());
        row.push(interval.map(|i| i.1).into());
    }
    let mut table = Table::new(header);
    table.push(row);
    write_outputs(common, &output_stem(cfg, "optimize"), &table, None)
}

fn reproduce(figure: &str, cfg: &RunConfig, common: &CommonArgs) -> CliResult<Vec<PathBuf>> {
    let (table, chart) = match cfg.figure.kind.as_deref() {
        Some("steady_sweep") => figure_sweep(cfg)?,
        Some("trajectories") => figure_trajectories(cfg)?,
        other => {
            return Err(ConfigError::new("figure.kind", format!("unsupported figure kind {other:?}")).into())
        }
    };
    let stem = output_stem(cfg, figure);
    write_outputs(common, &stem, &table, Some(chart))
}

fn figure_sweep(cfg: &RunConfig) -> CliResult<(Table, Chart)> {
    let sc = scenario(cfg);
    let grid = SweepGrid::new(cfg.sweep.parameter, cfg.sweep.values.clone())?;
    let rows = sweep(&grid, &sc, cfg.run.mode);
    let mut off = sc.clone();
    off.ctrl.mu1 = 0.0;
    let uncontrolled = off.evaluate(cfg.run.mode)?.concurrence;
    let name = cfg.sweep.parameter.name();
    let mut table = Table::new([name, "C", "fidelity", "C_uncontrolled"]);
    for row in rows {
        let d = row.result?;
        table.push(vec![row.value.into(), d.concurrence.into(), d.fidelity.into(), uncontrolled.into()]);
    }
    let c = table.column("C").unwrap_or_default();
    let chart = Chart {
        title: cfg.figure.title.clone().unwrap_or_default(),
        x_label: "μ₁/Γ".into(),
        y_label: "C(ρ∞)".into(),
        x_range: (grid.values[0], *grid.values.last().expect("nonempty grid")),
        y_range: (0.0, 0.5),
        series: vec![
            Series::new("controlled", &grid.values, &c),
            Series::new("uncontrolled", &grid.values, &vec![uncontrolled; c.len()]).with_marker(Marker::Plus),
        ],
    };
    Ok((table, chart))
}

/// Control strength giving stationary pair weight `r`, on the weak-drive branch.
fn mu1_for_r(cfg: &RunConfig, r: f64) -> CliResult<f64> {
    let kappa = match cfg.model.kind {
        ChannelKind::Collective => Some(crate::entangle::kappa_of(&cfg.initial_state())?),
        _ => None,
    };
    let r_max = kappa.map_or(0.5, |k| k / 3f64.sqrt());
    if !(r > 0.0 && r <= r_max + 1e-9) {
        return Err(ConfigError::new("figure.r", format!("r = {r} outside (0, {r_max}]")).into());
    }
    Ok(match kappa {
        None => (1.0 - (1.0 - 4.0 * r * r).max(0.0).sqrt()) / (4.0 * r),
        Some(k) => (k - (k * k - 3.0 * r * r).max(0.0).sqrt()) / (3.0 * r),
    })
}

fn figure_trajectories(cfg: &RunConfig) -> CliResult<(Table, Chart)> {
    let channel = cfg.channel();
    let mut curves: Vec<(String, ControlParams, ChannelSpec, Marker)> = vec![
        ("uncontrolled".into(), ControlParams::off(), channel, Marker::Plus),
        ("free".into(), ControlParams::off(), ChannelSpec::closed(), Marker::Triangle),
    ];
    for &r in &cfg.figure.r {
        let mut ctrl = cfg.control;
        ctrl.mu1 = mu1_for_r(cfg, r)?;
        curves.push((format!("r{}", fmt_sig(r, 6)), ctrl, channel, Marker::None));
    }
    let rho0 = cfg.initial_state();
    let settings = settings(cfg);
    let trajs: Vec<crate::Result<Trajectory>> = curves
        .par_iter()
        .map(|(_, ctrl, ch, _)| propagate(&rho0, &ModelSpec::new(ctrl, *ch), cfg.run.t_max, &settings))
        .collect();
    let trajs = trajs.into_iter().collect::<crate::Result<Vec<_>>>()?;
    let times = trajs[0].times.clone();
    if trajs.iter().any(|t| t.times != times) {
        return Err(CliError::Numeric(crate::Error::InvalidParameter(
            "trajectories sampled on different grids".into(),
        )));
    }
    let mut cols = Vec::with_capacity(trajs.len());
    for t in &trajs {
        cols.push(t.states.iter().map(state_concurrence).collect::<CliResult<Vec<f64>>>()?);
    }
    let mut header = vec!["t".to_string()];
    header.extend(curves.iter().map(|(l, ..)| format!("C_{l}")));
    let mut table = Table::new(header);
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![Cell::Num(t)];
        row.extend(cols.iter().map(|c| Cell::Num(c[i])));
        table.push(row);
    }
    let series = curves
        .iter()
        .zip(&cols)
        .map(|((l, _, _, marker), c)| Series::new(l.clone(), &times, c).with_marker(*marker))
        .collect();
    let chart = Chart {
        title: cfg.figure.title.clone().unwrap_or_default(),
        x_label: "t Γ".into(),
        y_label: "C(t)".into(),
        x_range: (0.0, cfg.run.t_max),
        y_range: (0.0, 1.0),
        series,
    };
    Ok((table, chart))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn common(overrides: &[&str]) -> CommonArgs {
        CommonArgs {
            overrides: overrides.iter().map(|s| s.to_string()).collect(),
            ..CommonArgs::default()
        }
    }

    #[test]
    fn mu1_for_r_inverts_pair_weight() {
        let cfg = load_config(&common(&[]), Some("fig3a")).unwrap();
        for r in [0.2, 0.3, 0.45] {
            let mu = mu1_for_r(&cfg, r).unwrap();
            assert!((2.0 * mu / (4.0 * mu * mu + 1.0) - r).abs() < 1e-12);
        }
        assert!(mu1_for_r(&cfg, 0.6).is_err());
        let cfg = load_config(&common(&[]), Some("fig5a")).unwrap();
        for r in [0.25, 0.45] {
            let mu = mu1_for_r(&cfg, r).unwrap();
            assert!((2.0 * mu * 0.875 / (1.0 + 3.0 * mu * mu) - r).abs() < 1e-12);
        }
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn overrides_beat_presets() {
        let cfg = load_config(&common(&["run.t_max=3"]), Some("fig3a")).unwrap();
        assert_eq!(cfg.run.t_max, 3.0);
        let err = load_config(&common(&["bogus.key=1"]), None).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CONFIG);
        assert!(err.to_string().contains("bogus.key"));
    }

    #[test]
    fn scenario_carries_cross_rate() {
        let cfg = load_config(&common(&["control.mu1=0.3"]), None).unwrap();
        assert_eq!(scenario(&cfg).gamma12, None);
        let cfg = load_config(&common(&["model.channel=mixed", "model.gamma12=0.5"]), None).unwrap();
        assert_eq!(scenario(&cfg).gamma12, Some(0.5));
    }
}
