//! Choosing the pair coupling μ₁, and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{stationary_numeric, ModelSpec};
use crate::entangle::{
    collective_concurrence, dephased_concurrence, dephased_mu1_star, dephased_stationary,
    kappa_of, report_from_state, rho_tilde_m, stationary_collective, DephasingNoise,
    StationaryReport,
};
use crate::error::{Error, Result};
use crate::physmodel::{build_channel, ChannelKind, ControlParams};
use crate::qmat::{ComplexMat4, DensityMatrix};

/// Upper end of the μ₁ search bracket, in units of Γ.
pub const SEARCH_MAX: f64 = 5.0;
/// Absolute μ₁ tolerance of the search, in units of Γ.
pub const SEARCH_TOL: f64 = 1e-8;
/// Tolerance, in units of Γ, for declaring numeric and closed-form optima equal.
pub const AGREEMENT_TOL: f64 = 1e-6;
const SCAN_POINTS: usize = 250;

/// What to maximize.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    /// Independent decay, optionally averaged over position noise.
    Independent { gamma: f64, noise: DephasingNoise },
    /// Collective decay in the sector of conserved weight κ.
    Collective { gamma: f64, kappa: f64 },
}

impl Objective {
    pub fn gamma(&self) -> f64 {
        match *self {
            Objective::Independent { gamma, .. } | Objective::Collective { gamma, .. } => gamma,
        }
    }

    /// Stationary concurrence at `mu1`.
    pub fn value(&self, mu1: f64) -> f64 {
        match *self {
            Objective::Independent { gamma, noise } => dephased_concurrence(mu1, gamma, &noise),
            Objective::Collective { gamma, kappa } => collective_concurrence(mu1, gamma, kappa),
        }
    }

    /// Closed-form maximizer.
    pub fn analytic_mu1(&self) -> f64 {
        match *self {
            Objective::Independent { gamma, noise } => dephased_mu1_star(gamma, &noise),
            Objective::Collective { gamma, kappa } => {
                if kappa >= kappa_threshold() {
                    collective_mu1_star(gamma)
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let gamma = self.gamma();
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidRates(format!("gamma must be > 0, got {gamma}")));
        }
        if let Objective::Collective { kappa, .. } = *self {
            if !(0.0..=1.0).contains(&kappa) {
                return Err(Error::InvalidKappa(kappa));
            }
        }
        Ok(())
    }
}

/// Maximizer Γ/(√5+1) for independent decay without noise.
pub fn independent_mu1_star(gamma: f64) -> f64 {
    gamma / (5f64.sqrt() + 1.0)
}

/// Maximizer 2Γ/(√13+1) of the pair-side branch for collective decay.
pub fn collective_mu1_star(gamma: f64) -> f64 {
    2.0 * gamma / (13f64.sqrt() + 1.0)
}

/// Smallest κ for which control can beat the uncontrolled value 1 − κ.
pub fn kappa_threshold() -> f64 {
    (11.0 - 13f64.sqrt()) / 9.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Optimum {
    pub mu1_star: f64,
    pub value: f64,
    pub analytic_mu1: f64,
    pub agreed: bool,
}

/// Golden-section search for a maximizer of `f` on `[lo, hi]`.
///
/// On ties the left candidate wins, so flat stretches yield their left end.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    if f(lo) >= f(x) {
        lo
    } else {
        x
    }
}

/// Maximizes the stationary concurrence over μ₁ ∈ [0, 5Γ].
///
/// A coarse scan picks the bracket of the global maximum (the collective
/// objective can have a second local maximum at μ₁ = 0), then golden-section
/// search refines it.
pub fn optimize_mu1(objective: &Objective) -> Result<Optimum> {
    objective.validate()?;
    let gamma = objective.gamma();
    let hi = SEARCH_MAX * gamma;
    let step = hi / SCAN_POINTS as f64;
    let f = |mu: f64| objective.value(mu);
    let mut best = 0;
    let mut best_val = f(0.0);
    for k in 1..=SCAN_POINTS {
        let v = f(k as f64 * step);
        if v > best_val {
            best = k;
            best_val = v;
        }
    }
    let lo_b = best.saturating_sub(1) as f64 * step;
    let hi_b = ((best + 1).min(SCAN_POINTS)) as f64 * step;
    let mut mu = golden_section(f, lo_b, hi_b, SEARCH_TOL * gamma);
    if f(0.0) >= f(mu) {
        mu = 0.0;
    }
    let analytic = objective.analytic_mu1();
    Ok(Optimum {
        mu1_star: mu,
        value: f(mu).clamp(0.0, 1.0),
        analytic_mu1: analytic,
        agreed: (mu - analytic).abs() <= AGREEMENT_TOL * gamma,
    })
}

/// The μ₁ range on which controlled collective decay beats the uncontrolled
/// value `1 − κ`; `None` below [`kappa_threshold`].
pub fn improvement_interval(kappa: f64, gamma: f64) -> Result<Option<(f64, f64)>> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::InvalidKappa(kappa));
    }
    if kappa < kappa_threshold() {
        return Ok(None);
    }
    let disc = (-9.0 * kappa * kappa + 22.0 * kappa - 12.0).max(0.0).sqrt();
    let den = 6.0 - 5.0 * kappa;
    Ok(Some((
        gamma * (kappa - disc) / den,
        gamma * (kappa + disc) / den,
    )))
}

/// Swept quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    /// μ₁/Γ.
    Mu1OverGamma,
    /// Conserved weight κ (collective channel).
    Kappa,
    /// Total position dephasing γ₁ + γ₂, split evenly.
    Dephasing,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Mu1OverGamma => "mu1_over_gamma",
            SweepParameter::Kappa => "kappa",
            SweepParameter::Dephasing => "dephasing",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mu1_over_gamma" | "mu1" => Ok(SweepParameter::Mu1OverGamma),
            "kappa" => Ok(SweepParameter::Kappa),
            "dephasing" => Ok(SweepParameter::Dephasing),
            other => Err(Error::InvalidParameter(format!("unknown sweep parameter '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl SweepGrid {
    pub fn new(parameter: SweepParameter, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "sweep values must be finite and strictly ascending".into(),
            ));
        }
        Ok(SweepGrid { parameter, values })
    }

    /// `n` equal steps from `start` to `stop` inclusive.
    pub fn linspace(parameter: SweepParameter, start: f64, stop: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Self::new(parameter, vec![start]);
        }
        let step = (stop - start) / n as f64;
        Self::new(parameter, (0..=n).map(|k| start + k as f64 * step).collect())
    }
}

/// Everything that stays fixed during a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub kind: ChannelKind,
    pub gamma: f64,
    pub gamma12: Option<f64>,
    pub eta0: f64,
    pub ctrl: ControlParams,
    /// Conserved weight for the collective channel; derived from `rho0` when absent.
    pub kappa: Option<f64>,
    pub noise: DephasingNoise,
    pub rho0: Option<DensityMatrix>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            kind: ChannelKind::Independent,
            gamma: 1.0,
            gamma12: None,
            eta0: 0.0,
            ctrl: ControlParams::off(),
            kappa: None,
            noise: DephasingNoise::default(),
            rho0: None,
        }
    }
}

/// `(1−κ)ρ̃_m + κ|00⟩⟨00|`, a state with conserved weight exactly κ.
pub fn singlet_mix(kappa: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::InvalidKappa(kappa));
    }
    Ok(DensityMatrix::new_unchecked(
        rho_tilde_m().mat().scale_re(1.0 - kappa) + DensityMatrix::ground().mat().scale_re(kappa),
    ))
}

/// How stationary states are obtained in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Analytic,
    Numeric,
}

impl FromStr for SweepMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(SweepMode::Analytic),
            "numeric" => Ok(SweepMode::Numeric),
            other => Err(Error::InvalidParameter(format!("unknown sweep mode '{other}'"))),
        }
    }
}

impl Scenario {
    fn with_value(&self, parameter: SweepParameter, value: f64) -> Result<Scenario> {
        let mut s = self.clone();
        match parameter {
            SweepParameter::Mu1OverGamma => s.ctrl.mu1 = value * self.gamma,
            SweepParameter::Kappa => {
                s.kappa = Some(value);
                s.rho0 = None;
            }
            SweepParameter::Dephasing => s.noise = DephasingNoise::symmetric(0.5 * value)?,
        }
        Ok(s)
    }

    /// The conserved weight: explicit, else from `rho0`, else that of the ground state.
    pub fn resolved_kappa(&self) -> Result<f64> {
        match (self.kappa, &self.rho0) {
            (Some(k), _) => Ok(k),
            (None, Some(rho)) => kappa_of(rho),
            (None, None) => Ok(1.0),
        }
    }

    fn initial_state(&self) -> Result<DensityMatrix> {
        match (&self.rho0, self.kappa) {
            (Some(rho), _) if self.kappa.is_none() => Ok(*rho),
            (Some(rho), Some(k)) if (kappa_of(rho)? - k).abs() < 1e-12 => Ok(*rho),
            _ => singlet_mix(self.resolved_kappa()?),
        }
    }

    /// Stationary state and its summary measures.
    pub fn evaluate(&self, mode: SweepMode) -> Result<StationaryReport> {
        let ctrl = ControlParams::new(self.ctrl.mu1, self.ctrl.phi1, self.ctrl.mu2, self.ctrl.phi2)?;
        match mode {
            SweepMode::Analytic => match self.kind {
                ChannelKind::Independent | ChannelKind::Mixed => {
                    dephased_stationary(ctrl.mu1, self.gamma, ctrl.phi1, &self.noise)
                }
                ChannelKind::Collective => {
                    stationary_collective(ctrl.mu1, self.gamma, ctrl.phi1, self.resolved_kappa()?)
                }
            },
            SweepMode::Numeric => {
                let eta0 = (self.kind != ChannelKind::Independent).then_some(self.eta0);
                let channel = build_channel(self.kind, self.gamma, self.gamma12, eta0)?;
                let model = ModelSpec::new(&ctrl, channel);
                let (rho, kappa) = if self.kind == ChannelKind::Collective {
                    let rho0 = self.initial_state()?;
                    (stationary_numeric(&model, Some(&rho0))?, Some(kappa_of(&rho0)?))
                } else {
                    (stationary_numeric(&model, None)?, None)
                };
                report_from_state(dephase_corner(&rho, &self.noise), ctrl.phi1, kappa)
            }
        }
    }
}

/// Position-noise average: the `|00⟩⟨11|` coherence picks up `e^{−(γ₁+γ₂)}`.
pub(crate) fn dephase_corner(rho: &DensityMatrix, noise: &DephasingNoise) -> DensityMatrix {
    let e = noise.damping();
    if e == 1.0 {
        return *rho;
    }
    let mut m: ComplexMat4 = *rho.mat();
    m.0[0][3] *= e;
    m.0[3][0] *= e;
    DensityMatrix::new_unchecked(m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowData {
    pub concurrence: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: Result<RowData>,
}

/// Evaluates the scenario at every grid value, in parallel, rows in grid order.
pub fn sweep(grid: &SweepGrid, scenario: &Scenario, mode: SweepMode) -> Vec<SweepRow> {
    grid.values
        .par_iter()
        .map(|&value| {
            let result = scenario
                .with_value(grid.parameter, value)
                .and_then(|s| s.evaluate(mode))
                .map(|rep| RowData {
                    concurrence: rep.concurrence,
                    fidelity: rep.fidelity_to_rho_m,
                });
            SweepRow { value, result }
        })
        .collect()
}
