//! Master-equation time evolution and stationary states.

use crate::error::{Error, Result};
use crate::physmodel::{build_hamiltonian, ChannelKind, ChannelSpec, ControlParams};
use crate::qmat::{
    idx, lowering, omega_basis, raising, CoherenceVector, ComplexMat4,
    DensityMatrix, C64,
};
use std::f64::consts::SQRT_2;

/// Hamiltonian plus decoherence channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub hamiltonian: ComplexMat4,
    pub channel: ChannelSpec,
}

impl ModelSpec {
    /// Effective Hamiltonian for `ctrl`, including the channel's dipole shift.
    pub fn new(ctrl: &ControlParams, channel: ChannelSpec) -> Self {
        ModelSpec {
            hamiltonian: build_hamiltonian(ctrl, channel.eta0()),
            channel,
        }
    }

    pub fn from_parts(hamiltonian: ComplexMat4, channel: ChannelSpec) -> Result<Self> {
        if !hamiltonian.is_hermitian(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "Hamiltonian not Hermitian (defect {:.3e})",
                hamiltonian.hermiticity_defect()
            )));
        }
        Ok(ModelSpec {
            hamiltonian,
            channel,
        })
    }

    /// Largest rate in the model: Γ or the largest absolute row sum of H.
    pub fn effective_rate(&self) -> f64 {
        let h = (0..4)
            .map(|i| self.hamiltonian.0[i].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0_f64, f64::max);
        h.max(self.channel.gamma())
    }

    /// Default fixed RK4 step.
    pub fn default_step(&self) -> f64 {
        let rate = self.effective_rate();
        if rate > 0.0 {
            0.01 / rate
        } else {
            0.01
        }
    }

    fn rates(&self) -> [[f64; 2]; 2] {
        let g = self.channel.gamma();
        let g12 = self.channel.gamma12();
        [[g, g12], [g12, g]]
    }
}

/// `dρ/dt` applied to an arbitrary matrix (the generator is linear).
pub fn lindblad_apply(model: &ModelSpec, rho: &ComplexMat4) -> ComplexMat4 {
    let h = model.hamiltonian;
    let rho = *rho;
    let mut out = (h * rho - rho * h) * C64::new(0.0, -1.0);
    let rates = model.rates();
    for i in 0..2 {
        for j in 0..2 {
            let g = rates[i][j];
            if g == 0.0 {
                continue;
            }
            let lower = lowering(i + 1);
            let raise = raising(j + 1);
            let jump = lower * rho * raise;
            let anti = (raise * lower).anticommutator(&rho);
            out += (jump - anti.scale_re(0.5)).scale_re(g);
        }
    }
    out
}

/// `dρ/dt` for a density matrix. The result is traceless and Hermitian.
pub fn lindblad_rhs(model: &ModelSpec, rho: &DensityMatrix) -> ComplexMat4 {
    lindblad_apply(model, rho.mat())
}

/// The generator as a 16×16 matrix on row-major vectorized ρ.
#[derive(Clone, Debug)]
struct Superoperator {
    l: [[C64; 16]; 16],
}

impl Superoperator {
    fn new(model: &ModelSpec) -> Self {
        let mut l = [[C64::new(0.0, 0.0); 16]; 16];
        for col in 0..16 {
            let unit = ComplexMat4::unit(col / 4, col % 4, C64::new(1.0, 0.0));
            let image = lindblad_apply(model, &unit).to_row_major();
            for (row, v) in image.iter().enumerate() {
                l[row][col] = *v;
            }
        }
        Superoperator { l }
    }

    fn apply(&self, rho: &ComplexMat4) -> ComplexMat4 {
        let v = rho.to_row_major();
        let mut out = [C64::new(0.0, 0.0); 16];
        for (o, row) in out.iter_mut().zip(self.l.iter()) {
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v.iter()) {
                acc += a * b;
            }
            *o = acc;
        }
        ComplexMat4::from_row_major(&out)
    }
}

trait OdeState: Copy {
    fn axpy(&self, a: f64, x: &Self) -> Self;
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl OdeState for ComplexMat4 {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        *self + x.scale_re(a)
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }
}

impl OdeState for [f64; 15] {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        let mut out = *self;
        for (o, xi) in out.iter_mut().zip(x.iter()) {
            *o += a * xi;
        }
        out
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

fn rk4<S: OdeState>(f: &impl Fn(&S) -> S, y: &S, h: f64) -> S {
    let k1 = f(y);
    let k2 = f(&y.axpy(0.5 * h, &k1));
    let k3 = f(&y.axpy(0.5 * h, &k2));
    let k4 = f(&y.axpy(h, &k3));
    y.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4)
}

/// Integrator step selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepControl {
    /// Classic RK4. `dt = None` uses [`ModelSpec::default_step`]; the step is
    /// shrunk so that it divides each sampling interval.
    Fixed { dt: Option<f64> },
    /// RK4 step doubling with local error tolerance `tol` (max-abs norm).
    Adaptive { tol: f64 },
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl::Fixed { dt: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagateSettings {
    pub step: StepControl,
    /// Number of equal sampling intervals on `[0, t_max]`.
    pub samples: usize,
}

impl Default for PropagateSettings {
    fn default() -> Self {
        PropagateSettings {
            step: StepControl::default(),
            samples: 400,
        }
    }
}

impl PropagateSettings {
    pub fn fixed(dt: Option<f64>, samples: usize) -> Self {
        PropagateSettings {
            step: StepControl::Fixed { dt },
            samples,
        }
    }
}

/// Integrator settings actually used for a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryMeta {
    pub method: &'static str,
    /// Fixed step, or the initial step in adaptive mode.
    pub dt: f64,
    pub steps: usize,
    pub rejected: usize,
    pub t_max: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Largest tolerated trace drift before a sample is rejected.
pub const TRACE_DRIFT_TOL: f64 = 1e-9;
/// Eigenvalues in `[-POSITIVITY_FLOOR, 0)` are clipped; lower ones are errors.
pub const POSITIVITY_FLOOR: f64 = 1e-8;

fn validate_sample(mat: &ComplexMat4) -> Result<DensityMatrix> {
    let drift = (mat.trace() - C64::new(1.0, 0.0)).norm();
    if drift > TRACE_DRIFT_TOL {
        return Err(Error::TraceDrift { drift });
    }
    DensityMatrix::clip_to_psd(mat, POSITIVITY_FLOOR)
}

/// Runs RK4 over equal sampling intervals, calling `on_sample` at each
/// sampling time including t = 0.
fn integrate<S: OdeState>(
    f: impl Fn(&S) -> S,
    y0: S,
    t_max: f64,
    default_dt: f64,
    settings: &PropagateSettings,
    mut on_sample: impl FnMut(f64, &S) -> Result<()>,
) -> Result<TrajectoryMeta> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidParameter(format!("t_max must be > 0, got {t_max}")));
    }
    let n = settings.samples.max(1);
    let interval = t_max / n as f64;
    let mut y = y0;
    on_sample(0.0, &y)?;
    let mut steps = 0;
    let mut rejected = 0;
    match settings.step {
        StepControl::Fixed { dt } => {
            let h_max = dt.unwrap_or(default_dt);
            if !(h_max > 0.0) {
                return Err(Error::InvalidParameter(format!("dt must be > 0, got {h_max}")));
            }
            let sub = (interval / h_max).ceil().max(1.0) as usize;
            let h = interval / sub as f64;
            for k in 1..=n {
                for _ in 0..sub {
                    y = rk4(&f, &y, h);
                }
                steps += sub;
                on_sample(k as f64 * interval, &y)?;
            }
            Ok(TrajectoryMeta {
                method: "rk4",
                dt: h,
                steps,
                rejected,
                t_max,
            })
        }
        StepControl::Adaptive { tol } => {
            if !(tol > 0.0) {
                return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
            }
            let h0 = default_dt.min(interval);
            let mut h = h0;
            let mut t = 0.0;
            for k in 1..=n {
                let target = k as f64 * interval;
                while target - t > 1e-12 * target {
                    let step = h.min(target - t);
                    if step < 1e-14 * t.max(1.0) {
                        return Err(Error::StepUnderflow { t });
                    }
                    let full = rk4(&f, &y, step);
                    let half = rk4(&f, &rk4(&f, &y, 0.5 * step), 0.5 * step);
                    let err = half.max_abs_diff(&full) / 15.0;
                    let factor = if err == 0.0 {
                        4.0
                    } else {
                        (0.9 * (tol / err).powf(0.2)).clamp(0.1, 4.0)
                    };
                    if err <= tol {
                        // Richardson extrapolation of the two estimates.
                        y = half.axpy(1.0 / 15.0, &half.axpy(-1.0, &full));
                        t += step;
                        steps += 1;
                        h = step.max(h) * factor.min(4.0);
                    } else {
                        rejected += 1;
                        h = step * factor;
                    }
                }
                t = target;
                on_sample(target, &y)?;
            }
            Ok(TrajectoryMeta {
                method: "rk4-adaptive",
                dt: h0,
                steps,
                rejected,
                t_max,
            })
        }
    }
}

/// Integrates the master equation from `rho0` up to `t_max` (units of 1/Γ).
pub fn propagate(
    rho0: &DensityMatrix,
    model: &ModelSpec,
    t_max: f64,
    settings: &PropagateSettings,
) -> Result<Trajectory> {
    let sup = Superoperator::new(model);
    let cap = settings.samples.max(1) + 1;
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap);
    let meta = integrate(
        |r: &ComplexMat4| sup.apply(r),
        *rho0.mat(),
        t_max,
        model.default_step(),
        settings,
        |t, r| {
            times.push(t);
            states.push(validate_sample(r)?);
            Ok(())
        },
    )?;
    Ok(Trajectory {
        times,
        states,
        meta,
    })
}

/// Real affine generator `ṁ = A m + g` in the coherence basis, obtained from
/// `A_ij = tr(Ωᵢ L(Ωⱼ))` and `g_i = tr(Ωᵢ L(I/4))`.
pub fn generator_matrix(model: &ModelSpec) -> ([[f64; 15]; 15], [f64; 15]) {
    let basis = omega_basis();
    let mut a = [[0.0; 15]; 15];
    for (j, omega) in basis.iter().enumerate() {
        let image = lindblad_apply(model, omega);
        for (i, w) in basis.iter().enumerate() {
            a[i][j] = w.trace_product(&image).re;
        }
    }
    let image = lindblad_apply(model, &ComplexMat4::from_real_diag([0.25; 4]));
    let mut g = [0.0; 15];
    for (i, w) in basis.iter().enumerate() {
        g[i] = w.trace_product(&image).re;
    }
    (a, g)
}

/// Coherence-vector form of the master equation for one control setting.
///
/// The pair (`p`) and population (`η`) blocks follow the grouped block
/// equations; the `ε` rows come from [`generator_matrix`].
#[derive(Clone, Debug)]
pub struct CoherenceModel {
    u: [f64; 4],
    gamma: f64,
    gamma12: f64,
    eps_rows: [[f64; 15]; 8],
    eps_offset: [f64; 8],
}

impl CoherenceModel {
    pub fn new(ctrl: &ControlParams, channel: &ChannelSpec) -> Result<Self> {
        if channel.kind() == ChannelKind::Mixed {
            return Err(Error::UnsupportedChannel("mixed"));
        }
        let (a, g) = generator_matrix(&ModelSpec::new(ctrl, *channel));
        let mut eps_rows = [[0.0; 15]; 8];
        let mut eps_offset = [0.0; 8];
        for (k, i) in idx::EPS.enumerate() {
            eps_rows[k] = a[i];
            eps_offset[k] = g[i];
        }
        let flip = ctrl.mu2 * ctrl.phi2.cos() + channel.eta0();
        Ok(CoherenceModel {
            u: [
                2.0 * ctrl.mu1 * ctrl.phi1.cos(),
                2.0 * ctrl.mu1 * ctrl.phi1.sin(),
                2.0 * flip,
                -2.0 * ctrl.mu2 * ctrl.phi2.sin(),
            ],
            gamma: channel.gamma(),
            gamma12: channel.gamma12(),
            eps_rows,
            eps_offset,
        })
    }

    pub fn rhs(&self, m: &[f64; 15]) -> [f64; 15] {
        use idx::*;
        let [u1, u2, u3, u4] = self.u;
        let g = self.gamma;
        let c = self.gamma12;
        let mut d = [0.0; 15];

        d[M14X] = u2 * m[M14Z] - g * m[M14X];
        d[M14Y] = -u1 * m[M14Z] - g * m[M14Y];
        d[M23X] = u4 * m[M23Z] - g * m[M23X] - c * m[M14Z] + SQRT_2 * c * m[MZZ];
        d[M23Y] = -u3 * m[M23Z] - g * m[M23Y];

        d[M14Z] = u1 * m[M14Y] - u2 * m[M14X] - g * m[M14Z] + g / SQRT_2 + c * m[M23X];
        d[M23Z] = u3 * m[M23Y] - u4 * m[M23X] - g * m[M23Z];
        d[MZZ] = SQRT_2 * g * m[M14Z] - 2.0 * g * m[MZZ] + SQRT_2 * c * m[M23X];

        for (k, i) in EPS.enumerate() {
            let row = &self.eps_rows[k];
            d[i] = self.eps_offset[k] + row.iter().zip(m.iter()).map(|(a, b)| a * b).sum::<f64>();
        }
        d
    }
}

/// `dm/dt` in the coherence-vector representation.
pub fn coherence_rhs(
    m: &CoherenceVector,
    ctrl: &ControlParams,
    channel: &ChannelSpec,
) -> Result<CoherenceVector> {
    Ok(CoherenceVector::new(CoherenceModel::new(ctrl, channel)?.rhs(&m.m)))
}

/// Sampled coherence-vector trajectory.
#[derive(Clone, Debug)]
pub struct CoherenceTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CoherenceVector>,
    pub meta: TrajectoryMeta,
}

/// Integrates the coherence-vector equations with the same stepping rules
/// as [`propagate`].
pub fn propagate_coherence(
    m0: &CoherenceVector,
    ctrl: &ControlParams,
    channel: &ChannelSpec,
    t_max: f64,
    settings: &PropagateSettings,
) -> Result<CoherenceTrajectory> {
    let model = CoherenceModel::new(ctrl, channel)?;
    let default_dt = ModelSpec::new(ctrl, *channel).default_step();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let meta = integrate(
        |m: &[f64; 15]| model.rhs(m),
        m0.m,
        t_max,
        default_dt,
        settings,
        |t, m| {
            times.push(t);
            states.push(CoherenceVector::new(*m));
            Ok(())
        },
    )?;
    Ok(CoherenceTrajectory {
        times,
        states,
        meta,
    })
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve_linear<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Result<[f64; N]> {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::SingularGenerator);
    }
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-12 * scale {
            return Err(Error::SingularGenerator);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}

/// Convergence threshold on `‖dρ/dt‖_max` for the collective long-time limit.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Time cap, in units of 1/Γ, for the collective long-time integration.
pub const STATIONARY_T_CAP: f64 = 200.0;

/// Stationary state of the model.
///
/// The collective channel has a family of stationary states, so `rho0` is
/// required there and the state is reached by integration; the other
/// channels have a unique fixed point solved for directly.
pub fn stationary_numeric(model: &ModelSpec, rho0: Option<&DensityMatrix>) -> Result<DensityMatrix> {
    let rho = match model.channel.kind() {
        ChannelKind::Independent | ChannelKind::Mixed => {
            let (a, g) = generator_matrix(model);
            let m = solve_linear(a, g.map(|x| -x))?;
            let mat = crate::qmat::coherence_to_rho(&CoherenceVector::new(m)).into_mat();
            DensityMatrix::clip_to_psd(&mat, POSITIVITY_FLOOR)?
        }
        ChannelKind::Collective => {
            let rho0 = rho0.ok_or_else(|| {
                Error::InvalidParameter(
                    "the collective stationary state depends on the initial state; rho0 is required"
                        .into(),
                )
            })?;
            integrate_to_rest(model, rho0)?
        }
    };
    let residual = lindblad_rhs(model, &rho).max_abs();
    if residual > 1e-9 {
        return Err(Error::NoConvergence(format!(
            "stationary residual {residual:.3e} exceeds 1e-9"
        )));
    }
    Ok(rho)
}

fn integrate_to_rest(model: &ModelSpec, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let sup = Superoperator::new(model);
    let h = model.default_step();
    let gamma = model.channel.gamma();
    let t_cap = STATIONARY_T_CAP / gamma;
    let check_every = ((0.5 / gamma / h).ceil() as usize).max(1);
    let f = |r: &ComplexMat4| sup.apply(r);
    let mut y = *rho0.mat();
    let mut t = 0.0;
    loop {
        let rate = sup.apply(&y).max_abs();
        if rate < STATIONARY_TOL {
            return validate_sample(&y);
        }
        if t > t_cap {
            return Err(Error::NoConvergence(format!(
                "‖dρ/dt‖ = {rate:.3e} after t = {t:.1}/Γ"
            )));
        }
        for _ in 0..check_every {
            y = rk4(&f, &y, h);
        }
        t += check_every as f64 * h;
    }
}

/// `m` for a matrix known to be Hermitian.
