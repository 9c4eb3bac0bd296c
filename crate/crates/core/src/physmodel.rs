//! Physical parameters and their reduction to the effective two-atom model.
//!
//! SI-valued inputs are converted here; everything downstream works in units
//! where the single-atom decay rate sets the time scale.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qmat::{ComplexMat4, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub epsilon0: f64,
    pub c: f64,
    pub k_b: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        epsilon0: 8.854_187_812_8e-12,
        c: 299_792_458.0,
        k_b: 1.380_649e-23,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Single cavity mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityParams {
    /// Angular frequency, rad/s.
    pub omega_c: f64,
    /// Mode volume, m³.
    pub volume: f64,
    /// Wave vector, rad/m.
    pub k_vec: Vec3,
    /// Unit polarization vector.
    pub e_pol: Vec3,
    /// Wavelength `2π/|k|`, m.
    pub lambda: f64,
}

impl CavityParams {
    pub fn new(omega_c: f64, volume: f64, k_vec: Vec3, e_pol: Vec3) -> Result<Self> {
        let k = norm(&k_vec);
        if !(k > 0.0) || !(volume > 0.0) || !(omega_c > 0.0) {
            return Err(Error::InvalidParameter(
                "cavity needs positive frequency, volume and |k|".into(),
            ));
        }
        if (norm(&e_pol) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "polarization vector must have unit length".into(),
            ));
        }
        Ok(CavityParams {
            omega_c,
            volume,
            k_vec,
            e_pol,
            lambda: 2.0 * PI / k,
        })
    }
}

/// Two identical atoms in the cavity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomParams {
    /// Transition angular frequency, rad/s.
    pub omega_a: f64,
    /// Transition dipole magnitude, C·m.
    pub mu_dip: f64,
    /// Unit direction of the transition dipole.
    pub mu_dir: Vec3,
    pub r1: Vec3,
    pub r2: Vec3,
    /// Angle between the dipole and `r1 − r2`.
    pub theta: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Trap oscillation angular frequency, rad/s.
    pub trap_omega: f64,
    /// Effective motional temperature, K.
    pub t_eff: f64,
}

impl AtomParams {
    pub fn new(omega_a: f64, mu_dip: f64, mu_dir: Vec3, r1: Vec3, r2: Vec3) -> Result<Self> {
        let r12 = sub(&r1, &r2);
        let d = norm(&r12);
        let m = norm(&mu_dir);
        if d == 0.0 {
            return Err(Error::InvalidParameter("atoms must not coincide".into()));
        }
        if m == 0.0 {
            return Err(Error::InvalidParameter("dipole direction is zero".into()));
        }
        let cos = (dot(&mu_dir, &r12) / (d * m)).clamp(-1.0, 1.0);
        Ok(AtomParams {
            omega_a,
            mu_dip,
            mu_dir: mu_dir.map(|x| x / m),
            r1,
            r2,
            theta: cos.acos(),
            mass: 0.0,
            trap_omega: 0.0,
            t_eff: 0.0,
        })
    }

    /// Sets the motional parameters used by [`estimate_position_dephasing`].
    pub fn with_motion(mut self, mass: f64, trap_omega: f64, t_eff: f64) -> Self {
        self.mass = mass;
        self.trap_omega = trap_omega;
        self.t_eff = t_eff;
        self
    }

    pub fn separation(&self) -> f64 {
        norm(&sub(&self.r1, &self.r2))
    }

    /// Dipole vector `μ·μ̂`.
    pub fn dipole_vec(&self) -> Vec3 {
        self.mu_dir.map(|x| x * self.mu_dip)
    }

    /// `k₀r₁₂` with `k₀ = ω_a/c`.
    pub fn k0_r12(&self, consts: &PhysicalConstants) -> f64 {
        self.omega_a / consts.c * self.separation()
    }
}

/// Effective couplings of the squeezed-field-induced Hamiltonian, in units of Γ.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ControlParams {
    pub mu1: f64,
    pub phi1: f64,
    pub mu2: f64,
    pub phi2: f64,
}

impl ControlParams {
    pub fn new(mu1: f64, phi1: f64, mu2: f64, phi2: f64) -> Result<Self> {
        if !(mu1 >= 0.0) || !(mu2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "couplings must be non-negative (mu1 = {mu1}, mu2 = {mu2})"
            )));
        }
        Ok(ControlParams {
            mu1,
            phi1,
            mu2,
            phi2,
        })
    }

    /// Pair coupling only.
    pub fn pair(mu1: f64, phi1: f64) -> Self {
        ControlParams {
            mu1,
            phi1,
            mu2: 0.0,
            phi2: 0.0,
        }
    }

    pub fn off() -> Self {
        Self::default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Independent,
    Collective,
    Mixed,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Independent => "independent",
            ChannelKind::Collective => "collective",
            ChannelKind::Mixed => "mixed",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "independent" => Ok(ChannelKind::Independent),
            "collective" => Ok(ChannelKind::Collective),
            "mixed" => Ok(ChannelKind::Mixed),
            other => Err(Error::InvalidParameter(format!(
                "unknown channel kind '{other}'"
            ))),
        }
    }
}

/// Decoherence channel: kind plus rates (in units of Γ once normalized).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    kind: ChannelKind,
    gamma: f64,
    gamma12: f64,
    eta0: f64,
}

impl ChannelSpec {
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma12(&self) -> f64 {
        self.gamma12
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    /// No dissipation at all (closed two-atom system).
    pub fn closed() -> Self {
        ChannelSpec {
            kind: ChannelKind::Independent,
            gamma: 0.0,
            gamma12: 0.0,
            eta0: 0.0,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.gamma == 0.0
    }
}

/// Validates channel rates.
///
/// `gamma12` defaults to 0 (independent) or Γ (collective) and is required for
/// the mixed channel; `eta0` defaults to 0.
pub fn build_channel(
    kind: ChannelKind,
    gamma: f64,
    gamma12: Option<f64>,
    eta0: Option<f64>,
) -> Result<ChannelSpec> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidRates(format!("gamma must be > 0, got {gamma}")));
    }
    let eta0 = eta0.unwrap_or(0.0);
    if !eta0.is_finite() {
        return Err(Error::InvalidRates("eta0 must be finite".into()));
    }
    let gamma12 = match kind {
        ChannelKind::Independent => {
            if gamma12.is_some_and(|g| g != 0.0) || eta0 != 0.0 {
                return Err(Error::InvalidRates(
                    "the independent channel has gamma12 = 0 and eta0 = 0".into(),
                ));
            }
            0.0
        }
        ChannelKind::Collective => match gamma12 {
            Some(g) if (g - gamma).abs() > 1e-12 * gamma => {
                return Err(Error::InvalidRates(format!(
                    "the collective channel has gamma12 = gamma, got {g}"
                )));
            }
            _ => gamma,
        },
        ChannelKind::Mixed => match gamma12 {
            Some(g) if g > 0.0 && g < gamma => g,
            Some(g) => {
                return Err(Error::InvalidRates(format!(
                    "the mixed channel needs 0 < gamma12 < gamma, got gamma12 = {g}, gamma = {gamma}"
                )));
            }
            None => {
                return Err(Error::InvalidRates(
                    "the mixed channel requires gamma12".into(),
                ));
            }
        },
    };
    Ok(ChannelSpec {
        kind,
        gamma,
        gamma12,
        eta0,
    })
}

/// Channel rates derived from the atom geometry via `F(k₀r₁₂)` and `η`.
pub fn channel_from_geometry(
    kind: ChannelKind,
    gamma: f64,
    k0_r12: f64,
    theta: f64,
) -> Result<ChannelSpec> {
    match kind {
        ChannelKind::Independent => build_channel(kind, gamma, None, None),
        ChannelKind::Collective => {
            build_channel(kind, gamma, None, Some(dipole_shift(k0_r12, theta, gamma)))
        }
        ChannelKind::Mixed => build_channel(
            kind,
            gamma,
            Some(gamma * collective_factor(k0_r12, theta)),
            Some(dipole_shift(k0_r12, theta, gamma)),
        ),
    }
}

/// A converted value plus any validity warnings raised on the way.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduced<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

/// Atom–mode coupling `ε = μ⃗·ê √(ω_c/(2ε₀V)) e^{ik⃗·r⃗}` (ħ = 1).
pub fn coupling_constant(cav: &CavityParams, position: &Vec3, mu_dip_vec: &Vec3) -> C64 {
    let amp = (cav.omega_c / (2.0 * PhysicalConstants::SI.epsilon0 * cav.volume)).sqrt();
    let proj = dot(mu_dip_vec, &cav.e_pol);
    C64::from_polar(proj * amp, dot(&cav.k_vec, position))
}

fn neg_arg(z: C64) -> f64 {
    if z == C64::new(0.0, 0.0) {
        0.0
    } else {
        let a = -z.arg();
        if a == 0.0 {
            0.0
        } else {
            a
        }
    }
}

/// Effective pair and flip-flop couplings from the dispersive reduction.
///
/// `μ₁e^{−iφ₁} = 2ξε₁ε₂/Δ²`, `μ₂e^{−iφ₂} = ε₁ε₂*/Δ`.
pub fn effective_controls(
    xi: C64,
    delta: f64,
    eps1: C64,
    eps2: C64,
) -> Result<Reduced<ControlParams>> {
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let pair = xi * eps1 * eps2 * (2.0 / (delta * delta));
    let flip = eps1 * eps2.conj() / delta;

    let eps_max = eps1.norm().max(eps2.norm());
    let mut warnings = Vec::new();
    if delta.abs() < 10.0 * eps_max {
        warnings.push(format!(
            "weak-coupling condition violated: |delta| = {:.3e} < 10·max|eps| = {:.3e}",
            delta.abs(),
            10.0 * eps_max
        ));
    }
    if xi.norm() < 10.0 * eps_max {
        warnings.push(format!(
            "weak-coupling condition violated: |xi| = {:.3e} < 10·max|eps| = {:.3e}",
            xi.norm(),
            10.0 * eps_max
        ));
    }
    Ok(Reduced {
        value: ControlParams {
            mu1: pair.norm(),
            phi1: neg_arg(pair),
            mu2: flip.norm(),
            phi2: neg_arg(flip),
        },
        warnings,
    })
}

/// Single-atom spontaneous emission rate `ω³μ²/(3πε₀ħc³)` in s⁻¹.
pub fn spontaneous_rate(atom: &AtomParams, consts: &PhysicalConstants) -> f64 {
    atom.omega_a.powi(3) * atom.mu_dip.powi(2)
        / (3.0 * PI * consts.epsilon0 * consts.hbar * consts.c.powi(3))
}

/// Below this `k₀r₁₂` the collective factor uses its Taylor expansion.
pub const F_SERIES_THRESHOLD: f64 = 1e-4;
/// Below this `k₀r₁₂` the dipole shift uses its near-field limit.
pub const ETA_LIMIT_THRESHOLD: f64 = 1e-3;

/// Collective decay factor `F(k₀r₁₂)`, so that `Γ₁₂ = Γ F`.
pub fn collective_factor(x: f64, theta: f64) -> f64 {
    let cos2 = theta.cos().powi(2);
    let sin2 = 1.0 - cos2;
    let radial = 1.0 - 3.0 * cos2;
    if x < F_SERIES_THRESHOLD {
        let x2 = x * x;
        return 1.5 * (radial * (-1.0 / 3.0 + x2 / 30.0) + sin2 * (1.0 - x2 / 6.0));
    }
    let (s, c) = x.sin_cos();
    1.5 * (radial * (c / (x * x) - s / x.powi(3)) + sin2 * s / x)
}

/// Coherent dipole–dipole shift `η` (same units as `gamma`).
pub fn dipole_shift(x: f64, theta: f64, gamma: f64) -> f64 {
    let cos2 = theta.cos().powi(2);
    let sin2 = 1.0 - cos2;
    let radial = 1.0 - 3.0 * cos2;
    if x < ETA_LIMIT_THRESHOLD {
        return 0.75 * gamma * radial / x.powi(3);
    }
    let (s, c) = x.sin_cos();
    0.75 * gamma * (radial * (s / (x * x) + c / x.powi(3)) - sin2 * c / x)
}

/// Effective two-atom Hamiltonian plus the coherent dipole coupling.
///
/// The pair term carries `μ₁e^{−iφ₁}` on `|00⟩⟨11|`, the flip-flop term
/// `μ₂e^{−iφ₂}` on `|10⟩⟨01|`; `eta_total` adds `η(σ₊⁽¹⁾σ₋⁽²⁾ + h.c.)`.
pub fn build_hamiltonian(ctrl: &ControlParams, eta_total: f64) -> ComplexMat4 {
    let mut h = ComplexMat4::zeros();
    let pair = C64::from_polar(ctrl.mu1, -ctrl.phi1);
    h.0[0][3] = pair;
    h.0[3][0] = pair.conj();
    let flip = C64::from_polar(ctrl.mu2, -ctrl.phi2) + eta_total;
    h.0[2][1] = flip;
    h.0[1][2] = flip.conj();
    h
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositionDephasing {
    /// RMS position fluctuation, m.
    pub delta_r: f64,
    /// Phase-diffusion coefficient at its upper bound `2π²(δr/λ)²`.
    pub gamma: f64,
}

/// Thermal position spread in the trap and the resulting dephasing bound.
pub fn estimate_position_dephasing(
    atom: &AtomParams,
    cav: &CavityParams,
    consts: &PhysicalConstants,
) -> Result<Reduced<PositionDephasing>> {
    if !(atom.mass > 0.0) || !(atom.trap_omega > 0.0) || atom.t_eff < 0.0 {
        return Err(Error::InvalidParameter(
            "position estimate needs mass > 0, trap_omega > 0, t_eff >= 0".into(),
        ));
    }
    let thermal = consts.k_b * atom.t_eff;
    let delta_r = (thermal / (atom.mass * atom.trap_omega.powi(2))).sqrt();
    let ratio = delta_r / cav.lambda;
    let mut warnings = Vec::new();
    let quantum = consts.hbar * atom.trap_omega;
    if quantum > 0.5 * (0.5 * thermal) {
        warnings.push(format!(
            "classical-position regime questionable: hbar*omega = {quantum:.3e} J vs k_B*T/2 = {:.3e} J",
            0.5 * thermal
        ));
    }
    Ok(Reduced {
        value: PositionDephasing {
            delta_r,
            gamma: 2.0 * PI * PI * ratio * ratio,
        },
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn cavity() -> CavityParams {
        let k = TAU / 0.9e-6;
        CavityParams::new(2.1e15, 1e-15, [0.0, 0.0, k], [1.0, 0.0, 0.0]).unwrap()
    }

    fn wrap(a: f64) -> f64 {
        let r = a.rem_euclid(TAU);
        if r > PI {
            r - TAU
        } else {
            r
        }
    }

    #[test]
    fn coupling_is_periodic_and_projected() {
        let cav = cavity();
        let mu = [2.0e-29, 1.0e-29, 0.0];
        let r = [1e-7, 0.0, 3e-7];
        let shifted = [r[0], r[1], r[2] + cav.lambda];
        let a = coupling_constant(&cav, &r, &mu);
        let b = coupling_constant(&cav, &shifted, &mu);
        assert!((a - b).norm() < 1e-9 * a.norm());
        let amp = (cav.omega_c / (2.0 * PhysicalConstants::SI.epsilon0 * cav.volume)).sqrt();
        assert!((a.norm() - 2.0e-29 * amp).abs() < 1e-12 * a.norm());
        let perp = coupling_constant(&cav, &r, &[0.0, 3e-29, 0.0]);
        assert_eq!(perp.norm(), 0.0);
    }

    #[test]
    fn controls_off_without_squeezing() {
        let eps = C64::new(1.0, 0.0);
        let out = effective_controls(C64::new(0.0, 0.0), 50.0, eps, eps).unwrap();
        assert_eq!(out.value.mu1, 0.0);
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn controls_real_inputs() {
        let (xi, eps, delta) = (30.0, 1.5, 40.0);
        let e = C64::new(eps, 0.0);
        let out = effective_controls(C64::new(xi, 0.0), delta, e, e).unwrap();
        assert!(out.warnings.is_empty());
        let c = out.value;
        assert!((c.mu1 - 2.0 * xi * eps * eps / (delta * delta)).abs() < 1e-15);
        assert!((c.mu2 - eps * eps / delta).abs() < 1e-15);
        assert_eq!(c.phi1, 0.0);
        assert_eq!(c.phi2, 0.0);
    }

    #[test]
    fn controls_phase_shift_of_second_coupling() {
        let xi = C64::new(20.0, 5.0);
        let e1 = C64::new(1.0, 0.3);
        let e2 = C64::new(0.7, -0.2);
        let alpha = 0.4;
        let base = effective_controls(xi, 30.0, e1, e2).unwrap().value;
        let rot = effective_controls(xi, 30.0, e1, e2 * C64::from_polar(1.0, alpha))
            .unwrap()
            .value;
        assert!(wrap(rot.phi1 - (base.phi1 - alpha)).abs() < 1e-12);
        assert!(wrap(rot.phi2 - (base.phi2 + alpha)).abs() < 1e-12);
    }

    #[test]
    fn controls_scale_with_xi() {
        let xi = C64::new(12.0, -4.0);
        let e1 = C64::new(0.4, 0.3);
        let e2 = C64::new(0.2, 0.1);
        let a = effective_controls(xi, 10.0, e1, e2).unwrap().value;
        let b = effective_controls(xi * 2.5, 10.0, e1, e2).unwrap().value;
        assert!((b.mu1 - 2.5 * a.mu1).abs() < 1e-14);
        assert!(wrap(b.phi1 - a.phi1).abs() < 1e-14);
    }

    #[test]
    fn zero_detuning_rejected() {
        let e = C64::new(1.0, 0.0);
        assert_eq!(
            effective_controls(e, 0.0, e, e).unwrap_err(),
            Error::ZeroDetuning
        );
    }

    #[test]
    fn weak_coupling_warning() {
        let e = C64::new(1.0, 0.0);
        let out = effective_controls(C64::new(100.0, 0.0), 5.0, e, e).unwrap();
        assert_eq!(out.warnings.len(), 1);
    }

    fn cs_atom() -> AtomParams {
        AtomParams::new(
            TAU * 351.7e12,
            2.69e-29,
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0],
            [1e-5, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn spontaneous_rate_scaling() {
        let c = PhysicalConstants::SI;
        let atom = cs_atom();
        let g = spontaneous_rate(&atom, &c);
        assert!(g > 0.0);
        // Cs D2 line: Γ ≈ 2π × 5.2 MHz.
        assert!((g / (TAU * 5.2e6) - 1.0).abs() < 0.2, "{g}");
        let mut twice_mu = atom;
        twice_mu.mu_dip *= 2.0;
        assert!((spontaneous_rate(&twice_mu, &c) / g - 4.0).abs() < 1e-12);
        let mut twice_w = atom;
        twice_w.omega_a *= 2.0;
        assert!((spontaneous_rate(&twice_w, &c) / g - 8.0).abs() < 1e-12);
    }

    #[test]
    fn theta_from_geometry() {
        let atom = cs_atom();
        assert!((atom.theta - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn collective_factor_limits() {
        for theta in [0.0, 0.3, FRAC_PI_2, 2.0] {
            assert!((collective_factor(1e-6, theta) - 1.0).abs() < 1e-10);
            assert!(collective_factor(1e6, theta).abs() < 1e-5);
        }
        let f = collective_factor(PI, FRAC_PI_2);
        assert!((f + 3.0 / (2.0 * PI * PI)).abs() < 1e-14);
        assert!((f + 0.15198).abs() < 1e-5);
    }

    #[test]
    fn branch_continuity() {
        for theta in [0.0, 0.4, FRAC_PI_2, 2.5] {
            let x = F_SERIES_THRESHOLD;
            let lo = collective_factor(x * (1.0 - 1e-12), theta);
            let hi = collective_factor(x, theta);
            assert!((lo - hi).abs() < 1e-6, "F at theta={theta}: {lo} vs {hi}");
        }
        for theta in [0.0, FRAC_PI_2, 2.5] {
            let x = ETA_LIMIT_THRESHOLD;
            let lo = dipole_shift(x * (1.0 - 1e-12), theta, 1.0);
            let hi = dipole_shift(x, theta, 1.0);
            assert!(((lo - hi) / hi).abs() < 1e-6, "eta at theta={theta}: {lo} vs {hi}");
        }
    }

    #[test]
    fn collective_factor_bounded() {
        let mut worst: f64 = 0.0;
        for i in 1..=2000 {
            let x = i as f64 * 0.01;
            for j in 0..=20 {
                let theta = PI * j as f64 / 20.0;
                worst = worst.max(collective_factor(x, theta).abs());
            }
        }
        assert!(worst <= 1.0 + 1e-12, "max |F| = {worst}");
    }

    #[test]
    fn dipole_shift_limits() {
        let magic = (1.0 / 3.0_f64.sqrt()).acos();
        assert!(dipole_shift(1e-4, magic, 1.0).abs() < 1e-3);
        assert!(dipole_shift(1e7, 0.7, 1.0).abs() < 1e-6);
        let eta = dipole_shift(0.1, 0.0, 1.0);
        assert!((eta / -1500.0 - 1.0).abs() < 0.01, "{eta}");
    }

    #[test]
    fn hamiltonian_structure() {
        assert_eq!(build_hamiltonian(&ControlParams::off(), 0.0), ComplexMat4::zeros());
        let h = build_hamiltonian(&ControlParams::pair(1.0, 0.0), 0.0);
        let mut expect = ComplexMat4::zeros();
        expect.0[0][3] = C64::new(1.0, 0.0);
        expect.0[3][0] = C64::new(1.0, 0.0);
        assert_eq!(h, expect);
    }

    #[test]
    fn hamiltonian_hermitian_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let c = ControlParams::new(
                rng.gen_range(0.0..3.0),
                rng.gen_range(-PI..PI),
                rng.gen_range(0.0..3.0),
                rng.gen_range(-PI..PI),
            )
            .unwrap();
            let h = build_hamiltonian(&c, rng.gen_range(-2.0..2.0));
            assert!(h.is_hermitian(1e-14));
        }
    }

    #[test]
    fn channel_validation() {
        let ind = build_channel(ChannelKind::Independent, 1.0, None, None).unwrap();
        assert_eq!((ind.gamma12(), ind.eta0()), (0.0, 0.0));
        let col = build_channel(ChannelKind::Collective, 1.0, None, Some(0.3)).unwrap();
        assert_eq!(col.gamma12(), 1.0);
        assert_eq!(col.eta0(), 0.3);
        assert!(matches!(
            build_channel(ChannelKind::Mixed, 1.0, Some(1.2), None),
            Err(Error::InvalidRates(_))
        ));
        assert!(build_channel(ChannelKind::Mixed, 1.0, None, None).is_err());
        assert!(build_channel(ChannelKind::Independent, 1.0, Some(0.5), None).is_err());
        assert!(build_channel(ChannelKind::Independent, 0.0, None, None).is_err());
        assert!(build_channel(ChannelKind::Collective, 1.0, Some(0.5), None).is_err());
    }

    #[test]
    fn cs_position_fluctuation() {
        let cav = cavity();
        let atom = cs_atom().with_motion(2.2e-25, 3.3e6, 1.3e-4);
        let out = estimate_position_dephasing(&atom, &cav, &PhysicalConstants::SI).unwrap();
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
        let d = out.value.delta_r;
        assert!((d / 2.7e-8 - 1.0).abs() < 0.02, "{d}");
        assert!((d / cav.lambda - 0.03).abs() < 0.001);
        let expect = 2.0 * PI * PI * (d / cav.lambda).powi(2);
        assert!((out.value.gamma - expect).abs() < 1e-15);
    }

    #[test]
    fn cold_atom_has_no_fluctuation() {
        let cav = cavity();
        let atom = cs_atom().with_motion(2.2e-25, 3.3e6, 0.0);
        let out = estimate_position_dephasing(&atom, &cav, &PhysicalConstants::SI).unwrap();
        assert_eq!(out.value.delta_r, 0.0);
        assert_eq!(out.value.gamma, 0.0);
    }

    #[test]
    fn geometry_channels() {
        let far = channel_from_geometry(ChannelKind::Mixed, 1.0, 2.0, FRAC_PI_2).unwrap();
        assert!(far.gamma12() > 0.0 && far.gamma12() < 1.0);
        let near = channel_from_geometry(ChannelKind::Collective, 1.0, 0.05, 0.0).unwrap();
        assert_eq!(near.gamma12(), 1.0);
        assert!(near.eta0() < 0.0);
    }
}
