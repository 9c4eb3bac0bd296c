//! Entanglement measures and closed-form stationary states.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use crate::error::{Error, Result};
use crate::qmat::{eig4, idx, rho_to_coherence, tensor2, ComplexMat4, DensityMatrix, Mat2, C64};

/// Two-atom state whose only coherences are `w = ρ₁₄` and `z = ρ₂₃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XState {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub w: C64,
    pub z: C64,
}

/// Largest off-X entry tolerated by [`XState::from_matrix`].
pub const X_SHAPE_TOL: f64 = 1e-12;

impl XState {
    pub fn new(a: f64, b: f64, c: f64, d: f64, w: C64, z: C64) -> Result<Self> {
        let x = XState { a, b, c, d, w, z };
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        let sum = self.a + self.b + self.c + self.d;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("populations sum to {sum}")));
        }
        if [self.a, self.b, self.c, self.d].iter().any(|&p| p < -1e-10) {
            return Err(Error::InvalidState("negative population".into()));
        }
        if self.w.norm_sqr() > self.a * self.d + 1e-10 || self.z.norm_sqr() > self.b * self.c + 1e-10 {
            return Err(Error::InvalidState("X-state coherence exceeds positivity bound".into()));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> ComplexMat4 {
        let mut m = ComplexMat4::from_real_diag([self.a, self.b, self.c, self.d]);
        m.0[0][3] = self.w;
        m.0[3][0] = self.w.conj();
        m.0[1][2] = self.z;
        m.0[2][1] = self.z.conj();
        m
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(self.to_matrix())
    }

    /// Reads the X entries of `rho`; `None` if any other entry exceeds
    /// [`X_SHAPE_TOL`].
    pub fn from_matrix(rho: &ComplexMat4) -> Option<Self> {
        const OFF: [(usize, usize); 8] = [
            (0, 1),
            (0, 2),
            (1, 0),
            (2, 0),
            (1, 3),
            (2, 3),
            (3, 1),
            (3, 2),
        ];
        if OFF.iter().any(|&(i, j)| rho.0[i][j].norm() > X_SHAPE_TOL) {
            return None;
        }
        let m = &rho.0;
        Some(XState {
            a: m[0][0].re,
            b: m[1][1].re,
            c: m[2][2].re,
            d: m[3][3].re,
            w: m[0][3],
            z: m[1][2],
        })
    }
}

fn spin_flip() -> ComplexMat4 {
    tensor2(&Mat2::sigma_y(), &Mat2::sigma_y())
}

/// Eigenvalues of `ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y)` between these are floored to 0.
pub const SPECTRUM_FLOOR: f64 = 1e-8;

/// Wootters concurrence.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let r = spin_flip();
    let m = *rho.mat() * r * rho.mat().conj() * r;
    let ev = eig4(&m)?;
    let mut lam = [0.0; 4];
    for (l, e) in lam.iter_mut().zip(ev.iter()) {
        if e.re < -SPECTRUM_FLOOR {
            return Err(Error::NegativeSpectrum(e.re));
        }
        *l = e.re.max(0.0).sqrt();
    }
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

/// Concurrence via the closed form when `rho` is X-shaped, else [`concurrence`].
pub fn state_concurrence(rho: &DensityMatrix) -> Result<f64> {
    match XState::from_matrix(rho.mat()) {
        Some(x) => Ok(concurrence_x(&x)),
        None => concurrence(rho),
    }
}

/// Closed-form concurrence of an X-state.
pub fn concurrence_x(x: &XState) -> f64 {
    let c1 = x.w.norm() - (x.b * x.c).max(0.0).sqrt();
    let c2 = x.z.norm() - (x.a * x.d).max(0.0).sqrt();
    (2.0 * c1.max(c2).max(0.0)).min(1.0)
}

/// The collective-channel weight `κ = ½(m_zz + √2 m₂₃ˣ) + ¾`.
///
/// κ is conserved under collective decay; `1 − κ` is the singlet population.
pub fn kappa_of(rho: &DensityMatrix) -> Result<f64> {
    let m = rho_to_coherence(rho)?;
    Ok(0.5 * (m[idx::MZZ] + SQRT_2 * m[idx::M23X]) + 0.75)
}

/// `tr(ρσ)`. Not the Uhlmann fidelity.
pub fn fidelity(rho: &DensityMatrix, target: &DensityMatrix) -> f64 {
    rho.mat().trace_product(target.mat()).re
}

fn corner_phase(phi1: f64) -> C64 {
    C64::from_polar(1.0, -(phi1 - FRAC_PI_2))
}

/// Maximally entangled pair state `½(|00⟩⟨00| + |11⟩⟨11|)` with corner
/// coherence `½e^{−i(φ₁−π/2)}`.
pub fn rho_m(phi1: f64) -> DensityMatrix {
    XState {
        a: 0.5,
        b: 0.0,
        c: 0.0,
        d: 0.5,
        w: corner_phase(phi1) * 0.5,
        z: C64::new(0.0, 0.0),
    }
    .to_density()
}

/// Singlet `(|01⟩ − |10⟩)/√2`, dark under collective decay.
pub fn rho_tilde_m() -> DensityMatrix {
    XState {
        a: 0.0,
        b: 0.5,
        c: 0.5,
        d: 0.0,
        w: C64::new(0.0, 0.0),
        z: C64::new(-0.5, 0.0),
    }
    .to_density()
}

/// Named weights of a convex decomposition.
pub type Weights = Vec<(String, f64)>;

#[derive(Clone, Debug)]
pub struct StationaryReport {
    pub state: DensityMatrix,
    pub weights: Weights,
    /// `2|ρ₁₄|`, the weight of the pair Bell state in the corner block.
    pub r: f64,
    pub beta: Option<f64>,
    pub concurrence: f64,
    pub fidelity_to_rho_m: f64,
    pub kappa: Option<f64>,
}

impl StationaryReport {
    pub fn weight(&self, name: &str) -> Option<f64> {
        self.weights.iter().find(|(n, _)| n == name).map(|(_, w)| *w)
    }
}

/// Summary measures of an arbitrary state, with `ρ_m(φ₁)` as fidelity target.
pub fn report_from_state(state: DensityMatrix, phi1: f64, kappa: Option<f64>) -> Result<StationaryReport> {
    let concurrence = state_concurrence(&state)?;
    Ok(StationaryReport {
        r: 2.0 * state.mat().0[0][3].norm(),
        fidelity_to_rho_m: fidelity(&state, &rho_m(phi1)),
        concurrence,
        weights: Vec::new(),
        beta: None,
        kappa,
        state,
    })
}

fn check_rates(mu1: f64, gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidRates(format!("gamma must be > 0, got {gamma}")));
    }
    if !(mu1 >= 0.0) || !mu1.is_finite() {
        return Err(Error::InvalidParameter(format!("mu1 must be >= 0, got {mu1}")));
    }
    Ok(())
}

/// Phase-diffusion strengths of the two atoms' positions.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DephasingNoise {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl DephasingNoise {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(gamma1 >= 0.0) || !(gamma2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dephasing strengths must be >= 0, got {gamma1}, {gamma2}"
            )));
        }
        Ok(DephasingNoise { gamma1, gamma2 })
    }

    /// Both atoms with the same strength.
    pub fn symmetric(gamma: f64) -> Result<Self> {
        Self::new(gamma, gamma)
    }

    /// Average damping `e^{−(γ₁+γ₂)}` of the corner coherence.
    pub fn damping(&self) -> f64 {
        (-(self.gamma1 + self.gamma2)).exp()
    }
}

/// `(r, β)` of the independent-channel stationary state.
pub fn independent_r_beta(mu1: f64, gamma: f64) -> (f64, f64) {
    let den = 4.0 * mu1 * mu1 + gamma * gamma;
    (2.0 * mu1 * gamma / den, mu1 * mu1 / den)
}

/// Closed-form stationary concurrence for the independent channel.
pub fn independent_concurrence(mu1: f64, gamma: f64) -> f64 {
    (2.0 * mu1 * (gamma - mu1) / (4.0 * mu1 * mu1 + gamma * gamma)).max(0.0)
}

/// Stationary state for independent decay, averaged over position noise.
pub fn dephased_stationary(
    mu1: f64,
    gamma: f64,
    phi1: f64,
    noise: &DephasingNoise,
) -> Result<StationaryReport> {
    check_rates(mu1, gamma)?;
    let (r, beta) = independent_r_beta(mu1, gamma);
    let x = XState {
        a: 1.0 - 3.0 * beta,
        b: beta,
        c: beta,
        d: beta,
        w: corner_phase(phi1) * (0.5 * r * noise.damping()),
        z: C64::new(0.0, 0.0),
    };
    let state = x.to_density();
    Ok(StationaryReport {
        weights: vec![
            ("pair_block".into(), 1.0 - 2.0 * beta),
            ("ket01".into(), beta),
            ("ket10".into(), beta),
        ],
        r,
        beta: Some(beta),
        concurrence: concurrence_x(&x),
        fidelity_to_rho_m: fidelity(&state, &rho_m(phi1)),
        kappa: None,
        state,
    })
}

/// Stationary state for independent decay.
///
/// An X-state with populations `(1−3β, β, β, β)` and corner coherence
/// `(r/2)e^{−i(φ₁−π/2)}`, `r = 2μ₁Γ/(4μ₁²+Γ²)`, `β = μ₁²/(4μ₁²+Γ²)`.
pub fn stationary_independent(mu1: f64, gamma: f64, phi1: f64) -> Result<StationaryReport> {
    dephased_stationary(mu1, gamma, phi1, &DephasingNoise::default())
}

/// Closed-form `C̄` under dephasing.
pub fn dephased_concurrence(mu1: f64, gamma: f64, noise: &DephasingNoise) -> f64 {
    let den = 4.0 * mu1 * mu1 + gamma * gamma;
    (noise.damping() * 2.0 * mu1 * gamma / den - 2.0 * mu1 * mu1 / den).max(0.0)
}

/// Closed-form `tr(ρ̄∞ρ_m)` under dephasing.
pub fn dephased_fidelity(mu1: f64, gamma: f64, noise: &DephasingNoise) -> f64 {
    let den = 4.0 * mu1 * mu1 + gamma * gamma;
    (noise.damping() * mu1 * gamma - mu1 * mu1) / den + 0.5
}

/// Maximizer over μ₁ of [`dephased_concurrence`] (and of the fidelity).
pub fn dephased_mu1_star(gamma: f64, noise: &DephasingNoise) -> f64 {
    let e = noise.damping();
    gamma * ((1.0 + 4.0 * e * e).sqrt() - 1.0) / (4.0 * e)
}

/// Maximum over μ₁ of [`dephased_concurrence`], `¼(√(4e^{−2(γ₁+γ₂)}+1) − 1)`.
pub fn dephased_concurrence_max(noise: &DephasingNoise) -> f64 {
    let e = noise.damping();
    0.25 * ((4.0 * e * e + 1.0).sqrt() - 1.0)
}

/// Maximum over μ₁ of [`dephased_fidelity`]; always above ½.
pub fn dephased_fidelity_max(noise: &DephasingNoise) -> f64 {
    0.5 * dephased_concurrence_max(noise) + 0.5
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::InvalidKappa(kappa));
    }
    Ok(())
}

/// Stationary state for collective decay with conserved weight κ.
///
/// Decomposes as `(1−κ)ρ̃_m + κρ_c(μ₁)`, where `ρ_c` mixes the symmetric
/// triplet (weight `μ₁²/(Γ²+3μ₁²)`) with an entangled `|00⟩,|11⟩` block.
/// At `μ₁ = 0` this is `(1−κ)ρ̃_m + κ|00⟩⟨00|`.
pub fn stationary_collective(mu1: f64, gamma: f64, phi1: f64, kappa: f64) -> Result<StationaryReport> {
    check_rates(mu1, gamma)?;
    check_kappa(kappa)?;
    let den = gamma * gamma + 3.0 * mu1 * mu1;
    let q = mu1 * mu1 / den;
    let x = XState {
        a: kappa * (gamma * gamma + mu1 * mu1) / den,
        b: 0.5 * (1.0 - kappa) + 0.5 * q * kappa,
        c: 0.5 * (1.0 - kappa) + 0.5 * q * kappa,
        d: kappa * q,
        w: corner_phase(phi1) * (mu1 * gamma * kappa / den),
        z: C64::new(0.5 * (kappa - 1.0 + q * kappa), 0.0),
    };
    let state = x.to_density();
    let weights = if mu1 == 0.0 {
        vec![("rho_tilde_m".into(), 1.0 - kappa), ("ground".into(), kappa)]
    } else {
        vec![
            ("rho_tilde_m".into(), 1.0 - kappa),
            ("triplet".into(), kappa * q),
            ("pair_block".into(), kappa * (1.0 - q)),
        ]
    };
    Ok(StationaryReport {
        weights,
        r: 2.0 * x.w.norm(),
        beta: None,
        concurrence: concurrence_x(&x),
        fidelity_to_rho_m: fidelity(&state, &rho_m(phi1)),
        kappa: Some(kappa),
        state,
    })
}

/// Singlet-side branch `2|ρ₂₃| − 2√(ρ₁₁ρ₄₄)` of the collective stationary
/// concurrence (where `ρ₂₃ ≤ 0`); non-increasing in μ₁.
pub fn collective_f1(mu1: f64, gamma: f64, kappa: f64) -> f64 {
    let den = gamma * gamma + 3.0 * mu1 * mu1;
    1.0 - kappa
        - mu1 * mu1 * kappa / den
        - 2.0 * mu1 * (gamma * gamma + mu1 * mu1).sqrt() * kappa / den
}

/// Pair-side branch of the collective stationary concurrence.
pub fn collective_f2(mu1: f64, gamma: f64, kappa: f64) -> f64 {
    let den = gamma * gamma + 3.0 * mu1 * mu1;
    kappa * (gamma * gamma + 2.0 * mu1 * mu1 + 2.0 * gamma * mu1) / den - 1.0
}

/// `max{F₁, F₂, 0}`.
pub fn collective_concurrence(mu1: f64, gamma: f64, kappa: f64) -> f64 {
    collective_f1(mu1, gamma, kappa)
        .max(collective_f2(mu1, gamma, kappa))
        .max(0.0)
}

/// The alternative weights `s, r, β̃₁, β̃₂` in the three-state form
/// `s·ρ̃_m + r·ρ_m + (1−s−r)·ρ̃_s`, with a flag telling whether they form a
/// valid convex combination of valid states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeStateWeights {
    pub s: f64,
    pub r: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub convex: bool,
}

pub fn three_state_weights(mu1: f64, gamma: f64, kappa: f64) -> Result<ThreeStateWeights> {
    check_rates(mu1, gamma)?;
    check_kappa(kappa)?;
    let g2 = gamma * gamma;
    let m2 = mu1 * mu1;
    let den = g2 + 3.0 * m2;
    let s = 1.0 - 7.0 * kappa / 6.0 + (g2 - 3.0 * m2) * kappa / den;
    let r = 2.0 * gamma * mu1 * kappa / den;
    let beta1 = kappa * g2 / (2.0 * den);
    let beta2 = kappa * (g2 + 2.0 * m2) / (2.0 * den);
    let rest = 1.0 - s - r;
    let diag = [beta1 + beta2, 0.5 - beta2, 0.5 - beta2, beta2 - beta1];
    let tol = 1e-12;
    let convex = [s, r, rest].iter().all(|&v| (-tol..=1.0 + tol).contains(&v))
        && diag.iter().all(|&v| v >= -tol);
    Ok(ThreeStateWeights {
        s,
        r,
        beta1,
        beta2,
        convex,
    })
}
