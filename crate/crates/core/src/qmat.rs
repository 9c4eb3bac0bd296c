//! Two-atom operator algebra.
//!
//! Everything lives on the fixed four-dimensional space of two two-level
//! atoms. Single-atom basis order is (ground, excited) and atom 1 is the left
//! Kronecker factor, so the two-atom basis reads `|00⟩, |01⟩, |10⟩, |11⟩`
//! with `|00⟩` the two-atom ground state.
//!
//! The coherence-vector picture expands a density matrix as
//! `ρ = I/4 + Σ mᵢ Ωᵢ` over the fifteen traceless Hermitian matrices returned
//! by [`omega_basis`].

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Largest imaginary residue accepted when extracting coherence components.
pub const COHERENCE_IMAG_TOL: f64 = 1e-9;

/// A 2×2 complex matrix (single-atom operator).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(entries: [[C64; 2]; 2]) -> Self {
        Mat2(entries)
    }

    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        Mat2([[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]])
    }

    /// `diag(1, −1)` in (ground, excited) order.
    pub fn sigma_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// Lowering operator `|g⟩⟨e|`.
    pub fn sigma_minus() -> Self {
        Mat2([[ZERO, ONE], [ZERO, ZERO]])
    }

    /// Raising operator `|e⟩⟨g|`.
    pub fn sigma_plus() -> Self {
        Mat2([[ZERO, ZERO], [ONE, ZERO]])
    }
}

/// A dense 4×4 complex matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMat4(pub [[C64; 4]; 4]);

impl fmt::Debug for ComplexMat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMat4[")?;
        for row in &self.0 {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Default for ComplexMat4 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl ComplexMat4 {
    pub const fn zeros() -> Self {
        ComplexMat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::from_diag([ONE; 4])
    }

    pub fn from_diag(d: [C64; 4]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn from_real_diag(d: [f64; 4]) -> Self {
        Self::from_diag(d.map(|x| C64::new(x, 0.0)))
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        ComplexMat4(rows.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64; 4], b: &[C64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = a[i] * b[j].conj();
            }
        }
        m
    }

    /// Matrix unit `|i⟩⟨j|` scaled by `v`.
    pub fn unit(i: usize, j: usize, v: C64) -> Self {
        let mut m = Self::zeros();
        m.0[i][j] = v;
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    /// Entry-wise complex conjugate (not the adjoint).
    pub fn conj(&self) -> Self {
        ComplexMat4(self.0.map(|r| r.map(|z| z.conj())))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMat4(self.0.map(|r| r.map(|z| z * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        ComplexMat4(self.0.map(|r| r.map(|z| z * s)))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Hilbert–Schmidt inner product `tr(A†B)`.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += self.0[i][j].conj() * other.0[i][j];
            }
        }
        acc
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for i in 0..4 {
            for k in 0..4 {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// Row-major flattening.
    pub fn to_row_major(&self) -> [C64; 16] {
        let mut out = [ZERO; 16];
        for i in 0..4 {
            for j in 0..4 {
                out[4 * i + j] = self.0[i][j];
            }
        }
        out
    }

    pub fn from_row_major(v: &[C64; 16]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = v[4 * i + j];
            }
        }
        m
    }
}

impl Index<(usize, usize)> for ComplexMat4 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMat4 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for ComplexMat4 {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for ComplexMat4 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Neg for ComplexMat4 {
    type Output = Self;
    fn neg(self) -> Self {
        ComplexMat4(self.0.map(|r| r.map(|z| -z)))
    }
}

impl Mul for ComplexMat4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl Mul<C64> for ComplexMat4 {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<f64> for ComplexMat4 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale_re(rhs)
    }
}

/// Kronecker product with `a` acting on atom 1.
pub fn tensor2(a: &Mat2, b: &Mat2) -> ComplexMat4 {
    let mut m = ComplexMat4::zeros();
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i2 in 0..2 {
                for j2 in 0..2 {
                    m.0[2 * i1 + i2][2 * j1 + j2] = a.0[i1][j1] * b.0[i2][j2];
                }
            }
        }
    }
    m
}

/// `σ₋` acting on atom `atom` (1 or 2).
pub fn lowering(atom: usize) -> ComplexMat4 {
    match atom {
        1 => tensor2(&Mat2::sigma_minus(), &Mat2::identity()),
        2 => tensor2(&Mat2::identity(), &Mat2::sigma_minus()),
        _ => panic!("atom index must be 1 or 2, got {atom}"),
    }
}

/// `σ₊` acting on atom `atom` (1 or 2).
pub fn raising(atom: usize) -> ComplexMat4 {
    lowering(atom).adjoint()
}

/// Indices of the coherence-vector components.
pub mod idx {
    pub const M14X: usize = 0;
    pub const M14Y: usize = 1;
    pub const M23X: usize = 2;
    pub const M23Y: usize = 3;
    pub const MX0: usize = 4;
    pub const MY0: usize = 5;
    pub const M0X: usize = 6;
    pub const M0Y: usize = 7;
    pub const MXZ: usize = 8;
    pub const MZX: usize = 9;
    pub const MYZ: usize = 10;
    pub const MZY: usize = 11;
    pub const M14Z: usize = 12;
    pub const M23Z: usize = 13;
    pub const MZZ: usize = 14;

    /// `mᵖ` block.
    pub const P: std::ops::Range<usize> = 0..4;
    /// `m^ε` block.
    pub const EPS: std::ops::Range<usize> = 4..12;
    /// `m^η` block.
    pub const ETA: std::ops::Range<usize> = 12..15;

    pub const NAMES: [&str; 15] = [
        "m14x", "m14y", "m23x", "m23y", "mx0", "my0", "m0x", "m0y", "mxz", "mzx", "myz",
        "mzy", "m14z", "m23z", "mzz",
    ];
}

fn build_omega_basis() -> [ComplexMat4; 15] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x * s, 0.0);
    let im = |x: f64| C64::new(0.0, x * s);
    let half = |a: Mat2, b: Mat2| tensor2(&a, &b).scale_re(0.5);
    let (i2, x, y, z) = (
        Mat2::identity(),
        Mat2::sigma_x(),
        Mat2::sigma_y(),
        Mat2::sigma_z(),
    );

    let o14x = ComplexMat4::unit(0, 3, re(1.0)) + ComplexMat4::unit(3, 0, re(1.0));
    let o14y = ComplexMat4::unit(0, 3, im(-1.0)) + ComplexMat4::unit(3, 0, im(1.0));
    let o23x = ComplexMat4::unit(1, 2, re(1.0)) + ComplexMat4::unit(2, 1, re(1.0));
    let o23y = ComplexMat4::unit(1, 2, im(-1.0)) + ComplexMat4::unit(2, 1, im(1.0));
    let o14z = ComplexMat4::from_real_diag([s, 0.0, 0.0, -s]);
    let o23z = ComplexMat4::from_real_diag([0.0, s, -s, 0.0]);

    [
        o14x,
        o14y,
        o23x,
        o23y,
        half(x, i2),
        half(y, i2),
        half(i2, x),
        half(i2, y),
        half(x, z),
        half(z, x),
        half(y, z),
        half(z, y),
        o14z,
        o23z,
        half(z, z),
    ]
}

/// The fifteen traceless orthonormal basis matrices, in coherence-vector order.
pub fn omega_basis() -> &'static [ComplexMat4; 15] {
    static BASIS: OnceLock<[ComplexMat4; 15]> = OnceLock::new();
    BASIS.get_or_init(build_omega_basis)
}

/// A validated two-atom density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMat4,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: ComplexMat4) -> Result<Self> {
        let herm = mat.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {:.15} + {:.3e}i is not 1",
                tr.re, tr.im
            )));
        }
        let min = eigh4(&mat.hermitian_part())?.values[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(DensityMatrix { mat })
    }

    /// Wraps a matrix without validation. Callers own the invariants.
    pub fn new_unchecked(mat: ComplexMat4) -> Self {
        DensityMatrix { mat }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn from_pure(psi: [C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi = psi.map(|z| z / norm);
        Ok(DensityMatrix {
            mat: ComplexMat4::outer(&psi, &psi),
        })
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            mat: ComplexMat4::from_real_diag([0.25; 4]),
        }
    }

    /// `|00⟩⟨00|`.
    pub fn ground() -> Self {
        DensityMatrix {
            mat: ComplexMat4::from_real_diag([1.0, 0.0, 0.0, 0.0]),
        }
    }

    pub fn mat(&self) -> &ComplexMat4 {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMat4 {
        self.mat
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).re
    }

    /// Diagonal populations `(p00, p01, p10, p11)`.
    pub fn populations(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.mat.0[i][i].re)
    }

    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        Ok(eigh4(&self.mat.hermitian_part())?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Floors eigenvalues in `[-floor, 0)` to zero and renormalizes the trace.
    ///
    /// Fails with [`Error::PositivityLoss`] if an eigenvalue lies below `-floor`.
    pub fn clip_to_psd(mat: &ComplexMat4, floor: f64) -> Result<Self> {
        let herm = mat.hermitian_part();
        let eig = eigh4(&herm)?;
        if eig.values[0] < -floor {
            return Err(Error::PositivityLoss {
                min_eigenvalue: eig.values[0],
            });
        }
        if eig.values[0] >= 0.0 {
            let tr = herm.trace().re;
            return Ok(DensityMatrix {
                mat: herm.scale_re(1.0 / tr),
            });
        }
        let clipped = eig.values.map(|v| v.max(0.0));
        let total: f64 = clipped.iter().sum();
        let mut out = ComplexMat4::zeros();
        for (k, &lam) in clipped.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            let v = eig.vector(k);
            out += ComplexMat4::outer(&v, &v).scale_re(lam / total);
        }
        Ok(DensityMatrix { mat: out })
    }
}

/// Coherence vector `mᵢ = tr(Ωᵢρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CoherenceVector {
    pub m: [f64; 15],
}

impl CoherenceVector {
    pub fn new(m: [f64; 15]) -> Self {
        CoherenceVector { m }
    }

    pub fn zero() -> Self {
        CoherenceVector { m: [0.0; 15] }
    }

    pub fn norm(&self) -> f64 {
        self.m.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn p(&self) -> &[f64] {
        &self.m[idx::P]
    }

    pub fn eps(&self) -> &[f64] {
        &self.m[idx::EPS]
    }

    pub fn eta(&self) -> &[f64] {
        &self.m[idx::ETA]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl Index<usize> for CoherenceVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.m[i]
    }
}

impl IndexMut<usize> for CoherenceVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.m[i]
    }
}

/// `tr(Ωᵢ A)` for all basis elements; `A` must be Hermitian up to the
/// imaginary residue tolerance.
pub fn coherence_components(a: &ComplexMat4) -> Result<[f64; 15]> {
    let mut out = [0.0; 15];
    for (o, omega) in out.iter_mut().zip(omega_basis().iter()) {
        let v = omega.trace_product(a);
        if v.im.abs() > COHERENCE_IMAG_TOL {
            return Err(Error::NonHermitianInput { residue: v.im });
        }
        *o = v.re;
    }
    Ok(out)
}

pub fn rho_to_coherence(rho: &DensityMatrix) -> Result<CoherenceVector> {
    coherence_components(rho.mat()).map(CoherenceVector::new)
}

/// `Σ mᵢΩᵢ` (traceless part only).
pub fn coherence_to_traceless(m: &CoherenceVector) -> ComplexMat4 {
    let mut out = ComplexMat4::zeros();
    for (mi, omega) in m.m.iter().zip(omega_basis().iter()) {
        if *mi != 0.0 {
            out += omega.scale_re(*mi);
        }
    }
    out
}

/// `I/4 + Σ mᵢΩᵢ`. Positivity is not checked.
pub fn coherence_to_rho(m: &CoherenceVector) -> DensityMatrix {
    DensityMatrix::new_unchecked(
        ComplexMat4::from_real_diag([0.25; 4]) + coherence_to_traceless(m),
    )
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Copy, Debug)]
pub struct HermitianEigen {
    pub values: [f64; 4],
    /// Eigenvectors as columns.
    pub vectors: ComplexMat4,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> [C64; 4] {
        [0, 1, 2, 3].map(|i| self.vectors.0[i][k])
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
pub fn eigh4(a: &ComplexMat4) -> Result<HermitianEigen> {
    let mut m = a.hermitian_part();
    let mut v = ComplexMat4::identity();
    let scale = m.frobenius().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.0[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            return Ok(sorted_eigen(&m, &v));
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = m.0[p][q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m.0[p][p].re;
                let aqq = m.0[q][q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut u = ComplexMat4::identity();
                u.0[p][p] = C64::new(c, 0.0);
                u.0[p][q] = C64::new(s, 0.0);
                u.0[q][p] = -phase.conj() * s;
                u.0[q][q] = phase.conj() * c;
                m = u.adjoint() * m * u;
                m.0[p][q] = ZERO;
                m.0[q][p] = ZERO;
                v = v * u;
            }
        }
    }
    Err(Error::NoConvergence(
        "Jacobi eigen-solver exceeded its sweep budget".into(),
    ))
}

fn sorted_eigen(m: &ComplexMat4, v: &ComplexMat4) -> HermitianEigen {
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| m.0[a][a].re.total_cmp(&m.0[b][b].re));
    let mut vectors = ComplexMat4::zeros();
    let mut values = [0.0; 4];
    for (k, &src) in order.iter().enumerate() {
        values[k] = m.0[src][src].re;
        for i in 0..4 {
            vectors.0[i][k] = v.0[i][src];
        }
    }
    HermitianEigen { values, vectors }
}

/// Complex Givens rotation `[[c, s], [−s̄, c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let alpha = a / na;
    (na / r, alpha * b.conj() / r)
}

fn rotate_rows(h: &mut ComplexMat4, k: usize, c: f64, s: C64, cols: std::ops::RangeInclusive<usize>) {
    for j in cols {
        let x = h.0[k][j];
        let y = h.0[k + 1][j];
        h.0[k][j] = x * c + s * y;
        h.0[k + 1][j] = -s.conj() * x + y * c;
    }
}

fn rotate_cols(h: &mut ComplexMat4, k: usize, c: f64, s: C64, rows: std::ops::RangeInclusive<usize>) {
    for i in rows {
        let x = h.0[i][k];
        let y = h.0[i][k + 1];
        h.0[i][k] = x * c + y * s.conj();
        h.0[i][k + 1] = -x * s + y * c;
    }
}

/// Unitary similarity to upper Hessenberg form.
pub fn hessenberg(a: &ComplexMat4) -> ComplexMat4 {
    let mut h = *a;
    for k in 0..2 {
        for i in ((k + 2)..4).rev() {
            if h.0[i][k] == ZERO {
                continue;
            }
            let (c, s) = givens(h.0[i - 1][k], h.0[i][k]);
            rotate_rows(&mut h, i - 1, c, s, 0..=3);
            rotate_cols(&mut h, i - 1, c, s, 0..=3);
            h.0[i][k] = ZERO;
        }
    }
    h
}

const QR_MAX_ITER: usize = 200;

/// Eigenvalues of a general complex 4×4 matrix.
///
/// Hessenberg reduction followed by single-shift QR with Wilkinson shifts
/// and deflation.
pub fn eig4(a: &ComplexMat4) -> Result<[C64; 4]> {
    let mut h = hessenberg(a);
    let mut eig = [ZERO; 4];
    let mut hi = 3usize;
    let mut iter = 0usize;
    let mut total = 0usize;

    loop {
        if hi == 0 {
            eig[0] = h.0[0][0];
            return Ok(eig);
        }
        let mut l = hi;
        while l > 0 {
            let sub = h.0[l][l - 1].norm();
            let diag = h.0[l - 1][l - 1].norm() + h.0[l][l].norm();
            let tol = f64::EPSILON * if diag == 0.0 { h.max_abs() } else { diag };
            if sub <= tol {
                h.0[l][l - 1] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h.0[hi][hi];
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > QR_MAX_ITER {
            return Err(Error::NoConvergence(
                "shifted QR iteration did not converge".into(),
            ));
        }

        let shift = if iter % 11 == 0 {
            h.0[hi][hi] + C64::new(h.0[hi][hi - 1].norm(), 0.0)
        } else {
            wilkinson_shift(
                h.0[hi - 1][hi - 1],
                h.0[hi - 1][hi],
                h.0[hi][hi - 1],
                h.0[hi][hi],
            )
        };

        for k in l..=hi {
            h.0[k][k] -= shift;
        }
        let mut rots = [(1.0, ZERO); 3];
        for k in l..hi {
            let (c, s) = givens(h.0[k][k], h.0[k + 1][k]);
            rotate_rows(&mut h, k, c, s, k..=hi);
            h.0[k + 1][k] = ZERO;
            rots[k - l] = (c, s);
        }
        for k in l..hi {
            let (c, s) = rots[k - l];
            rotate_cols(&mut h, k, c, s, l..=(k + 1));
        }
        for k in l..=hi {
            h.0[k][k] += shift;
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}
