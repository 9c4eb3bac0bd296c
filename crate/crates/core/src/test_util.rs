use rand::Rng;

use crate::qmat::{ComplexMat4, DensityMatrix, C64};

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; keeps rand_distr out of the dependency set.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn random_matrix<R: Rng>(rng: &mut R) -> ComplexMat4 {
    let mut m = ComplexMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = C64::new(gaussian(rng), gaussian(rng));
        }
    }
    m
}

/// Ginibre-ensemble density matrix, full rank almost surely.
pub fn random_density<R: Rng>(rng: &mut R) -> DensityMatrix {
    let g = random_matrix(rng);
    let w = g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new_unchecked(w.hermitian_part().scale_re(1.0 / tr))
}

pub fn random_unitary<R: Rng>(rng: &mut R) -> ComplexMat4 {
    let h = random_matrix(rng).hermitian_part();
    let e = crate::qmat::eigh4(&h).unwrap();
    e.vectors
}
