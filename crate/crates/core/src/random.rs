//! Random states and operators for property sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{DensityMatrix, Operator, StateVector, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    let v = StateVector::new((0..dim).map(|_| gaussian(rng)).collect()).expect("finite samples");
    v.normalized().expect("nonzero gaussian vector")
}

/// Hermitian matrix drawn from the Gaussian unitary ensemble.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let g = Operator::from_fn(dim, |_, _| gaussian(rng));
    g.add(&g.adjoint()).scale(C64::new(0.5, 0.0))
}

/// Full-rank mixed state `G·G† / Tr(G·G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = Operator::from_fn(dim, |_, _| gaussian(rng));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let m = m.scale(C64::new(1.0 / tr, 0.0));
    let m = m.add(&m.adjoint()).scale(C64::new(0.5, 0.0));
    DensityMatrix::new(m).expect("Wishart matrix is a valid density matrix")
}
