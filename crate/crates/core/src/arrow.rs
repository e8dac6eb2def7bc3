//! Entanglement growth between two parts of the system as the clock runs.
//!
//! The system is split into an observer `Σ₁` (first factor) and an observed
//! part `Σ₂`, prepared in a product state and coupled by `Ĥ_s`. Conditioned on
//! successive clock readings the two become entangled.

use crate::clock::TimeBasis;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, mutual_information, von_neumann_entropy, DensityMatrix, Keep, Operator,
    StateVector, Tensor, C64,
};
use crate::povm::rationalize;
use crate::universe::{
    check_nondegenerate, solve_constraint, ClockKind, ConstraintOptions, HermitianClockParams,
    SystemSpec, UniverseState,
};

#[derive(Clone, Debug)]
pub struct Bipartition {
    d1: usize,
    d2: usize,
    hamiltonian: Operator,
    first: StateVector,
    second: StateVector,
}

impl Bipartition {
    pub fn new(hamiltonian: Operator, first: StateVector, second: StateVector) -> Result<Self> {
        let (d1, d2) = (first.dim(), second.dim());
        if d1 * d2 != hamiltonian.dim() {
            return Err(Error::BadBipartition {
                d1,
                d2,
                dim: hamiltonian.dim(),
            });
        }
        hamiltonian.ensure_hermitian()?;
        Ok(Self {
            d1,
            d2,
            hamiltonian,
            first: first.normalized()?,
            second: second.normalized()?,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn initial_state(&self) -> StateVector {
        self.first.tensor(&self.second).expect("dimension checked")
    }
}

fn pauli_z() -> Operator {
    Operator::from_diagonal(&[1.0, -1.0])
}

/// `g σz⊗σz + h1 σz⊗1 + h2 1⊗σz` acting on `|+⟩|+⟩`.
pub fn zz_demo(g: f64, h1: f64, h2: f64) -> Bipartition {
    let z = pauli_z();
    let one = Operator::identity(2);
    let h = z
        .tensor(&z)
        .expect("small")
        .scale(C64::new(g, 0.0))
        .add(&z.tensor(&one).expect("small").scale(C64::new(h1, 0.0)))
        .add(&one.tensor(&z).expect("small").scale(C64::new(h2, 0.0)));
    let plus = StateVector::from_real(&[1.0, 1.0]).expect("finite");
    Bipartition::new(h, plus.clone(), plus).expect("valid demo")
}

/// The shipped demo: `g = 1` with fields `0.5` and `0.25`, whose levels
/// `(−1.25, −0.75, 0.25, 1.75)` are distinct multiples of `0.5`.
pub fn default_demo() -> Bipartition {
    zz_demo(1.0, 0.5, 0.25)
}

/// Closed-form `S(t)` for `zz_demo(g, ·, ·)`: binary entropy of `(1 + cos 2gt)/2`.
pub fn zz_entropy(g: f64, t: f64) -> f64 {
    let p = 0.5 * (1.0 + (2.0 * g * t).cos());
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// Builds a universe whose relative state at the basis origin is the initial
/// product state. The spectrum of `Ĥ_s` is fitted onto a lattice with
/// denominators up to `max_denominator`; the fit error shows up in the
/// constraint residual rather than as a failure.
///
/// For a Hermitian clock with unset spacing and `E0`, they are taken from the
/// fit so the pairing offsets equal the fit error. `origin` is the time label
/// of the first reading of the basis that will be used (`τ0` or `α0`).
pub fn build_interacting_universe(
    bip: &Bipartition,
    kind: &ClockKind,
    max_denominator: u64,
    origin: f64,
) -> Result<UniverseState> {
    let eigen = hermitian_eig(&bip.hamiltonian)?;
    check_nondegenerate(&eigen.values)?;
    let fit = if eigen.dim() == 1 {
        None
    } else {
        Some(rationalize(&eigen.values, max_denominator)?)
    };
    let fitted: Vec<f64> = match &fit {
        Some(f) => f.energies().to_vec(),
        None => eigen.values.clone(),
    };
    let initial = bip.initial_state();
    let coefficients: Vec<C64> = (0..eigen.dim())
        .map(|k| eigen.vector(k).inner(&initial) * C64::from_polar(1.0, fitted[k] * origin))
        .collect();
    let system = SystemSpec::new(bip.hamiltonian.clone(), coefficients)?;

    let kind = match (kind, &fit) {
        (ClockKind::Hermitian(p), Some(f)) => ClockKind::Hermitian(HermitianClockParams {
            spacing: p.spacing.or(Some(f.quantum())),
            e0: p.e0.or(Some(-fitted[fitted.len() - 1])),
            ..*p
        }),
        _ => *kind,
    };
    let options = ConstraintOptions {
        max_denominator,
        tolerance: f64::INFINITY,
        ..ConstraintOptions::default()
    };
    solve_constraint(&system, &kind, &options)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyPoint {
    pub time: f64,
    /// `S(ρ_Σ1)`.
    pub entropy: f64,
    /// `S(ρ_Σ2)`; equal to `entropy` for a pure conditioned state.
    pub entropy_observed: f64,
    /// `I(Σ₁:Σ₂)` of the conditioned state.
    pub mutual_information: f64,
}

/// Entanglement entropy of the observer in each relative state.
pub fn entropy_trajectory(
    universe: &UniverseState,
    basis: &TimeBasis,
    dims: (usize, usize),
) -> Result<Vec<EntropyPoint>> {
    let ds = universe.system_dim();
    if dims.0 * dims.1 != ds {
        return Err(Error::BadBipartition {
            d1: dims.0,
            d2: dims.1,
            dim: ds,
        });
    }
    (0..basis.len())
        .map(|m| {
            let phi = universe.relative_state(basis, m)?.normalized()?;
            let rho = DensityMatrix::from_pure(&phi)?;
            let first = rho.partial_trace(dims, Keep::First)?;
            let second = rho.partial_trace(dims, Keep::Second)?;
            Ok(EntropyPoint {
                time: basis.time(m),
                entropy: von_neumann_entropy(&first)?,
                entropy_observed: von_neumann_entropy(&second)?,
                mutual_information: mutual_information(&rho, dims)?,
            })
        })
        .collect()
}
