//! Stationary clock–system universes and the dynamics they encode.
//!
//! A universe state satisfies `(Ĥ_c ⊗ 1 + 1 ⊗ Ĥ_s)|Ψ⟩ = 0`, which forces the
//! form `|Ψ⟩ = Σ_k c_k |E = −E_k⟩_c ⊗ |E_k⟩_s`. Conditioning on a clock time
//! state, `|φ_m⟩ = √d_c ⟨t_m|Ψ⟩`, recovers `Σ_k c_k e^{−iE_k t_m}|E_k⟩`, which
//! is the Schrödinger evolution of `|φ_0⟩` for both orthonormal and POVM
//! clocks.
//!
//! Global vectors live in `clock ⊗ system` with the clock as the slow index;
//! the clock factor is in its energy basis, the system factor in whatever
//! basis `Ĥ_s` was given in.

use crate::clock::{time_states, BasisKind, ClockSpec, TimeBasis};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, traced_product, DensityMatrix, Eigen, Operator, StateVector, Tensor, C64,
};
use crate::povm::{alpha_states, rationalize, RationalSpectrum};

const COEFF_TOL: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-12;
const MIN_MARGINAL: f64 = 1e-15;

/// System Hamiltonian, its eigendecomposition, and the energy-basis
/// coefficients of the system's share of the universe.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    hamiltonian: Operator,
    eigen: Eigen,
    coefficients: Vec<C64>,
}

impl SystemSpec {
    pub fn new(hamiltonian: Operator, coefficients: Vec<C64>) -> Result<Self> {
        let eigen = hermitian_eig(&hamiltonian)?;
        if coefficients.len() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.dim(),
                found: coefficients.len(),
            });
        }
        let total: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if (total - 1.0).abs() > COEFF_TOL {
            return Err(Error::CoefficientsNotNormalized(total));
        }
        Ok(Self {
            hamiltonian,
            eigen,
            coefficients,
        })
    }

    /// Expands a (normalized) initial state in the eigenbasis of `Ĥ_s`.
    pub fn from_initial_state(hamiltonian: Operator, initial: &StateVector) -> Result<Self> {
        if initial.dim() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.dim(),
                found: initial.dim(),
            });
        }
        let eigen = hermitian_eig(&hamiltonian)?;
        let initial = initial.normalized()?;
        let coefficients = (0..eigen.dim())
            .map(|k| eigen.vector(k).inner(&initial))
            .collect();
        Ok(Self {
            hamiltonian,
            eigen,
            coefficients,
        })
    }

    /// A diagonal Hamiltonian with the given levels.
    pub fn from_energies(energies: &[f64], coefficients: Vec<C64>) -> Result<Self> {
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("energies"));
        }
        Self::new(Operator::from_diagonal(energies), coefficients)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    /// Ascending eigenvalues `E_k`.
    pub fn energies(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvector(&self, k: usize) -> StateVector {
        self.eigen.vector(k)
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    /// `Σ_k c_k e^{−iE_k t}|E_k⟩`.
    pub fn state_at(&self, t: f64) -> StateVector {
        let mut out = StateVector::zeros(self.dim());
        for (k, c) in self.coefficients.iter().enumerate() {
            let w = c * C64::from_polar(1.0, -self.energies()[k] * t);
            out = out.add(&self.eigenvector(k).scale(w));
        }
        out
    }

    fn check_nondegenerate(&self) -> Result<()> {
        check_nondegenerate(self.energies())
    }
}

/// Degenerate system levels would need the same clock level.
pub(crate) fn check_nondegenerate(e: &[f64]) -> Result<()> {
    let scale = e.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for k in 1..e.len() {
        if e[k] - e[k - 1] <= DEGENERACY_TOL * scale {
            return Err(Error::PairingCollision(k - 1, k));
        }
    }
    Ok(())
}

/// The clock a universe was built with.
#[derive(Clone, Debug, PartialEq)]
pub enum UniverseClock {
    Hermitian(ClockSpec),
    Povm(RationalSpectrum),
}

impl UniverseClock {
    pub fn dim(&self) -> usize {
        match self {
            Self::Hermitian(c) => c.dim(),
            Self::Povm(s) => s.levels(),
        }
    }

    pub fn energies(&self) -> Vec<f64> {
        match self {
            Self::Hermitian(c) => c.energies(),
            Self::Povm(s) => s.energies().to_vec(),
        }
    }

    pub fn period(&self) -> f64 {
        match self {
            Self::Hermitian(c) => c.period(),
            Self::Povm(s) => s.period(),
        }
    }

    pub fn hamiltonian(&self) -> Operator {
        Operator::from_diagonal(&self.energies())
    }
}

/// Parameters of an equally spaced clock. Unset values are derived from the
/// system spectrum: the spacing from its rational lattice, `E0 = −max_k E_k`,
/// and the dimension as the smallest admissible one.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HermitianClockParams {
    pub dim: Option<usize>,
    pub e0: Option<f64>,
    pub spacing: Option<f64>,
    pub tau0: f64,
}

/// Parameters of a rational-ratio clock. Levels not paired with the system
/// are padded above the paired ones with label step 2.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PovmClockParams {
    pub dim: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClockKind {
    Hermitian(HermitianClockParams),
    Povm(PovmClockParams),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintOptions {
    /// Minimum `d_c / d_s`.
    pub clock_ratio: usize,
    /// Denominator cap when fitting the system spectrum onto a lattice.
    pub max_denominator: u64,
    /// Largest allowed distance between a system level and its lattice point.
    pub tolerance: f64,
}

impl Default for ConstraintOptions {
    fn default() -> Self {
        Self {
            clock_ratio: 4,
            max_denominator: 1000,
            tolerance: 1e-9,
        }
    }
}

/// A global state annihilated by the total Hamiltonian.
#[derive(Clone, Debug)]
pub struct UniverseState {
    clock: UniverseClock,
    system: SystemSpec,
    pairing: Vec<usize>,
    psi: StateVector,
}

/// Builds `|Ψ⟩ = Σ_k c_k |E = −E_k⟩ ⊗ |E_k⟩` on a clock chosen to host every `−E_k`.
pub fn solve_constraint(
    system: &SystemSpec,
    kind: &ClockKind,
    options: &ConstraintOptions,
) -> Result<UniverseState> {
    system.check_nondegenerate()?;
    let (clock, pairing) = match kind {
        ClockKind::Hermitian(p) => hermitian_pairing(system, p, options)?,
        ClockKind::Povm(p) => povm_pairing(system, p, options)?,
    };
    let dc = clock.dim();
    let ds = system.dim();
    let ratio = options.clock_ratio.max(1);
    if dc < ratio * ds {
        return Err(Error::ClockNotLargeEnough {
            clock: dc,
            system: ds,
            factor: ratio,
        });
    }
    let mut psi = StateVector::zeros(dc * ds);
    for (k, &n) in pairing.iter().enumerate() {
        let term = StateVector::basis(dc, n)
            .tensor(&system.eigenvector(k))?
            .scale(system.coefficients()[k]);
        psi = psi.add(&term);
    }
    Ok(UniverseState {
        clock,
        system: system.clone(),
        pairing,
        psi,
    })
}

fn fit_system(system: &SystemSpec, max_den: u64) -> Result<RationalSpectrum> {
    let e = system.energies();
    if e.len() == 1 {
        return RationalSpectrum::from_labels(e[0], std::f64::consts::TAU, vec![0]);
    }
    rationalize(e, max_den)
}

fn check_collisions(pairing: &[usize]) -> Result<()> {
    for i in 0..pairing.len() {
        for j in i + 1..pairing.len() {
            if pairing[i] == pairing[j] {
                return Err(Error::PairingCollision(i, j));
            }
        }
    }
    Ok(())
}

fn hermitian_pairing(
    system: &SystemSpec,
    params: &HermitianClockParams,
    options: &ConstraintOptions,
) -> Result<(UniverseClock, Vec<usize>)> {
    let energies = system.energies();
    let spacing = match params.spacing {
        Some(s) => s,
        None => fit_system(system, options.max_denominator)?.quantum(),
    };
    let e_max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e0 = params.e0.unwrap_or(-e_max);
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::BadSpacing(spacing));
    }

    let mut levels = Vec::with_capacity(energies.len());
    for &e in energies {
        let x = (-e - e0) / spacing;
        let n = x.round();
        let offset = (x - n).abs() * spacing;
        if offset > options.tolerance {
            return Err(Error::Incommensurate {
                energy: e,
                offset,
                tolerance: options.tolerance,
            });
        }
        levels.push(n as i64);
    }
    let top = levels.iter().copied().max().unwrap_or(0);
    let dim = params.dim.unwrap_or_else(|| {
        (options.clock_ratio * system.dim())
            .max(top as usize + 1)
            .max(2)
    });
    let mut pairing = Vec::with_capacity(levels.len());
    for (&n, &e) in levels.iter().zip(energies) {
        if n < 0 || n as usize >= dim {
            return Err(Error::LevelOutOfRange {
                energy: e,
                level: n,
                dim,
            });
        }
        pairing.push(n as usize);
    }
    check_collisions(&pairing)?;
    let spec = ClockSpec::new(dim, e0, spacing, params.tau0)?;
    Ok((UniverseClock::Hermitian(spec), pairing))
}

fn povm_pairing(
    system: &SystemSpec,
    params: &PovmClockParams,
    options: &ConstraintOptions,
) -> Result<(UniverseClock, Vec<usize>)> {
    let fit = fit_system(system, options.max_denominator)?;
    if fit.residual() > options.tolerance {
        return Err(Error::Incommensurate {
            energy: fit.input_energies()[0],
            offset: fit.residual(),
            tolerance: options.tolerance,
        });
    }
    let top = fit.max_label();
    let ds = system.dim();
    let dim = params.dim.unwrap_or(options.clock_ratio * ds).max(ds);

    // Level −E_k carries label top − r_k above the clock ground −E_max.
    let paired: Vec<u64> = fit.labels().iter().map(|&r| top - r).collect();
    let mut labels = paired.clone();
    let mut next = top;
    while labels.len() < dim {
        next += 2;
        labels.push(next);
    }
    labels.sort_unstable();
    let e_max = fit.e0() + top as f64 * fit.quantum();
    let spectrum = RationalSpectrum::from_labels(-e_max, fit.period(), labels)?;
    let pairing: Vec<usize> = paired
        .iter()
        .map(|l| {
            spectrum
                .labels()
                .binary_search(l)
                .expect("paired label present")
        })
        .collect();
    check_collisions(&pairing)?;
    Ok((UniverseClock::Povm(spectrum), pairing))
}

/// Outcome of conditioning an observable on a clock reading, computed both
/// from the global state and from unitary evolution of `|φ_0⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BornCheck {
    /// `P(a, t_m) / P(t_m)` from projections of `|Ψ⟩`.
    pub conditional: f64,
    /// `|⟨a|Û_s(t_m − t_0)|φ_0⟩|²`.
    pub born: f64,
}

impl BornCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.conditional - self.born).abs()
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub state: StateVector,
    pub norm: f64,
    /// `1 − |⟨φ_m|Û_s(t_m − t_0)|φ_0⟩|²`.
    pub infidelity: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn max_infidelity(&self) -> f64 {
        self.points.iter().map(|p| p.infidelity).fold(0.0, f64::max)
    }

    pub fn max_norm_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.norm - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn normalized_infidelity(a: &StateVector, b: &StateVector) -> f64 {
    let overlap = a.inner(b).norm_sqr() / (a.norm_sqr() * b.norm_sqr());
    (1.0 - overlap).max(0.0)
}

impl UniverseState {
    pub fn clock(&self) -> &UniverseClock {
        &self.clock
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    /// Clock level index paired with each system level.
    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn psi(&self) -> &StateVector {
        &self.psi
    }

    pub fn clock_dim(&self) -> usize {
        self.clock.dim()
    }

    pub fn system_dim(&self) -> usize {
        self.system.dim()
    }

    /// `‖(Ĥ_c ⊗ 1 + 1 ⊗ Ĥ_s)|Ψ⟩‖`.
    pub fn constraint_residual(&self) -> f64 {
        let ds = self.system_dim();
        let hs = self.system.hamiltonian();
        let mut total = 0.0;
        for (chunk, e) in self.psi.amplitudes().chunks(ds).zip(self.clock.energies()) {
            let block = StateVector::new(chunk.to_vec()).expect("finite");
            let out = hs.apply(&block).add(&block.scale(C64::new(e, 0.0)));
            total += out.norm_sqr();
        }
        total.sqrt()
    }

    /// Largest `|E_c(n_k) + E_k|`, the mismatch introduced by fitting the
    /// system spectrum onto the clock lattice.
    pub fn pairing_residual(&self) -> f64 {
        let ec = self.clock.energies();
        self.pairing
            .iter()
            .zip(self.system.energies())
            .map(|(&n, e)| (ec[n] + e).abs())
            .fold(0.0, f64::max)
    }

    /// The natural time basis: `|τ_m⟩` for a Hermitian clock, α-states on the
    /// default grid (`α0 = 0`) for a POVM clock.
    pub fn default_basis(&self) -> Result<TimeBasis> {
        match &self.clock {
            UniverseClock::Hermitian(spec) => Ok(time_states(spec)),
            UniverseClock::Povm(spec) => alpha_states(spec, spec.default_grid_size(), 0.0),
        }
    }

    /// α-states with `size` readings; only for POVM clocks.
    pub fn povm_basis(&self, size: usize, alpha0: f64) -> Result<TimeBasis> {
        match &self.clock {
            UniverseClock::Povm(spec) => alpha_states(spec, size, alpha0),
            UniverseClock::Hermitian(_) => Err(Error::BasisMismatch),
        }
    }

    fn check_basis(&self, basis: &TimeBasis) -> Result<()> {
        if basis.is_empty() || basis.space_dim() != self.clock_dim() {
            return Err(Error::BasisMismatch);
        }
        let period = self.clock.period();
        if (basis.period() - period).abs() > 1e-12 * period {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    fn check_index(basis: &TimeBasis, m: usize) -> Result<()> {
        if m >= basis.len() {
            return Err(Error::IndexOutOfRange {
                index: m,
                len: basis.len(),
            });
        }
        Ok(())
    }

    /// `⟨t|Ψ⟩` as a system vector.
    fn project_clock(&self, t: &StateVector) -> StateVector {
        let ds = self.system_dim();
        let amps = self.psi.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); ds];
        for (c, tc) in t.amplitudes().iter().enumerate() {
            let w = tc.conj();
            for (o, a) in out.iter_mut().zip(&amps[c * ds..(c + 1) * ds]) {
                *o += w * a;
            }
        }
        StateVector::new(out).expect("finite")
    }

    /// Relative state `√d_c ⟨t_m|Ψ⟩`.
    pub fn relative_state(&self, basis: &TimeBasis, m: usize) -> Result<StateVector> {
        self.check_basis(basis)?;
        Self::check_index(basis, m)?;
        let scale = (self.clock_dim() as f64).sqrt();
        Ok(self
            .project_clock(basis.state(m))
            .scale(C64::new(scale, 0.0)))
    }

    /// Relative states and their deviation from unitary evolution of `|φ_0⟩`.
    pub fn trajectory(&self, basis: &TimeBasis) -> Result<Trajectory> {
        self.check_basis(basis)?;
        let phi0 = self.relative_state(basis, 0)?;
        let t0 = basis.origin();
        let h = hermitian_eig(self.system.hamiltonian())?;
        let points = (0..basis.len())
            .map(|m| {
                let state = self.relative_state(basis, m)?;
                let evolved = h.propagate(basis.time(m) - t0, &phi0);
                Ok(TrajectoryPoint {
                    time: basis.time(m),
                    norm: state.norm(),
                    infidelity: normalized_infidelity(&state, &evolved),
                    state,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { points })
    }

    /// Largest infidelity between relative states and `Û_s(t_m − t_0)|φ_0⟩`.
    pub fn verify_schrodinger(&self, basis: &TimeBasis) -> Result<f64> {
        Ok(self.trajectory(basis)?.max_infidelity())
    }

    /// `(w/√d_c) Σ_m |t_m⟩ ⊗ Û_s(t_m − t_0)|φ_0⟩`.
    pub fn history_state(&self, basis: &TimeBasis) -> Result<StateVector> {
        self.check_basis(basis)?;
        let phi0 = self.relative_state(basis, 0)?;
        let t0 = basis.origin();
        let h = hermitian_eig(self.system.hamiltonian())?;
        let prefactor = basis.weight() / (self.clock_dim() as f64).sqrt();
        let mut acc = StateVector::zeros(self.psi.dim());
        for m in 0..basis.len() {
            let evolved = h.propagate(basis.time(m) - t0, &phi0);
            acc = acc.add(&basis.state(m).tensor(&evolved)?);
        }
        Ok(acc.scale(C64::new(prefactor, 0.0)))
    }

    /// `‖history_state − Ψ‖`.
    pub fn history_error(&self, basis: &TimeBasis) -> Result<f64> {
        Ok(self.history_state(basis)?.distance(&self.psi))
    }

    /// Probability of outcome `outcome` (index into the ascending eigenvalues
    /// of `observable`) given clock reading `m`.
    pub fn conditional_probability(
        &self,
        basis: &TimeBasis,
        m: usize,
        observable: &Operator,
        outcome: usize,
    ) -> Result<BornCheck> {
        self.check_basis(basis)?;
        Self::check_index(basis, m)?;
        let ds = self.system_dim();
        if observable.dim() != ds {
            return Err(Error::DimensionMismatch {
                expected: ds,
                found: observable.dim(),
            });
        }
        if outcome >= ds {
            return Err(Error::IndexOutOfRange {
                index: outcome,
                len: ds,
            });
        }
        let eig = hermitian_eig(observable)?;
        let conditioned = self.project_clock(basis.state(m));
        let joint: Vec<f64> = (0..ds)
            .map(|a| eig.vector(a).inner(&conditioned).norm_sqr())
            .collect();
        let marginal: f64 = joint.iter().sum();
        if marginal < MIN_MARGINAL {
            return Err(Error::ZeroMarginal);
        }

        let phi0 = self.relative_state(basis, 0)?;
        let evolved = hermitian_eig(self.system.hamiltonian())?
            .propagate(basis.time(m) - basis.origin(), &phi0);
        Ok(BornCheck {
            conditional: joint[outcome] / marginal,
            born: eig.vector(outcome).inner(&evolved).norm_sqr(),
        })
    }

    /// `ρ = |Ψ⟩⟨Ψ|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.psi).expect("nonzero universe state")
    }

    fn conditioned_density(
        &self,
        rho: &Operator,
        basis: &TimeBasis,
        m: usize,
    ) -> Result<DensityMatrix> {
        let projector = basis.state(m).projector();
        let reduced = traced_product(&projector, rho, self.system_dim())?;
        let marginal = reduced.trace();
        if marginal.norm() < MIN_MARGINAL {
            return Err(Error::ZeroMarginal);
        }
        Ok(DensityMatrix::new(reduced.scale(marginal.inv()))?)
    }

    /// `Tr_c[P_m ρ] / Tr[P_m ρ]` with `P_m = |t_m⟩⟨t_m| ⊗ 1`.
    pub fn density_relative_state(&self, basis: &TimeBasis, m: usize) -> Result<DensityMatrix> {
        self.check_basis(basis)?;
        Self::check_index(basis, m)?;
        self.conditioned_density(self.density().as_operator(), basis, m)
    }

    /// Largest Frobenius deviation of the periodic central difference of
    /// `ρ_m` from `i[ρ_m, Ĥ_s]`.
    pub fn vn_equation_residual(&self, basis: &TimeBasis) -> Result<f64> {
        self.check_basis(basis)?;
        let rho = self.density();
        let states = (0..basis.len())
            .map(|m| self.conditioned_density(rho.as_operator(), basis, m))
            .collect::<Result<Vec<_>>>()?;
        let n = states.len();
        let step = basis.step();
        let h = self.system.hamiltonian();
        let mut worst: f64 = 0.0;
        for m in 0..n {
            let next = states[(m + 1) % n].as_operator();
            let prev = states[(m + n - 1) % n].as_operator();
            let derivative = next.sub(prev).scale(C64::new(0.5 / step, 0.0));
            let rhs = states[m]
                .as_operator()
                .commutator(h)
                .scale(C64::new(0.0, 1.0));
            worst = worst.max(derivative.sub(&rhs).frobenius_norm());
        }
        Ok(worst)
    }

    pub fn basis_kind(&self) -> BasisKind {
        match self.clock {
            UniverseClock::Hermitian(_) => BasisKind::Orthonormal,
            UniverseClock::Povm(_) => BasisKind::Povm,
        }
    }
}
