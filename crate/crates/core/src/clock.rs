//! Equally spaced clocks, their time states and the Hermitian time operator.
//!
//! A clock of dimension `d` has levels `E_n = E0 + n·δE`. Its time states
//!
//! ```text
//! |τ_m⟩ = d^{-1/2} Σ_n e^{−i E_n τ_m} |E_n⟩,   τ_m = τ0 + m·T/d,   T = 2π/δE
//! ```
//!
//! form an orthonormal basis, so `τ̂ = Σ_m τ_m |τ_m⟩⟨τ_m|` is Hermitian and
//! conjugate to the clock Hamiltonian. Vectors are written in the clock
//! energy basis throughout. Units have `ħ = 1`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, Operator, StateVector, C64};

const NORMALIZATION_TOL: f64 = 1e-10;

/// An equally spaced clock spectrum together with the origin of its time grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClockSpec {
    dim: usize,
    e0: f64,
    spacing: f64,
    tau0: f64,
}

impl ClockSpec {
    pub fn new(dim: usize, e0: f64, spacing: f64, tau0: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::ClockTooSmall(dim));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::BadSpacing(spacing));
        }
        if !e0.is_finite() {
            return Err(Error::NonFinite("e0"));
        }
        if !tau0.is_finite() {
            return Err(Error::NonFinite("tau0"));
        }
        Ok(Self {
            dim,
            e0,
            spacing,
            tau0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    /// Recurrence time `T = 2π/δE`.
    pub fn period(&self) -> f64 {
        TAU / self.spacing
    }

    /// Grid step `δτ = 2π/(δE·d)`.
    pub fn resolution(&self) -> f64 {
        TAU / (self.spacing * self.dim as f64)
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.e0 + n as f64 * self.spacing
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.dim).map(|n| self.energy(n)).collect()
    }

    pub fn time(&self, m: usize) -> f64 {
        self.tau0 + m as f64 * self.resolution()
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.dim).map(|m| self.time(m)).collect()
    }

    pub fn hamiltonian(&self) -> Operator {
        Operator::from_diagonal(&self.energies())
    }

    pub fn energy_state(&self, n: usize) -> StateVector {
        StateVector::basis(self.dim, n)
    }

    /// The time state for an arbitrary reading `t`, not necessarily on the grid.
    pub fn time_state_at(&self, t: f64) -> StateVector {
        phase_state(&self.energies(), t)
    }
}

/// `d^{-1/2} Σ_n e^{−i E_n t} |E_n⟩`.
pub(crate) fn phase_state(energies: &[f64], t: f64) -> StateVector {
    let norm = 1.0 / (energies.len() as f64).sqrt();
    let amps = energies
        .iter()
        .map(|&e| C64::from_polar(norm, -e * t))
        .collect();
    StateVector::new(amps).expect("finite phases")
}

pub fn build_clock(dim: usize, e0: f64, spacing: f64, tau0: f64) -> Result<ClockSpec> {
    ClockSpec::new(dim, e0, spacing, tau0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// Orthonormal eigenbasis of a Hermitian time operator.
    Orthonormal,
    /// Overcomplete, non-orthogonal states resolving the identity as a POVM.
    Povm,
}

/// Time states on a uniform grid of readings, with the weight `w` such that
/// `w·Σ_m |t_m⟩⟨t_m| = 1`.
#[derive(Clone, Debug)]
pub struct TimeBasis {
    kind: BasisKind,
    states: Vec<StateVector>,
    grid: Vec<f64>,
    weight: f64,
    period: f64,
}

impl TimeBasis {
    pub(crate) fn new(
        kind: BasisKind,
        states: Vec<StateVector>,
        grid: Vec<f64>,
        weight: f64,
        period: f64,
    ) -> Self {
        debug_assert_eq!(states.len(), grid.len());
        Self {
            kind,
            states,
            grid,
            weight,
            period,
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of time states.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dimension of the clock space the states live in.
    pub fn space_dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, m: usize) -> &StateVector {
        &self.states[m]
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn time(&self, m: usize) -> f64 {
        self.grid[m]
    }

    pub fn origin(&self) -> f64 {
        self.grid[0]
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Grid spacing between consecutive readings.
    pub fn step(&self) -> f64 {
        self.period / self.len() as f64
    }

    /// Gram matrix `G_{mm'} = ⟨t_m|t_m'⟩`.
    pub fn gram(&self) -> Operator {
        let n = self.len();
        Operator::from_fn(n, |i, j| self.states[i].inner(&self.states[j]))
    }

    /// `max |G − 1|` over entries.
    pub fn gram_error(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let g = self.states[i].inner(&self.states[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// `w·Σ_m |t_m⟩⟨t_m|`.
    pub fn weighted_projector_sum(&self) -> Operator {
        let d = self.space_dim();
        let mut acc = Operator::zeros(d);
        for s in &self.states {
            let a = s.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    acc[(i, j)] += a[i] * a[j].conj();
                }
            }
        }
        acc.scale(C64::new(self.weight, 0.0))
    }

    /// Frobenius norm of `w·Σ_m |t_m⟩⟨t_m| − 1`.
    pub fn identity_residual(&self) -> f64 {
        self.weighted_projector_sum()
            .sub(&Operator::identity(self.space_dim()))
            .frobenius_norm()
    }
}

/// The orthonormal time basis of an equally spaced clock.
pub fn time_states(spec: &ClockSpec) -> TimeBasis {
    let energies = spec.energies();
    let grid = spec.grid();
    let states = grid.iter().map(|&t| phase_state(&energies, t)).collect();
    TimeBasis::new(BasisKind::Orthonormal, states, grid, 1.0, spec.period())
}

/// `τ̂ = Σ_m τ_m |τ_m⟩⟨τ_m|`, in the clock energy basis.
pub fn time_operator(basis: &TimeBasis) -> Result<Operator> {
    if basis.kind() != BasisKind::Orthonormal {
        return Err(Error::PovmHasNoTimeOperator);
    }
    let d = basis.space_dim();
    let mut op = Operator::zeros(d);
    for (s, &t) in basis.states().iter().zip(basis.grid()) {
        let a = s.amplitudes();
        for i in 0..d {
            for j in 0..d {
                op[(i, j)] += a[i] * a[j].conj() * t;
            }
        }
    }
    Ok(op)
}

/// How well the clock Hamiltonian and the time operator generate each other's shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyReport {
    /// `‖e^{−iĤ_c(τ_m−τ0)}|τ0⟩ − |τ_m⟩‖` for each `m`.
    pub time_shift_errors: Vec<f64>,
    /// `‖e^{iτ̂(E_n−E0)}|E0⟩ − |E_n⟩‖` for each `n`.
    pub energy_shift_errors: Vec<f64>,
}

impl ConjugacyReport {
    pub fn max_err_shift_time(&self) -> f64 {
        self.time_shift_errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_err_shift_energy(&self) -> f64 {
        self.energy_shift_errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Checks the conjugacy relations by exponentiating `Ĥ_c` and `τ̂` through
/// their numerical eigendecompositions.
pub fn verify_conjugacy(spec: &ClockSpec, basis: &TimeBasis) -> Result<ConjugacyReport> {
    if basis.space_dim() != spec.dim() || basis.len() != spec.dim() {
        return Err(Error::BasisMismatch);
    }
    let hc = hermitian_eig(&spec.hamiltonian())?;
    let tau0 = basis.origin();
    let first = basis.state(0);
    let time_shift_errors = (0..basis.len())
        .map(|m| {
            hc.propagate(basis.time(m) - tau0, first)
                .distance(basis.state(m))
        })
        .collect();

    let tau = hermitian_eig(&time_operator(basis)?)?;
    let ground = spec.energy_state(0);
    let energy_shift_errors = (0..spec.dim())
        .map(|n| {
            // e^{+iτ̂x} is the propagator at time −x.
            let shift = spec.energy(n) - spec.e0();
            tau.propagate(-shift, &ground)
                .distance(&spec.energy_state(n))
        })
        .collect();
    Ok(ConjugacyReport {
        time_shift_errors,
        energy_shift_errors,
    })
}

/// Rate of change of `⟨τ̂⟩`, `−i⟨ψ|[τ̂, Ĥ_c]|ψ⟩`, for a clock state `ψ`.
pub fn age_rate(psi: &StateVector, spec: &ClockSpec, basis: &TimeBasis) -> Result<f64> {
    if psi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: psi.dim(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let tau = time_operator(basis)?;
    let comm = tau.commutator(&spec.hamiltonian());
    let value = comm.expectation(psi) * C64::new(0.0, -1.0);
    let scale = comm.frobenius_norm().max(1.0);
    if value.im.abs() > 1e-12 * scale {
        return Err(Error::NotReal(value.im));
    }
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn two_level_period_and_resolution() {
        let spec = build_clock(2, 0.0, PI, 0.0).unwrap();
        assert_eq!(spec.period(), 2.0);
        assert_eq!(spec.resolution(), 1.0);
    }

    #[test]
    fn unit_period() {
        let spec = build_clock(7, -3.0, 2.0 * PI, 0.25).unwrap();
        assert_eq!(spec.period(), 1.0);
    }

    #[test]
    fn ten_levels_unit_step() {
        let spec = build_clock(10, 0.0, 2.0 * PI / 10.0, 0.0).unwrap();
        assert!((spec.resolution() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(build_clock(1, 0.0, 1.0, 0.0), Err(Error::ClockTooSmall(1)));
        assert_eq!(build_clock(4, 0.0, 0.0, 0.0), Err(Error::BadSpacing(0.0)));
        assert_eq!(build_clock(4, 0.0, -1.0, 0.0), Err(Error::BadSpacing(-1.0)));
        assert!(build_clock(4, f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn two_level_time_states() {
        let basis = time_states(&build_clock(2, 0.0, PI, 0.0).unwrap());
        let s = FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[s, s]).unwrap();
        let minus = StateVector::from_real(&[s, -s]).unwrap();
        assert!(basis.state(0).distance(&plus) < 1e-15);
        assert!(basis.state(1).distance(&minus) < 1e-15);
        assert_eq!(basis.grid(), &[0.0, 1.0]);
    }

    #[test]
    fn three_level_completeness() {
        let basis = time_states(&build_clock(3, 0.0, 1.0, 0.0).unwrap());
        assert!(basis.identity_residual() < 1e-12);
        for s in basis.states() {
            assert!((s.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_level_time_operator() {
        let basis = time_states(&build_clock(2, 0.0, PI, 0.0).unwrap());
        let tau = time_operator(&basis).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 0.5 } else { -0.5 };
                assert!((tau[(i, j)] - C64::new(want, 0.0)).norm() < 1e-15, "{i}{j}");
            }
        }
    }

    #[test]
    fn time_operator_spectrum_is_grid() {
        let basis = time_states(&build_clock(6, 0.4, 0.9, -1.3).unwrap());
        let tau = time_operator(&basis).unwrap();
        assert!(tau.hermiticity_error() < 1e-12);
        let eig = hermitian_eig(&tau).unwrap();
        for (l, t) in eig.values.iter().zip(basis.grid()) {
            assert!((l - t).abs() < 1e-12);
        }
    }

    #[test]
    fn time_operator_trace_is_grid_sum() {
        let basis = time_states(&build_clock(4, 1.0, 0.5, 0.2).unwrap());
        let tr = time_operator(&basis).unwrap().trace();
        let sum: f64 = basis.grid().iter().sum();
        assert!((tr.re - sum).abs() < 1e-12 && tr.im.abs() < 1e-12);
    }

    #[test]
    fn povm_basis_has_no_time_operator() {
        let mut basis = time_states(&build_clock(3, 0.0, 1.0, 0.0).unwrap());
        basis.kind = BasisKind::Povm;
        assert_eq!(time_operator(&basis), Err(Error::PovmHasNoTimeOperator));
    }

    #[test]
    fn conjugacy_two_level() {
        let spec = build_clock(2, 0.0, PI, 0.0).unwrap();
        let report = verify_conjugacy(&spec, &time_states(&spec)).unwrap();
        assert!(report.max_err_shift_time() <= 1e-12);
        assert!(report.max_err_shift_energy() <= 1e-12);
        assert_eq!(report.time_shift_errors[0], 0.0);
        assert_eq!(report.energy_shift_errors[0], 0.0);
    }

    #[test]
    fn conjugacy_sixteen_levels() {
        let spec = build_clock(16, -2.71, 0.37, 0.5).unwrap();
        let report = verify_conjugacy(&spec, &time_states(&spec)).unwrap();
        assert!(report.max_err_shift_time() <= 1e-10);
        assert!(report.max_err_shift_energy() <= 1e-10);
    }

    #[test]
    fn cyclic_grid() {
        // With E0 = 0 the wrapped state matches exactly; otherwise only up to the phase e^{−iE0·T}.
        let spec = build_clock(5, 0.0, 0.8, 0.3).unwrap();
        let wrapped = spec.time_state_at(spec.tau0() + spec.period());
        assert!(wrapped.distance(&time_states(&spec).states()[0]) < 1e-12);

        let spec = build_clock(5, -1.7, 0.8, 0.3).unwrap();
        let wrapped = spec.time_state_at(spec.tau0() + spec.period());
        assert!((wrapped.fidelity(&time_states(&spec).states()[0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn age_rate_freezes_on_energy_eigenstates() {
        let spec = build_clock(8, -0.5, 0.7, 0.1).unwrap();
        let basis = time_states(&spec);
        for n in 0..8 {
            assert!(
                age_rate(&spec.energy_state(n), &spec, &basis)
                    .unwrap()
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn age_rate_on_time_state_matches_commutator() {
        let spec = build_clock(5, 0.0, 1.0, 0.0).unwrap();
        let basis = time_states(&spec);
        let tau = time_operator(&basis).unwrap();
        let h = spec.hamiltonian();
        let comm = tau.matmul(&h).sub(&h.matmul(&tau));
        for m in 0..5 {
            let psi = basis.state(m);
            let direct = psi.inner(&comm.apply(psi)) * C64::new(0.0, -1.0);
            let got = age_rate(psi, &spec, &basis).unwrap();
            assert!((got - direct.re).abs() < 1e-12);
        }
    }

    #[test]
    fn age_rate_double_sum() {
        // −i Σ_{n,n'} ψ*_n τ_{nn'} ψ_{n'} (E_{n'} − E_n), evaluated term by term.
        let spec = build_clock(6, 0.3, 0.5, 0.0).unwrap();
        let basis = time_states(&spec);
        let tau = time_operator(&basis).unwrap();
        let s = FRAC_1_SQRT_2;
        let mut psi = StateVector::zeros(6);
        psi[1] = C64::new(s, 0.0);
        psi[2] = C64::new(s, 0.0);
        let mut sum = C64::new(0.0, 0.0);
        for n in 0..6 {
            for n2 in 0..6 {
                sum += psi[n].conj() * tau[(n, n2)] * psi[n2] * (spec.energy(n2) - spec.energy(n));
            }
        }
        let want = (sum * C64::new(0.0, -1.0)).re;
        let got = age_rate(&psi, &spec, &basis).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!(got.abs() > 1e-3);
    }

    #[test]
    fn age_rate_rejects_unnormalized() {
        let spec = build_clock(3, 0.0, 1.0, 0.0).unwrap();
        let basis = time_states(&spec);
        let psi = StateVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            age_rate(&psi, &spec, &basis),
            Err(Error::NotNormalized(_))
        ));
    }
}
