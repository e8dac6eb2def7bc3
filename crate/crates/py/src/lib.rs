//! Python bindings for `paw-core`. States are lists of Python complex numbers
//! and operators are lists of rows.

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use paw_core::arrow::{build_interacting_universe, entropy_trajectory as core_entropy, Bipartition};
use paw_core::clock::{age_rate, time_states, verify_conjugacy, ClockSpec, TimeBasis};
use paw_core::continuum::{continuum_identity_residual, trapezoid_identity_residual};
use paw_core::linalg::{Operator, StateVector};
use paw_core::povm::{self, alpha_states, AlphaGrid, RationalSpectrum};
use paw_core::universe::{
    solve_constraint, ClockKind, ConstraintOptions, HermitianClockParams, PovmClockParams,
    SystemSpec, UniverseState,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn state(amps: Vec<C64>) -> PyResult<StateVector> {
    StateVector::new(amps).map_err(err)
}

fn operator(rows: Vec<Vec<C64>>) -> PyResult<Operator> {
    Operator::from_rows(rows).map_err(err)
}

fn clock_kind(name: &str, dim: Option<usize>) -> PyResult<ClockKind> {
    match name {
        "hermitian" => Ok(ClockKind::Hermitian(HermitianClockParams {
            dim,
            ..HermitianClockParams::default()
        })),
        "povm" => Ok(ClockKind::Povm(PovmClockParams { dim })),
        other => Err(PyValueError::new_err(format!(
            "clock must be \"hermitian\" or \"povm\", got {other:?}"
        ))),
    }
}

/// Equally spaced clock with its orthonormal time states.
#[pyclass(name = "Clock", frozen)]
struct PyClock {
    spec: ClockSpec,
    basis: TimeBasis,
}

#[pymethods]
impl PyClock {
    #[new]
    #[pyo3(signature = (dim, e0=0.0, spacing=1.0, tau0=0.0))]
    fn new(dim: usize, e0: f64, spacing: f64, tau0: f64) -> PyResult<Self> {
        let spec = ClockSpec::new(dim, e0, spacing, tau0).map_err(err)?;
        let basis = time_states(&spec);
        Ok(Self { spec, basis })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    #[getter]
    fn period(&self) -> f64 {
        self.spec.period()
    }

    #[getter]
    fn resolution(&self) -> f64 {
        self.spec.resolution()
    }

    fn energies(&self) -> Vec<f64> {
        self.spec.energies()
    }

    fn grid(&self) -> Vec<f64> {
        self.spec.grid()
    }

    fn time_state(&self, t: f64) -> Vec<C64> {
        self.spec.time_state_at(t).into_amplitudes()
    }

    fn gram_error(&self) -> f64 {
        self.basis.gram_error()
    }

    fn identity_residual(&self) -> f64 {
        self.basis.identity_residual()
    }

    /// `(max time-shift error, max energy-shift error)`.
    fn conjugacy(&self) -> PyResult<(f64, f64)> {
        let r = verify_conjugacy(&self.spec, &self.basis).map_err(err)?;
        Ok((r.max_err_shift_time(), r.max_err_shift_energy()))
    }

    fn age_rate(&self, psi: Vec<C64>) -> PyResult<f64> {
        age_rate(&state(psi)?, &self.spec, &self.basis).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Clock(dim={}, e0={}, spacing={}, tau0={})",
            self.spec.dim(),
            self.spec.e0(),
            self.spec.spacing(),
            self.spec.tau0()
        )
    }
}

/// Spectrum fitted onto an integer lattice `E0 + q·r_k`.
#[pyclass(name = "RationalSpectrum", frozen)]
struct PySpectrum {
    inner: RationalSpectrum,
}

#[pymethods]
impl PySpectrum {
    #[getter]
    fn labels(&self) -> Vec<u64> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn e0(&self) -> f64 {
        self.inner.e0()
    }

    #[getter]
    fn period(&self) -> f64 {
        self.inner.period()
    }

    #[getter]
    fn quantum(&self) -> f64 {
        self.inner.quantum()
    }

    #[getter]
    fn energies(&self) -> Vec<f64> {
        self.inner.energies().to_vec()
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual()
    }

    #[getter]
    fn exact(&self) -> bool {
        self.inner.is_exact()
    }

    #[getter]
    fn min_grid_size(&self) -> usize {
        self.inner.min_grid_size()
    }

    #[pyo3(signature = (size=None, alpha0=0.0))]
    fn povm_identity_residual(&self, size: Option<usize>, alpha0: f64) -> PyResult<f64> {
        let size = size.unwrap_or_else(|| self.inner.default_grid_size());
        let basis = alpha_states(&self.inner, size, alpha0).map_err(err)?;
        Ok(povm::verify_povm_identity(&basis))
    }

    #[pyo3(signature = (nodes, alpha0=0.0))]
    fn quadrature_residual(&self, nodes: usize, alpha0: f64) -> f64 {
        trapezoid_identity_residual(&self.inner, nodes, alpha0)
    }

    fn continuum_residual(&self) -> f64 {
        continuum_identity_residual(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "RationalSpectrum(labels={:?}, e0={}, period={})",
            self.inner.labels(),
            self.inner.e0(),
            self.inner.period()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (energies, max_denominator=1000))]
fn rationalize(energies: Vec<f64>, max_denominator: u64) -> PyResult<PySpectrum> {
    let inner = povm::rationalize(&energies, max_denominator).map_err(err)?;
    Ok(PySpectrum { inner })
}

/// `Σ_m e^{i·energy_sum·α_m}` over a uniform grid of `size` points.
#[pyfunction]
#[pyo3(signature = (size, period, energy_sum, alpha0=0.0))]
fn delta_sum(size: usize, period: f64, energy_sum: f64, alpha0: f64) -> PyResult<C64> {
    let grid = AlphaGrid::new(size, alpha0, period).map_err(err)?;
    Ok(povm::delta_sum(&grid, energy_sum))
}

/// Clock-system state annihilated by the total Hamiltonian, read out in the
/// clock's default basis.
#[pyclass(name = "Universe", frozen)]
struct PyUniverse {
    inner: UniverseState,
    basis: TimeBasis,
}

#[pymethods]
impl PyUniverse {
    #[new]
    #[pyo3(signature = (
        energies=None, hamiltonian=None, coefficients=None, initial_state=None,
        clock="hermitian", dim=None, max_denominator=1000
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        energies: Option<Vec<f64>>,
        hamiltonian: Option<Vec<Vec<C64>>>,
        coefficients: Option<Vec<C64>>,
        initial_state: Option<Vec<C64>>,
        clock: &str,
        dim: Option<usize>,
        max_denominator: u64,
    ) -> PyResult<Self> {
        let h = match (energies, hamiltonian) {
            (Some(e), None) => Operator::from_diagonal(&e),
            (None, Some(rows)) => operator(rows)?,
            _ => {
                return Err(PyValueError::new_err(
                    "give exactly one of energies or hamiltonian",
                ))
            }
        };
        let system = match (coefficients, initial_state) {
            (Some(c), None) => SystemSpec::new(h, c),
            (None, Some(s)) => SystemSpec::from_initial_state(h, &state(s)?),
            _ => {
                return Err(PyValueError::new_err(
                    "give exactly one of coefficients or initial_state",
                ))
            }
        }
        .map_err(err)?;
        let options = ConstraintOptions {
            max_denominator,
            ..ConstraintOptions::default()
        };
        let inner = solve_constraint(&system, &clock_kind(clock, dim)?, &options).map_err(err)?;
        let basis = inner.default_basis().map_err(err)?;
        Ok(Self { inner, basis })
    }

    #[getter]
    fn clock_dim(&self) -> usize {
        self.inner.clock_dim()
    }

    #[getter]
    fn system_dim(&self) -> usize {
        self.inner.system_dim()
    }

    #[getter]
    fn pairing(&self) -> Vec<usize> {
        self.inner.pairing().to_vec()
    }

    #[getter]
    fn period(&self) -> f64 {
        self.inner.clock().period()
    }

    fn times(&self) -> Vec<f64> {
        self.basis.grid().to_vec()
    }

    fn psi(&self) -> Vec<C64> {
        self.inner.psi().amplitudes().to_vec()
    }

    fn constraint_residual(&self) -> f64 {
        self.inner.constraint_residual()
    }

    fn relative_state(&self, m: usize) -> PyResult<Vec<C64>> {
        let s = self.inner.relative_state(&self.basis, m).map_err(err)?;
        Ok(s.into_amplitudes())
    }

    /// Largest infidelity against unitary evolution over the clock grid.
    fn verify_schrodinger(&self) -> PyResult<f64> {
        self.inner.verify_schrodinger(&self.basis).map_err(err)
    }

    fn history_error(&self) -> PyResult<f64> {
        self.inner.history_error(&self.basis).map_err(err)
    }

    /// `(conditional, born)` for outcome index `outcome` of `observable`.
    fn conditional_probability(
        &self,
        m: usize,
        observable: Vec<Vec<C64>>,
        outcome: usize,
    ) -> PyResult<(f64, f64)> {
        let b = self
            .inner
            .conditional_probability(&self.basis, m, &operator(observable)?, outcome)
            .map_err(err)?;
        Ok((b.conditional, b.born))
    }
}

/// `(t_m, S(ρ_1))` along the clock grid for `Ĥ` on a two-part system
/// started in `first ⊗ second`.
#[pyfunction]
#[pyo3(signature = (hamiltonian, first, second, clock="povm", max_denominator=1000))]
fn entropy_trajectory(
    hamiltonian: Vec<Vec<C64>>,
    first: Vec<C64>,
    second: Vec<C64>,
    clock: &str,
    max_denominator: u64,
) -> PyResult<Vec<(f64, f64)>> {
    let bip = Bipartition::new(operator(hamiltonian)?, state(first)?, state(second)?)
        .map_err(err)?;
    let u = build_interacting_universe(&bip, &clock_kind(clock, None)?, max_denominator, 0.0)
        .map_err(err)?;
    let basis = u.default_basis().map_err(err)?;
    let points = core_entropy(&u, &basis, bip.dims()).map_err(err)?;
    Ok(points.iter().map(|p| (p.time, p.entropy)).collect())
}

#[pymodule]
fn paw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyClock>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyUniverse>()?;
    m.add_function(wrap_pyfunction!(rationalize, m)?)?;
    m.add_function(wrap_pyfunction!(delta_sum, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_trajectory, m)?)?;
    Ok(())
}
