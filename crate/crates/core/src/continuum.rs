//! Continuous-α picture of a rational clock.
//!
//! Here `|α̃⟩ = Σ_i e^{−iE_iα}|E_i⟩` is unnormalized, so the resolution of the
//! identity reads `(1/T)∫_0^T |α̃⟩⟨α̃| dα = 1` with no extra factor. The
//! discrete α-states carry `1/√(p+1)` instead, which is why their weight is
//! `(p+1)/D` rather than `1/D`.

use crate::clock::phase_state;
use crate::error::{Error, Result};
use crate::linalg::{Operator, StateVector, C64};
use crate::povm::RationalSpectrum;
use crate::universe::SystemSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumProbe {
    spectrum: RationalSpectrum,
    nodes: usize,
    alpha0: f64,
}

impl ContinuumProbe {
    /// Requires `nodes ≥ 2(r_p + 1)`.
    pub fn new(spectrum: RationalSpectrum, nodes: usize, alpha0: f64) -> Result<Self> {
        if !alpha0.is_finite() {
            return Err(Error::NonFinite("alpha0"));
        }
        let needed = Self::min_nodes(&spectrum);
        if nodes < needed {
            return Err(Error::GridTooSmall {
                given: nodes,
                needed,
            });
        }
        Ok(Self {
            spectrum,
            nodes,
            alpha0,
        })
    }

    pub fn min_nodes(spectrum: &RationalSpectrum) -> usize {
        2 * (spectrum.max_label() as usize + 1)
    }

    pub fn spectrum(&self) -> &RationalSpectrum {
        &self.spectrum
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn period(&self) -> f64 {
        self.spectrum.period()
    }

    /// Frobenius distance of the trapezoid estimate of `(1/T)∫|α̃⟩⟨α̃|dα` from 1.
    pub fn quadrature_identity(&self) -> f64 {
        trapezoid_identity_residual(&self.spectrum, self.nodes, self.alpha0)
    }
}

/// Trapezoid estimate without the node-count check, for sweeps across the
/// sufficiency threshold.
pub fn trapezoid_identity_residual(spectrum: &RationalSpectrum, nodes: usize, alpha0: f64) -> f64 {
    let dim = spectrum.levels();
    if nodes == 0 {
        return (dim as f64).sqrt();
    }
    let period = spectrum.period();
    let mut acc = Operator::zeros(dim);
    for j in 0..nodes {
        let alpha = alpha0 + j as f64 * period / nodes as f64;
        acc = acc.add(&phase_state(spectrum.energies(), alpha).projector());
    }
    // Normalized phase states carry 1/d inside each projector.
    let acc = acc.scale(C64::new(dim as f64 / nodes as f64, 0.0));
    acc.sub(&Operator::identity(dim)).frobenius_norm()
}

/// Frobenius distance of `(1/T)∫_0^T |α̃⟩⟨α̃| dα` from 1, integrated exactly,
/// with `|α̃⟩` built from the input energies and `T` the fitted period. Zero
/// for exact rational spectra; otherwise measures how far the fit leaves the
/// identity unresolved, independent of any grid.
pub fn continuum_identity_residual(spectrum: &RationalSpectrum) -> f64 {
    let e = spectrum.input_energies();
    let period = spectrum.period();
    let mut total = 0.0;
    for i in 0..e.len() {
        for j in 0..e.len() {
            if i == j {
                continue;
            }
            // (1/T)∫ e^{−iωα} dα over one period.
            let x = 0.5 * (e[i] - e[j]) * period;
            let magnitude = if x == 0.0 { 1.0 } else { (x.sin() / x).abs() };
            total += magnitude * magnitude;
        }
    }
    total.sqrt()
}

/// `Σ_k c_k e^{−iE_kα}|E_k⟩`, normalized.
pub fn phi_alpha(system: &SystemSpec, alpha: f64) -> StateVector {
    let state = system.state_at(alpha);
    state.normalized().unwrap_or(state)
}

/// `‖i(φ(α+h) − φ(α−h))/(2h) − Ĥ_s φ(α)‖`.
pub fn schrodinger_residual(system: &SystemSpec, alpha: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::BadStep(h));
    }
    let forward = phi_alpha(system, alpha + h);
    let backward = phi_alpha(system, alpha - h);
    let derivative = forward.sub(&backward).scale(C64::new(0.0, 0.5 / h));
    let rhs = system.hamiltonian().apply(&phi_alpha(system, alpha));
    Ok(derivative.sub(&rhs).norm())
}

/// `T / 10⁴`.
pub fn default_step(period: f64) -> f64 {
    period / 1e4
}

/// Least-squares slope of `ln residual` against `ln step`.
pub fn observed_order(steps: &[f64], residuals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(residuals)
        .filter(|(h, r)| **h > 0.0 && **r > 0.0)
        .map(|(h, r)| (h.ln(), r.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::BasisKind;
    use crate::povm::rationalize;
    use crate::universe::{solve_constraint, ClockKind, ConstraintOptions, PovmClockParams};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn qubit() -> SystemSpec {
        SystemSpec::from_energies(&[0.0, 1.0], vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap()
    }

    #[test]
    fn quadrature_equally_spaced() {
        let spec = rationalize(&[0.0, 1.0, 2.0], 100).unwrap();
        let probe = ContinuumProbe::new(spec, 16, 0.0).unwrap();
        assert!(probe.quadrature_identity() <= 1e-12);
    }

    #[test]
    fn quadrature_single_level() {
        let spec = RationalSpectrum::from_labels(0.3, 2.0 * PI, vec![0]).unwrap();
        let probe = ContinuumProbe::new(spec, 2, 0.7).unwrap();
        assert_eq!(probe.quadrature_identity(), 0.0);
    }

    #[test]
    fn quadrature_threshold_sweep() {
        let spec = rationalize(&[0.0, 1.0, 2.5], 100).unwrap();
        assert_eq!(ContinuumProbe::min_nodes(&spec), 12);
        assert!(matches!(
            ContinuumProbe::new(spec.clone(), 11, 0.0),
            Err(Error::GridTooSmall {
                given: 11,
                needed: 12
            })
        ));
        // Too few nodes alias the largest label difference.
        assert!(trapezoid_identity_residual(&spec, 5, 0.0) > 0.1);
        for n in 12..40 {
            let probe = ContinuumProbe::new(spec.clone(), n, 0.3).unwrap();
            assert!(probe.quadrature_identity() <= 1e-12, "N = {n}");
        }
    }

    #[test]
    fn phi_alpha_examples() {
        let sys = qubit();
        let at0 = phi_alpha(&sys, 0.0);
        assert!(
            at0.distance(&StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()) < 1e-15
        );

        let at_pi = phi_alpha(&sys, PI);
        let want = StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        assert!((at_pi.fidelity(&want) - 1.0).abs() < 1e-12);

        let sys =
            SystemSpec::from_energies(&[0.5, 1.5, 3.0], vec![c(0.6), c(0.0), c(0.8)]).unwrap();
        let period = rationalize(sys.energies(), 100).unwrap().period();
        let phase = C64::from_polar(1.0, -0.5 * period);
        let wrapped = phi_alpha(&sys, period);
        assert!(wrapped.distance(&phi_alpha(&sys, 0.0).scale(phase)) < 1e-12);
    }

    #[test]
    fn schrodinger_order() {
        let sys = qubit();
        let steps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
        let res: Vec<f64> = steps
            .iter()
            .map(|&h| schrodinger_residual(&sys, 0.4, h).unwrap())
            .collect();
        for w in res.windows(2) {
            assert!((w[0] / w[1] - 4.0).abs() < 0.05);
        }
        let order = observed_order(&steps, &res);
        assert!((order - 2.0).abs() < 0.05, "order {order}");
    }

    #[test]
    fn eigenstate_residual_matches_sine() {
        let e = 1.7;
        let sys = SystemSpec::from_energies(&[0.0, e], vec![c(0.0), c(1.0)]).unwrap();
        for h in [1e-2, 1e-3] {
            let got = schrodinger_residual(&sys, 0.9, h).unwrap();
            let want = e - (e * h).sin() / h;
            assert!((got - want).abs() < 1e-10, "h = {h}");
        }
    }

    #[test]
    fn tiny_step_hits_rounding_floor() {
        let sys = qubit();
        let coarse = schrodinger_residual(&sys, 0.4, 1e-4).unwrap();
        let tiny = schrodinger_residual(&sys, 0.4, 1e-9).unwrap();
        assert!(tiny > coarse);
        assert!(matches!(
            schrodinger_residual(&sys, 0.4, 0.0),
            Err(Error::BadStep(_))
        ));
    }

    #[test]
    fn continuum_residual_vanishes_for_rational_input() {
        let spec = rationalize(&[0.0, 1.0, 2.5], 100).unwrap();
        assert!(continuum_identity_residual(&spec) < 1e-14);
    }

    #[test]
    fn continuum_residual_matches_fine_quadrature() {
        let spec = rationalize(&[0.0, 1.0, 2f64.sqrt()], 12).unwrap();
        let exact = continuum_identity_residual(&spec);
        // Riemann sum with the true energies converges to the closed form.
        let n = 200_000;
        let e = spec.input_energies();
        let mut acc = [[C64::new(0.0, 0.0); 3]; 3];
        for j in 0..n {
            let a = j as f64 * spec.period() / n as f64;
            for (r, row) in acc.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    *v += C64::from_polar(1.0, -(e[r] - e[c]) * a) / n as f64;
                }
            }
        }
        let mut total = 0.0;
        for (r, row) in acc.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let target = if r == c { 1.0 } else { 0.0 };
                total += (v - C64::new(target, 0.0)).norm_sqr();
            }
        }
        assert!(
            (total.sqrt() - exact).abs() < 1e-4,
            "{} vs {exact}",
            total.sqrt()
        );
    }

    #[test]
    fn default_step_value() {
        assert_eq!(default_step(4.0 * PI), 4.0 * PI / 1e4);
    }

    #[test]
    fn discrete_grid_matches_continuum() {
        let sys = SystemSpec::new(
            Operator::from_diagonal(&[0.0, 1.0, 2.5]),
            vec![c(0.6), C64::new(0.0, 0.48), c(0.64)],
        )
        .unwrap();
        let u = solve_constraint(
            &sys,
            &ClockKind::Povm(PovmClockParams::default()),
            &ConstraintOptions::default(),
        )
        .unwrap();
        for size in [24, 40, 64] {
            let basis = u.povm_basis(size, 0.2).unwrap();
            assert_eq!(basis.kind(), BasisKind::Povm);
            for m in 0..basis.len() {
                let discrete = u.relative_state(&basis, m).unwrap();
                assert!(discrete.distance(&phi_alpha(&sys, basis.time(m))) <= 1e-10);
            }
        }
    }
}
