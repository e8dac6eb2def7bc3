//! Clocks with unequally spaced levels whose gaps have rational ratios.
//!
//! Writing the levels as `E_i = E0 + r_i·2π/T` with integer labels `r_i`
//! (`r_0 = 0`), the states
//!
//! ```text
//! |α_m⟩ = (p+1)^{-1/2} Σ_i e^{−i E_i α_m} |E_i⟩,   α_m = α0 + m·T/D
//! ```
//!
//! are normalized but not orthogonal, and `(p+1)/D · Σ_m |α_m⟩⟨α_m| = 1` as
//! soon as every label difference is below `D`, i.e. `D ≥ r_p + 1`.

use std::f64::consts::TAU;

use crate::clock::{phase_state, BasisKind, TimeBasis};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Relative error below which a continued-fraction convergent is taken as exact.
pub const RATIONAL_TOL: f64 = 1e-12;

const LABEL_LIMIT: u128 = 1 << 62;

/// A spectrum expressed on an integer lattice `E_i = E0 + r_i·2π/T`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSpectrum {
    e0: f64,
    period: f64,
    labels: Vec<u64>,
    energies: Vec<f64>,
    input: Vec<f64>,
    residual: f64,
}

impl RationalSpectrum {
    /// An exactly rational spectrum from its integer labels.
    pub fn from_labels(e0: f64, period: f64, labels: Vec<u64>) -> Result<Self> {
        if !e0.is_finite() {
            return Err(Error::NonFinite("e0"));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::NonFinite("period"));
        }
        if labels.first() != Some(&0) || labels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadLabels);
        }
        if labels.iter().any(|&r| r as u128 > LABEL_LIMIT) {
            return Err(Error::LcmOverflow);
        }
        let quantum = TAU / period;
        let energies: Vec<f64> = labels.iter().map(|&r| e0 + r as f64 * quantum).collect();
        Ok(Self {
            e0,
            period,
            labels,
            input: energies.clone(),
            energies,
            residual: 0.0,
        })
    }

    /// Number of levels, `p + 1`.
    pub fn levels(&self) -> usize {
        self.labels.len()
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Lattice spacing `2π/T`.
    pub fn quantum(&self) -> f64 {
        TAU / self.period
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Largest label `r_p`.
    pub fn max_label(&self) -> u64 {
        *self.labels.last().expect("at least one level")
    }

    /// Lattice energies.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// The energies this spectrum was fitted to.
    pub fn input_energies(&self) -> &[f64] {
        &self.input
    }

    /// `max_i |energies[i] − input[i]|`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn is_exact(&self) -> bool {
        self.residual == 0.0
    }

    /// Smallest grid that resolves the identity, `r_p + 1`.
    pub fn min_grid_size(&self) -> usize {
        self.max_label() as usize + 1
    }

    /// `max(r_p + 1, 4·(p + 1))`.
    pub fn default_grid_size(&self) -> usize {
        self.min_grid_size().max(4 * self.levels())
    }
}

/// Best continued-fraction convergent `num/den` of `x ≥ 0` with `den ≤ max_den`.
pub fn best_convergent(x: f64, max_den: u64) -> (u64, u64) {
    let (mut h1, mut h2): (u128, u128) = (1, 0);
    let (mut k1, mut k2): (u128, u128) = (0, 1);
    let mut best = (x.floor() as u64, 1u64);
    let mut frac = x;
    loop {
        let a = frac.floor();
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let h = a * h1 + h2;
        let k = a * k1 + k2;
        if k > max_den as u128 || h > LABEL_LIMIT {
            break;
        }
        best = (h as u64, k as u64);
        if (x - h as f64 / k as f64).abs() <= RATIONAL_TOL * x.max(1.0) {
            break;
        }
        let rem = frac - a as f64;
        if rem <= 0.0 {
            break;
        }
        frac = 1.0 / rem;
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
    best
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Fits an increasing spectrum onto an integer lattice.
///
/// Each ratio `(E_i − E0)/(E1 − E0)` is replaced by its best convergent
/// `C_i/B_i` with `B_i ≤ max_den`; `r_1` is the lcm of the `B_i` and
/// `r_i = r_1·C_i/B_i`. The ground level and `E1` are kept exactly.
pub fn rationalize(energies: &[f64], max_den: u64) -> Result<RationalSpectrum> {
    if energies.len() < 2 {
        return Err(Error::TooFewLevels {
            needed: 2,
            got: energies.len(),
        });
    }
    if max_den == 0 {
        return Err(Error::BadMaxDenominator);
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("energies"));
    }
    if let Some(i) = (1..energies.len()).find(|&i| energies[i] <= energies[i - 1]) {
        return Err(Error::NotIncreasing(i));
    }
    let e0 = energies[0];
    let gap = energies[1] - e0;

    let fractions: Vec<(u64, u64)> = energies[2..]
        .iter()
        .map(|&e| best_convergent((e - e0) / gap, max_den))
        .collect();
    let mut r1: u128 = 1;
    for &(_, den) in &fractions {
        let den = den as u128;
        r1 = r1 / gcd(r1, den) * den;
        if r1 > LABEL_LIMIT {
            return Err(Error::LcmOverflow);
        }
    }
    let mut labels = vec![0u64, r1 as u64];
    for &(num, den) in &fractions {
        let r = r1 / den as u128 * num as u128;
        if r > LABEL_LIMIT {
            return Err(Error::LcmOverflow);
        }
        labels.push(r as u64);
    }
    if let Some(i) = (1..labels.len()).find(|&i| labels[i] <= labels[i - 1]) {
        return Err(Error::LevelsCollapsed(i - 1, i));
    }

    let quantum = gap / r1 as f64;
    let fitted: Vec<f64> = labels
        .iter()
        .enumerate()
        .map(|(i, &r)| match i {
            0 => e0,
            1 => energies[1],
            _ => e0 + r as f64 * quantum,
        })
        .collect();
    let residual = fitted
        .iter()
        .zip(energies)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(RationalSpectrum {
        e0,
        period: TAU * r1 as f64 / gap,
        labels,
        energies: fitted,
        input: energies.to_vec(),
        residual,
    })
}

/// Uniform readings `α_m = α0 + m·T/D`, `m = 0..D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaGrid {
    size: usize,
    alpha0: f64,
    period: f64,
}

impl AlphaGrid {
    pub fn new(size: usize, alpha0: f64, period: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::GridTooSmall {
                given: 0,
                needed: 1,
            });
        }
        if !alpha0.is_finite() {
            return Err(Error::NonFinite("alpha0"));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::NonFinite("period"));
        }
        Ok(Self {
            size,
            alpha0,
            period,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn value(&self, m: usize) -> f64 {
        self.alpha0 + m as f64 * self.period / self.size as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.size).map(|m| self.value(m)).collect()
    }
}

/// α-states of arbitrary clock levels on a given grid, weighted by `(p+1)/D`.
///
/// No completeness condition is checked; use [`alpha_states`] for that.
pub fn alpha_states_for(energies: &[f64], grid: &AlphaGrid) -> TimeBasis {
    let values = grid.values();
    let states = values.iter().map(|&a| phase_state(energies, a)).collect();
    let weight = energies.len() as f64 / grid.size() as f64;
    TimeBasis::new(BasisKind::Povm, states, values, weight, grid.period())
}

/// The POVM time basis of a rational spectrum with `D ≥ r_p + 1` readings.
pub fn alpha_states(spec: &RationalSpectrum, size: usize, alpha0: f64) -> Result<TimeBasis> {
    let needed = spec.min_grid_size();
    if size < needed {
        return Err(Error::GridTooSmall {
            given: size,
            needed,
        });
    }
    let grid = AlphaGrid::new(size, alpha0, spec.period())?;
    Ok(alpha_states_for(spec.energies(), &grid))
}

/// α-states built from the spectrum's original (unfitted) energies on the
/// lattice grid. Completeness holds only up to the fitting error.
pub fn approximate_alpha_states(
    spec: &RationalSpectrum,
    size: usize,
    alpha0: f64,
) -> Result<TimeBasis> {
    let needed = spec.min_grid_size();
    if size < needed {
        return Err(Error::GridTooSmall {
            given: size,
            needed,
        });
    }
    let grid = AlphaGrid::new(size, alpha0, spec.period())?;
    Ok(alpha_states_for(spec.input_energies(), &grid))
}

/// Frobenius norm of `w·Σ_m |α_m⟩⟨α_m| − 1`.
pub fn verify_povm_identity(basis: &TimeBasis) -> f64 {
    basis.identity_residual()
}

/// `Σ_m e^{−i α_m ε}` over the grid.
pub fn delta_sum(grid: &AlphaGrid, energy_sum: f64) -> C64 {
    (0..grid.size())
        .map(|m| C64::from_polar(1.0, -grid.value(m) * energy_sum))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{build_clock, time_states};
    use std::f64::consts::PI;

    #[test]
    fn five_halves() {
        let spec = rationalize(&[0.0, 1.0, 2.5], 100).unwrap();
        assert_eq!(spec.labels(), &[0, 2, 5]);
        assert_eq!(spec.period(), 4.0 * PI);
        assert_eq!(spec.residual(), 0.0);
        assert_eq!(spec.energies(), &[0.0, 1.0, 2.5]);
    }

    #[test]
    fn equally_spaced() {
        let spec = rationalize(&[0.0, 1.0, 2.0], 100).unwrap();
        assert_eq!(spec.labels(), &[0, 1, 2]);
        assert_eq!(spec.period(), 2.0 * PI);
    }

    #[test]
    fn sqrt2_convergent() {
        let s2 = 2f64.sqrt();
        let spec = rationalize(&[0.0, 1.0, s2], 50).unwrap();
        // Convergents of √2: 1, 3/2, 7/5, 17/12, 41/29, 99/70.
        assert_eq!(spec.labels(), &[0, 29, 41]);
        assert!(spec.residual() > 0.0);
        assert!(spec.residual() <= 1.0 / (29.0 * 29.0));
        let basis = approximate_alpha_states(&spec, spec.default_grid_size(), 0.0).unwrap();
        assert!(verify_povm_identity(&basis) > 1e-6);
    }

    #[test]
    fn convergent_sequence() {
        let s2 = 2f64.sqrt();
        let expected = [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70)];
        for &(num, den) in &expected {
            assert_eq!(best_convergent(s2, den), (num, den));
        }
        assert_eq!(best_convergent(s2, 69), (41, 29));
    }

    #[test]
    fn repeating_decimal_is_recognized() {
        assert_eq!(best_convergent(0.7 / 0.3, 1_000_000), (7, 3));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            rationalize(&[0.0, 1.0, 1.0], 10),
            Err(Error::NotIncreasing(2))
        );
        assert_eq!(
            rationalize(&[1.0], 10),
            Err(Error::TooFewLevels { needed: 2, got: 1 })
        );
        assert_eq!(rationalize(&[0.0, 1.0], 0), Err(Error::BadMaxDenominator));
        assert_eq!(
            rationalize(&[0.0, 1.0, 1.01], 5),
            Err(Error::LevelsCollapsed(1, 2))
        );
    }

    #[test]
    fn lcm_overflow_is_reported() {
        let primes = [10007.0, 10009.0, 10037.0, 10039.0, 10061.0];
        let mut energies = vec![0.0, 1.0];
        energies.extend(
            primes
                .iter()
                .enumerate()
                .map(|(i, p)| (i + 2) as f64 + 1.0 / p),
        );
        assert_eq!(rationalize(&energies, 1_000_000), Err(Error::LcmOverflow));
    }

    #[test]
    fn six_alpha_states_for_three_levels() {
        let spec = rationalize(&[0.0, 1.0, 2.5], 100).unwrap();
        let basis = alpha_states(&spec, 6, 0.0).unwrap();
        assert_eq!(basis.len(), 6);
        assert_eq!(basis.space_dim(), 3);
        assert_eq!(basis.weight(), 0.5);
        for s in basis.states() {
            assert!((s.norm() - 1.0).abs() < 1e-15);
        }
        assert!(basis.gram_error() > 0.1, "α-states are not orthogonal");
        assert!(verify_povm_identity(&basis) <= 1e-12);
    }

    #[test]
    fn grid_one_short_fails_completeness() {
        let spec = rationalize(&[0.0, 1.0, 2.5], 100).unwrap();
        assert!(matches!(
            alpha_states(&spec, 5, 0.0),
            Err(Error::GridTooSmall {
                given: 5,
                needed: 6
            })
        ));
        let grid = AlphaGrid::new(5, 0.0, spec.period()).unwrap();
        let basis = alpha_states_for(spec.energies(), &grid);
        assert!(verify_povm_identity(&basis) > 0.5);
    }

    #[test]
    fn overcomplete_equally_spaced() {
        let spec = rationalize(&[0.0, 1.0, 2.0, 3.0], 10).unwrap();
        let basis = alpha_states(&spec, 5, 0.3).unwrap();
        assert_eq!(basis.weight(), 4.0 / 5.0);
        assert!(verify_povm_identity(&basis) < 1e-12);
    }

    #[test]
    fn equally_spaced_minimal_grid_is_clock_basis() {
        let spec = rationalize(&[0.0, 1.0, 2.0], 10).unwrap();
        let povm = alpha_states(&spec, 3, 0.0).unwrap();
        let clock = time_states(&build_clock(3, 0.0, 1.0, 0.0).unwrap());
        assert!(povm.gram_error() < 1e-12);
        for m in 0..3 {
            assert!(povm.state(m).distance(clock.state(m)) < 1e-12);
        }
    }

    #[test]
    fn delta_sum_cases() {
        let grid = AlphaGrid::new(6, 0.0, 4.0 * PI).unwrap();
        let q = 2.0 * PI / grid.period();
        assert_eq!(delta_sum(&grid, 0.0), C64::new(6.0, 0.0));
        assert!(delta_sum(&grid, q).norm() <= 1e-12);
        assert!((delta_sum(&grid, 6.0 * q) - C64::new(6.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn from_labels_validation() {
        assert!(RationalSpectrum::from_labels(0.0, 1.0, vec![0, 2, 2]).is_err());
        assert!(RationalSpectrum::from_labels(0.0, 1.0, vec![1, 2]).is_err());
        assert!(RationalSpectrum::from_labels(0.0, -1.0, vec![0, 2]).is_err());
        let single = RationalSpectrum::from_labels(0.5, 1.0, vec![0]).unwrap();
        assert_eq!(single.levels(), 1);
        assert_eq!(single.energies(), &[0.5]);
    }
}
