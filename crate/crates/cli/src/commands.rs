use paw_core::arrow::{build_interacting_universe, entropy_trajectory, Bipartition};
use paw_core::clock::{age_rate, time_states, verify_conjugacy, ClockSpec, TimeBasis};
use paw_core::continuum::{
    continuum_identity_residual, default_step, observed_order, schrodinger_residual, ContinuumProbe,
};
use paw_core::linalg::{Operator, StateVector, C64};
use paw_core::povm::{
    alpha_states, approximate_alpha_states, delta_sum, rationalize, verify_povm_identity,
    AlphaGrid, RationalSpectrum,
};
use paw_core::random::random_hermitian;
use paw_core::universe::{
    solve_constraint, ClockKind, ConstraintOptions, HermitianClockParams, PovmClockParams,
    SystemSpec, UniverseClock, UniverseState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::{to_operator, to_state, ClockConfig, ExperimentConfig, SystemConfig};
use crate::output::{summary, Csv};
use crate::{Bound, Check, CliError, Command, RunOptions, RunOutput};

const ORDER_BAND: (f64, f64) = (1.8, 2.2);

struct Limits {
    scale: f64,
    overrides: crate::config::Tolerances,
}

impl Limits {
    fn at_most(&self, name: &str, value: f64, given: Option<f64>, default: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            bound: Bound::AtMost(given.unwrap_or(default) * self.scale),
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub(crate) fn dispatch(
    command: Command,
    cfg: &ExperimentConfig,
    options: &RunOptions,
) -> Result<RunOutput, CliError> {
    let limits = Limits {
        scale: options.tolerance_scale,
        overrides: cfg.tolerances.clone(),
    };
    match command {
        Command::ClockVerify => clock_verify(cfg, &limits),
        Command::PovmVerify => povm_verify(cfg, &limits),
        Command::UniverseEvolve => universe_evolve(cfg, &limits),
        Command::UniverseBorn => universe_born(cfg, &limits, options.seed),
        Command::ArrowEntropy => arrow_entropy(cfg, &limits),
        Command::ContinuumCheck => continuum_check(cfg, &limits),
    }
}

fn finish(
    command: Command,
    summary_name: &str,
    fields: Map<String, Value>,
    mut tables: Vec<crate::Artifact>,
    checks: Vec<Check>,
    scale: f64,
) -> RunOutput {
    tables.push(summary(
        summary_name,
        command.name(),
        fields,
        &checks,
        scale,
    ));
    RunOutput {
        artifacts: tables,
        checks,
    }
}

fn clock_verify(cfg: &ExperimentConfig, lim: &Limits) -> Result<RunOutput, CliError> {
    let ClockConfig::Hermitian {
        dim,
        e0,
        spacing,
        tau0,
        max_denominator: _,
    } = &cfg.clock
    else {
        return Err(config_err("`clock verify` needs a hermitian clock"));
    };
    let dim = dim.ok_or_else(|| config_err("`clock.dim` is required"))?;
    let spec = ClockSpec::new(
        dim,
        e0.unwrap_or(0.0),
        spacing.unwrap_or(1.0),
        tau0.unwrap_or(0.0),
    )?;
    let basis = time_states(&spec);
    let report = verify_conjugacy(&spec, &basis)?;

    let mut ages = Csv::new(&["n", "energy", "age_rate"]);
    let mut worst_age: f64 = 0.0;
    for n in 0..dim {
        let rate = age_rate(&spec.energy_state(n), &spec, &basis)?;
        worst_age = worst_age.max(rate.abs());
        ages.row(&[n.into(), spec.energy(n).into(), rate.into()]);
    }
    let mut conj = Csv::new(&["index", "time_shift_error", "energy_shift_error"]);
    for i in 0..dim {
        conj.row(&[
            i.into(),
            report.time_shift_errors[i].into(),
            report.energy_shift_errors[i].into(),
        ]);
    }
    let mut sup = vec![C64::new(0.0, 0.0); dim];
    sup[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    sup[1] = sup[0];
    let moving = age_rate(
        &StateVector::new(sup).map_err(paw_core::Error::from)?,
        &spec,
        &basis,
    )?;

    let t = &lim.overrides;
    let checks = vec![
        lim.at_most("gram_error", basis.gram_error(), t.gram, 1e-10),
        lim.at_most(
            "identity_residual",
            basis.identity_residual(),
            t.identity,
            1e-10,
        ),
        lim.at_most(
            "max_err_shift_time",
            report.max_err_shift_time(),
            t.conjugacy,
            1e-10,
        ),
        lim.at_most(
            "max_err_shift_energy",
            report.max_err_shift_energy(),
            t.conjugacy,
            1e-10,
        ),
        lim.at_most("max_eigenstate_age_rate", worst_age, t.age_rate, 1e-12),
    ];
    let mut fields = Map::new();
    fields.insert("dim".into(), json!(dim));
    fields.insert("e0".into(), json!(spec.e0()));
    fields.insert("spacing".into(), json!(spec.spacing()));
    fields.insert("tau0".into(), json!(spec.tau0()));
    fields.insert("period".into(), json!(spec.period()));
    fields.insert("resolution".into(), json!(spec.resolution()));
    fields.insert("superposition_age_rate".into(), json!(moving));
    Ok(finish(
        Command::ClockVerify,
        "clock_summary.json",
        fields,
        vec![
            ages.into_artifact("age_rate.csv"),
            conj.into_artifact("conjugacy.csv"),
        ],
        checks,
        lim.scale,
    ))
}

fn is_exact(spec: &RationalSpectrum) -> bool {
    let scale = spec
        .input_energies()
        .iter()
        .fold(1.0f64, |m, e| m.max(e.abs()));
    spec.residual() <= 1e-12 * scale
}

fn spectrum_fields(fields: &mut Map<String, Value>, spec: &RationalSpectrum) {
    fields.insert("labels".into(), json!(spec.labels()));
    fields.insert("period".into(), json!(spec.period()));
    fields.insert("quantum".into(), json!(spec.quantum()));
    fields.insert("fitted_energies".into(), json!(spec.energies()));
    fields.insert("rationalization_residual".into(), json!(spec.residual()));
    fields.insert("exact".into(), json!(is_exact(spec)));
}

fn povm_verify(cfg: &ExperimentConfig, lim: &Limits) -> Result<RunOutput, CliError> {
    let ClockConfig::Povm {
        energies,
        dim,
        grid_size,
        alpha0,
        max_denominator: _,
    } = &cfg.clock
    else {
        return Err(config_err("`povm verify` needs a povm clock"));
    };
    if dim.is_some() {
        return Err(config_err("`clock.dim` is not used by `povm verify`"));
    }
    let energies = energies
        .as_ref()
        .ok_or_else(|| config_err("`clock.energies` is required"))?;
    let spec = rationalize(energies, cfg.clock.max_denominator())?;
    let size = grid_size.unwrap_or_else(|| spec.default_grid_size());
    let alpha0 = alpha0.unwrap_or(0.0);
    let exact = is_exact(&spec);
    let basis = if exact {
        alpha_states(&spec, size, alpha0)?
    } else {
        approximate_alpha_states(&spec, size, alpha0)?
    };
    let povm_residual = verify_povm_identity(&basis);

    let grid = AlphaGrid::new(size, alpha0, spec.period())?;
    let top = spec.max_label() as i64;
    let mut table = Csv::new(&["delta_r", "energy_sum", "re", "im", "abs", "expected"]);
    let mut worst_delta: f64 = 0.0;
    for dr in -top..=top {
        let energy_sum = dr as f64 * spec.quantum();
        let value = delta_sum(&grid, energy_sum);
        let expected = if dr.rem_euclid(size as i64) == 0 {
            size as f64
        } else {
            0.0
        };
        worst_delta = worst_delta.max((value - C64::new(expected, 0.0)).norm());
        table.row(&[
            dr.into(),
            energy_sum.into(),
            value.re.into(),
            value.im.into(),
            value.norm().into(),
            expected.into(),
        ]);
    }

    let t = &lim.overrides;
    let mut checks = vec![lim.at_most("max_delta_sum_error", worst_delta, t.delta_sum, 1e-10)];
    if exact {
        checks.push(lim.at_most(
            "povm_identity_residual",
            povm_residual,
            t.povm_identity,
            1e-10,
        ));
    }
    let mut fields = Map::new();
    spectrum_fields(&mut fields, &spec);
    fields.insert("grid_size".into(), json!(size));
    fields.insert("alpha0".into(), json!(alpha0));
    fields.insert("weight".into(), json!(basis.weight()));
    fields.insert("gram_error".into(), json!(basis.gram_error()));
    fields.insert("povm_identity_residual".into(), json!(povm_residual));
    Ok(finish(
        Command::PovmVerify,
        "povm_summary.json",
        fields,
        vec![table.into_artifact("delta_sums.csv")],
        checks,
        lim.scale,
    ))
}

fn build_hamiltonian(sys: &SystemConfig) -> Result<Operator, CliError> {
    match (&sys.energies, &sys.hamiltonian) {
        (Some(e), None) => {
            if e.is_empty() {
                return Err(config_err("`system.energies` is empty"));
            }
            if e.iter().any(|x| !x.is_finite()) {
                return Err(config_err("`system.energies` must be finite"));
            }
            Ok(Operator::from_diagonal(e))
        }
        (None, Some(rows)) => to_operator(rows, "system.hamiltonian"),
        _ => Err(config_err(
            "`system` needs exactly one of `energies` and `hamiltonian`",
        )),
    }
}

fn build_system(cfg: &ExperimentConfig) -> Result<SystemSpec, CliError> {
    let sys = cfg.system()?;
    let h = build_hamiltonian(sys)?;
    match (&sys.coefficients, &sys.initial_state) {
        (Some(c), None) => Ok(SystemSpec::new(h, c.iter().map(|&v| v.into()).collect())?),
        (None, Some(s)) => Ok(SystemSpec::from_initial_state(
            h,
            &to_state(s, "system.initial_state")?,
        )?),
        _ => Err(config_err(
            "`system` needs exactly one of `coefficients` and `initial_state`",
        )),
    }
}

/// Clock construction parameters and the time-basis settings.
struct UniverseSetup {
    kind: ClockKind,
    grid_size: Option<usize>,
    origin: f64,
}

fn universe_setup(cfg: &ExperimentConfig) -> Result<UniverseSetup, CliError> {
    match &cfg.clock {
        ClockConfig::Hermitian {
            dim,
            e0,
            spacing,
            tau0,
            max_denominator: _,
        } => Ok(UniverseSetup {
            kind: ClockKind::Hermitian(HermitianClockParams {
                dim: *dim,
                e0: *e0,
                spacing: *spacing,
                tau0: tau0.unwrap_or(0.0),
            }),
            grid_size: None,
            origin: tau0.unwrap_or(0.0),
        }),
        ClockConfig::Povm {
            energies,
            dim,
            grid_size,
            alpha0,
            max_denominator: _,
        } => {
            if energies.is_some() {
                return Err(config_err(
                    "`clock.energies` is derived from the system here; remove it",
                ));
            }
            Ok(UniverseSetup {
                kind: ClockKind::Povm(PovmClockParams { dim: *dim }),
                grid_size: *grid_size,
                origin: alpha0.unwrap_or(0.0),
            })
        }
        ClockConfig::Continuum { .. } => Err(config_err(
            "universe and arrow commands need a hermitian or povm clock",
        )),
    }
}

fn universe_basis(u: &UniverseState, setup: &UniverseSetup) -> Result<TimeBasis, CliError> {
    Ok(match u.clock() {
        UniverseClock::Hermitian(_) => u.default_basis()?,
        UniverseClock::Povm(spec) => u.povm_basis(
            setup.grid_size.unwrap_or_else(|| spec.default_grid_size()),
            setup.origin,
        )?,
    })
}

fn universe_fields(u: &UniverseState, basis: &TimeBasis) -> Map<String, Value> {
    let mut fields = Map::new();
    let (kind, extra) = match u.clock() {
        UniverseClock::Hermitian(spec) => (
            "hermitian",
            json!({"e0": spec.e0(), "spacing": spec.spacing(), "tau0": spec.tau0()}),
        ),
        UniverseClock::Povm(spec) => ("povm", json!({"labels": spec.labels(), "e0": spec.e0()})),
    };
    fields.insert("clock_kind".into(), json!(kind));
    fields.insert("clock".into(), extra);
    fields.insert("clock_dim".into(), json!(u.clock_dim()));
    fields.insert("system_dim".into(), json!(u.system_dim()));
    fields.insert("period".into(), json!(u.clock().period()));
    fields.insert("grid_size".into(), json!(basis.len()));
    fields.insert("pairing".into(), json!(u.pairing()));
    fields.insert("pairing_residual".into(), json!(u.pairing_residual()));
    fields.insert("constraint_residual".into(), json!(u.constraint_residual()));
    fields
}

fn solve(cfg: &ExperimentConfig, setup: &UniverseSetup) -> Result<UniverseState, CliError> {
    if cfg.bipartition.is_some() {
        return Err(config_err("`bipartition` is only used by `arrow entropy`"));
    }
    let system = build_system(cfg)?;
    let options = ConstraintOptions {
        max_denominator: cfg.clock.max_denominator(),
        ..ConstraintOptions::default()
    };
    Ok(solve_constraint(&system, &setup.kind, &options)?)
}

fn universe_evolve(cfg: &ExperimentConfig, lim: &Limits) -> Result<RunOutput, CliError> {
    let setup = universe_setup(cfg)?;
    let u = solve(cfg, &setup)?;
    let basis = universe_basis(&u, &setup)?;
    let traj = u.trajectory(&basis)?;
    let history = u.history_error(&basis)?;

    let mut table = Csv::new(&["m", "t_m", "norm", "infidelity"]);
    for (m, p) in traj.points.iter().enumerate() {
        table.row(&[m.into(), p.time.into(), p.norm.into(), p.infidelity.into()]);
    }
    let t = &lim.overrides;
    let checks = vec![
        lim.at_most(
            "constraint_residual",
            u.constraint_residual(),
            t.constraint,
            1e-9,
        ),
        lim.at_most("max_infidelity", traj.max_infidelity(), t.infidelity, 1e-10),
        lim.at_most("history_error", history, t.history, 1e-10),
    ];
    let mut fields = universe_fields(&u, &basis);
    fields.insert("max_norm_error".into(), json!(traj.max_norm_error()));
    Ok(finish(
        Command::UniverseEvolve,
        "universe_summary.json",
        fields,
        vec![table.into_artifact("trajectory.csv")],
        checks,
        lim.scale,
    ))
}

fn universe_born(cfg: &ExperimentConfig, lim: &Limits, seed: u64) -> Result<RunOutput, CliError> {
    let setup = universe_setup(cfg)?;
    let u = solve(cfg, &setup)?;
    let basis = universe_basis(&u, &setup)?;
    let observables = match (&cfg.observable, cfg.random_observables) {
        (Some(rows), None) => vec![to_operator(rows, "observable")?],
        (None, count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count.unwrap_or(1))
                .map(|_| random_hermitian(&mut rng, u.system_dim()))
                .collect()
        }
        (Some(_), Some(_)) => {
            return Err(config_err(
                "give either `observable` or `random_observables`, not both",
            ))
        }
    };

    let mut table = Csv::new(&[
        "observable",
        "m",
        "t_m",
        "outcome",
        "p_conditional",
        "p_born",
        "abs_diff",
    ]);
    let mut worst: f64 = 0.0;
    for (i, obs) in observables.iter().enumerate() {
        for m in 0..basis.len() {
            for a in 0..u.system_dim() {
                let c = u.conditional_probability(&basis, m, obs, a)?;
                worst = worst.max(c.discrepancy());
                table.row(&[
                    i.into(),
                    m.into(),
                    basis.time(m).into(),
                    a.into(),
                    c.conditional.into(),
                    c.born.into(),
                    c.discrepancy().into(),
                ]);
            }
        }
    }
    let checks = vec![lim.at_most("max_born_discrepancy", worst, lim.overrides.born, 1e-10)];
    let mut fields = universe_fields(&u, &basis);
    fields.insert("observables".into(), json!(observables.len()));
    if cfg.observable.is_none() {
        fields.insert("seed".into(), json!(seed));
    }
    Ok(finish(
        Command::UniverseBorn,
        "born_summary.json",
        fields,
        vec![table.into_artifact("born.csv")],
        checks,
        lim.scale,
    ))
}

fn arrow_entropy(cfg: &ExperimentConfig, lim: &Limits) -> Result<RunOutput, CliError> {
    let setup = universe_setup(cfg)?;
    let sys = cfg.system()?;
    if sys.coefficients.is_some() || sys.initial_state.is_some() {
        return Err(config_err(
            "`arrow entropy` takes its initial state from `bipartition`",
        ));
    }
    let bip_cfg = cfg
        .bipartition
        .as_ref()
        .ok_or_else(|| config_err("`bipartition` is required"))?;
    let bip = Bipartition::new(
        build_hamiltonian(sys)?,
        to_state(&bip_cfg.first, "bipartition.first")?,
        to_state(&bip_cfg.second, "bipartition.second")?,
    )?;
    let u =
        build_interacting_universe(&bip, &setup.kind, cfg.clock.max_denominator(), setup.origin)?;
    let basis = universe_basis(&u, &setup)?;
    let dims = bip.dims();
    let traj = entropy_trajectory(&u, &basis, dims)?;

    let mut header = vec!["m", "t_m", "entropy"];
    if cfg.mutual_information {
        header.push("mutual_information");
    }
    let mut table = Csv::new(&header);
    let ceiling = (dims.0.min(dims.1) as f64).ln();
    let mut overshoot: f64 = 0.0;
    let mut asymmetry: f64 = 0.0;
    let (mut peak, mut peak_time) = (f64::NEG_INFINITY, 0.0);
    for (m, p) in traj.iter().enumerate() {
        let mut row = vec![m.into(), p.time.into(), p.entropy.into()];
        if cfg.mutual_information {
            row.push(p.mutual_information.into());
        }
        table.row(&row);
        overshoot = overshoot.max(p.entropy - ceiling).max(-p.entropy);
        asymmetry = asymmetry.max((p.entropy - p.entropy_observed).abs());
        if p.entropy > peak {
            (peak, peak_time) = (p.entropy, p.time);
        }
    }
    let tol = lim.overrides.entropy;
    let checks = vec![
        lim.at_most("initial_entropy", traj[0].entropy, tol, 1e-10),
        lim.at_most("entropy_bound_violation", overshoot.max(0.0), tol, 1e-10),
        lim.at_most("entropy_asymmetry", asymmetry, tol, 1e-10),
    ];
    let mut fields = universe_fields(&u, &basis);
    fields.insert("dims".into(), json!([dims.0, dims.1]));
    fields.insert("peak_entropy".into(), json!(peak));
    fields.insert("peak_time".into(), json!(peak_time));
    fields.insert("entropy_ceiling".into(), json!(ceiling));
    Ok(finish(
        Command::ArrowEntropy,
        "arrow_summary.json",
        fields,
        vec![table.into_artifact("entropy.csv")],
        checks,
        lim.scale,
    ))
}

fn continuum_check(cfg: &ExperimentConfig, lim: &Limits) -> Result<RunOutput, CliError> {
    let ClockConfig::Continuum {
        energies,
        nodes,
        alpha0,
        max_denominator: _,
        step,
    } = &cfg.clock
    else {
        return Err(config_err("`continuum check` needs a continuum clock"));
    };
    let spec = rationalize(energies, cfg.clock.max_denominator())?;
    let nodes = nodes.unwrap_or_else(|| ContinuumProbe::min_nodes(&spec));
    let alpha0 = alpha0.unwrap_or(0.0);
    let probe = ContinuumProbe::new(spec.clone(), nodes, alpha0)?;
    let quadrature = probe.quadrature_identity();

    let system = match &cfg.system {
        Some(_) => build_system(cfg)?,
        None => {
            let n = energies.len();
            let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
            SystemSpec::from_energies(energies, vec![amp; n])?
        }
    };
    let base = step.unwrap_or_else(|| default_step(spec.period()));
    if !(base.is_finite() && base > 0.0) {
        return Err(config_err("`clock.step` must be positive"));
    }
    let steps: Vec<f64> = [8.0, 4.0, 2.0, 1.0].iter().map(|k| k * base).collect();
    let mut table = Csv::new(&["h", "residual"]);
    let mut residuals = Vec::new();
    for &h in &steps {
        let r = schrodinger_residual(&system, alpha0, h)?;
        residuals.push(r);
        table.row(&[h.into(), r.into()]);
    }
    let order = observed_order(&steps, &residuals);

    let checks = vec![
        lim.at_most(
            "quadrature_identity_residual",
            quadrature,
            lim.overrides.quadrature,
            1e-12,
        ),
        Check {
            name: "derivative_order".into(),
            value: order,
            bound: Bound::Within(ORDER_BAND.0, ORDER_BAND.1),
        },
    ];
    let mut fields = Map::new();
    spectrum_fields(&mut fields, &spec);
    fields.insert("nodes".into(), json!(nodes));
    fields.insert("alpha0".into(), json!(alpha0));
    fields.insert(
        "continuum_identity_residual".into(),
        json!(continuum_identity_residual(&spec)),
    );
    Ok(finish(
        Command::ContinuumCheck,
        "continuum_summary.json",
        fields,
        vec![table.into_artifact("derivative.csv")],
        checks,
        lim.scale,
    ))
}
