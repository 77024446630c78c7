//! Command orchestration: config sections in, tables out.

use rayon::prelude::*;
use realclock_core::accuracy::{experiment_report, ng_vandam_limit, salecker_wigner_error};
use realclock_core::clock::ClockModel;
use realclock_core::evolution::{
    conditional_probability, conditional_probability_model, evolve_master, ordinary_probability, smear_density,
    ConditionalQuery, EvolutionConfig,
};
use realclock_core::operator::build_projector;
use realclock_core::quadrature::TimeGrid;
use realclock_core::zurek::{brute_force_z, recurrence_scan, z_ideal, z_realclock, CoherenceMode};
use serde_json::Value;

use crate::config::{
    self, ClockLimitsConfig, CondClockSpec, CondprobConfig, EvolveConfig, ModeSpec, RunConfig, SweepCommand,
    ZurekConfig,
};
use crate::error::CliError;
use crate::output::{Report, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Evolve,
    Zurek,
    Condprob,
    ClockLimits,
    Sweep,
    /// Print the JSON schema of the config file.
    Schema,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Zurek => "zurek",
            Command::Condprob => "condprob",
            Command::ClockLimits => "clock-limits",
            Command::Sweep => "sweep",
            Command::Schema => "schema",
        }
    }
}

impl From<SweepCommand> for Command {
    fn from(c: SweepCommand) -> Self {
        match c {
            SweepCommand::Evolve => Command::Evolve,
            SweepCommand::Zurek => Command::Zurek,
            SweepCommand::Condprob => Command::Condprob,
            SweepCommand::ClockLimits => Command::ClockLimits,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Worker threads for sweeps.
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { workers: 1 }
    }
}

pub fn schema() -> Value {
    serde_json::to_value(schemars::schema_for!(RunConfig)).expect("schema serializes")
}

/// Runs `command` on a raw (already overridden) config document.
pub fn run(command: Command, raw: &Value, opts: RunOptions) -> Result<Report, CliError> {
    let cfg = config::parse(raw.clone())?;
    let resolved = serde_json::to_value(&cfg).expect("config serializes");
    let tables = match command {
        Command::Evolve => vec![evolve(section(&cfg.evolve, "evolve")?)?],
        Command::Zurek => zurek(section(&cfg.zurek, "zurek")?, cfg.seed)?,
        Command::Condprob => vec![condprob(section(&cfg.condprob, "condprob")?)?],
        Command::ClockLimits => vec![clock_limits(section(&cfg.clock_limits, "clock_limits")?)?],
        Command::Sweep => vec![sweep(&cfg, raw, opts)?],
        Command::Schema => return Err(CliError::Config("schema takes no config".into())),
    };
    Ok(Report {
        command: command.name().to_string(),
        config: resolved,
        tables,
    })
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Config(format!("missing `{name}` section")))
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "`{name}` must be positive and finite, got {v}"
        )))
    }
}

fn evolve(cfg: &EvolveConfig) -> Result<Table, CliError> {
    if cfg.sample_every == 0 {
        return Err(CliError::Config("`evolve.sample_every` must be at least 1".into()));
    }
    let h = cfg.system.build()?;
    let rho0 = cfg.initial_state.build()?;
    let clock = cfg.clock.build()?;
    // The grid is unused by the stepper; any valid grid will do.
    let ecfg = EvolutionConfig::new(cfg.step, TimeGrid::new(0.0, 1.0, 3)?)?;
    let trajectory = evolve_master(&rho0, &h, &clock, cfg.t_final, &ecfg)?;

    let d = h.dim();
    let mut columns = vec!["T".to_string()];
    for i in 0..d {
        for j in 0..d {
            columns.push(format!("rho_{i}_{j}_re"));
            columns.push(format!("rho_{i}_{j}_im"));
        }
    }
    columns.push("purity".into());
    columns.push("energy".into());
    let mut table = Table::new("rows", columns);
    let last = trajectory.len() - 1;
    for (k, point) in trajectory.iter().enumerate() {
        if k % cfg.sample_every != 0 && k != last {
            continue;
        }
        let m = point.state.matrix();
        let mut row = vec![point.time];
        for i in 0..d {
            for j in 0..d {
                row.push(m[(i, j)].re);
                row.push(m[(i, j)].im);
            }
        }
        row.push(point.state.purity());
        row.push(h.expectation(&point.state)?);
        table.push(row);
    }
    Ok(table)
}

fn zurek(cfg: &ZurekConfig, seed: u64) -> Result<Vec<Table>, CliError> {
    positive("zurek.t_planck", cfg.t_planck)?;
    let bath = cfg.bath.build(seed)?;
    let times = cfg.times.values()?;
    let mut columns: Vec<String> = [
        "t",
        "ideal_re",
        "ideal_im",
        "ideal_abs",
        "realclock_re",
        "realclock_im",
        "realclock_abs",
    ]
    .map(String::from)
    .to_vec();
    if cfg.brute_force_check {
        columns.push("brute_force_dev".into());
    }
    let mut rows = Table::new("rows", columns);
    for &t in &times {
        let zi = z_ideal(&bath, t);
        let zr = z_realclock(&bath, t, cfg.t_planck);
        let mut row = vec![t, zi.re, zi.im, zi.norm(), zr.re, zr.im, zr.norm()];
        if cfg.brute_force_check {
            row.push((brute_force_z(&bath, t)? - zi).norm());
        }
        rows.push(row);
    }
    let mut tables = vec![rows];
    if let Some(rec) = &cfg.recurrence {
        let mode = match rec.mode {
            ModeSpec::Ideal => CoherenceMode::Ideal,
            ModeSpec::Realclock => CoherenceMode::RealClock { t_planck: cfg.t_planck },
        };
        let scan = recurrence_scan(&bath, mode, rec.horizon, rec.n_samples, rec.threshold)?;
        let mut ex = Table::new("exceedances", vec!["t".into(), "abs_z".into()]);
        for (t, z) in scan.exceedances {
            ex.push(vec![t, z]);
        }
        tables.push(ex);
    }
    Ok(tables)
}

fn condprob(cfg: &CondprobConfig) -> Result<Table, CliError> {
    positive("condprob.o_halfwidth", cfg.o_halfwidth)?;
    let h = cfg.system.build()?;
    let rho = cfg.initial_state.build()?;
    let observable = cfg.observable.build()?;
    let grid = cfg.grid.build()?;
    let ecfg = EvolutionConfig::new(1.0, grid)?.with_quad_tol(cfg.quad_tol)?;
    let p_o = build_projector(&observable, cfg.o_center, cfg.o_halfwidth)?;

    let mut table = Table::new(
        "rows",
        ["reading", "conditional", "smeared", "abs_diff"]
            .map(String::from)
            .to_vec(),
    );
    let smeared = |model: &ClockModel, reading: f64| -> Result<f64, CliError> {
        let state = smear_density(&rho, &h, model, reading, &ecfg)?;
        Ok(ordinary_probability(&state, &p_o)?)
    };
    match &cfg.clock {
        CondClockSpec::Gaussian { width } => {
            let model = ClockModel::gaussian(*width)?;
            for &reading in &cfg.readings {
                let c = conditional_probability_model(&rho, &h, &p_o, &model, reading, &ecfg)?;
                let s = smeared(&model, reading)?;
                table.push(vec![reading, c, s, (c - s).abs()]);
            }
        }
        spec @ CondClockSpec::FreeParticle { .. } => {
            let (particle, t_halfwidth) = spec.free_particle().expect("free particle");
            particle.validate()?;
            let rho_cl = particle.initial_state()?;
            let h_cl = particle.hamiltonian();
            let x = particle.position_operator();
            let model = particle.gaussian_model()?;
            for &reading in &cfg.readings {
                let query = ConditionalQuery::new(
                    observable.clone(),
                    cfg.o_center,
                    cfg.o_halfwidth,
                    x.clone(),
                    reading,
                    t_halfwidth,
                )?;
                let c = conditional_probability(&rho_cl, &rho, &h_cl, &h, &query, &ecfg)?;
                let s = smeared(&model, reading)?;
                table.push(vec![reading, c, s, (c - s).abs()]);
            }
        }
    }
    Ok(table)
}

fn clock_limits(cfg: &ClockLimitsConfig) -> Result<Table, CliError> {
    let report = experiment_report(cfg.omega, cfg.duration, cfg.t_planck)?;
    let sw = match cfg.mass {
        Some(m) => {
            positive("clock_limits.mass", m)?;
            salecker_wigner_error(m, cfg.duration)
        }
        None => f64::NAN,
    };
    let mut table = Table::new(
        "rows",
        [
            "omega",
            "duration",
            "t_planck",
            "exponent",
            "decay_factor",
            "t_half",
            "ng_vandam",
            "salecker_wigner",
            "no_decoherence",
        ]
        .map(String::from)
        .to_vec(),
    );
    table.push(vec![
        report.omega,
        report.duration,
        report.t_planck,
        report.exponent,
        report.decay_factor,
        report.half_coherence_time,
        ng_vandam_limit(cfg.duration, cfg.t_planck),
        sw,
        if report.no_decoherence { 1.0 } else { 0.0 },
    ]);
    Ok(table)
}

/// Summary columns of one run, as used by sweeps.
pub fn summarize(command: Command, report: &Report) -> Result<(Vec<String>, Vec<f64>), CliError> {
    let main = report.main();
    let last = |name: &str| -> f64 { main.column(name).and_then(|c| c.last().copied()).unwrap_or(f64::NAN) };
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Ok(match command {
        Command::Evolve => {
            let abs = |row: Option<&Vec<f64>>| -> f64 {
                match (row, main.columns.iter().position(|c| c == "rho_0_1_re")) {
                    (Some(r), Some(i)) => r[i].hypot(r[i + 1]),
                    _ => f64::NAN,
                }
            };
            let initial = abs(main.rows.first());
            let fin = abs(main.rows.last());
            let ratio = if initial > 0.0 { fin / initial } else { f64::NAN };
            (
                names(&["t_final", "abs_rho01", "decay_ratio", "purity"]),
                vec![last("T"), fin, ratio, last("purity")],
            )
        }
        Command::Zurek => (
            names(&["t", "ideal_abs", "realclock_abs"]),
            vec![last("t"), last("ideal_abs"), last("realclock_abs")],
        ),
        Command::Condprob => {
            let max = main
                .column("abs_diff")
                .unwrap_or_default()
                .into_iter()
                .fold(0.0, f64::max);
            (names(&["max_abs_diff"]), vec![max])
        }
        Command::ClockLimits => (
            names(&["t_half", "decay_factor", "exponent"]),
            vec![last("t_half"), last("decay_factor"), last("exponent")],
        ),
        Command::Sweep | Command::Schema => {
            return Err(CliError::Config("sweeps cannot nest".into()));
        }
    })
}

fn sweep(cfg: &RunConfig, raw: &Value, opts: RunOptions) -> Result<Table, CliError> {
    let spec = section(&cfg.sweep, "sweep")?;
    let command = Command::from(spec.command);
    let key = spec.axis.key.as_str();
    if key == "seed" || key.starts_with("sweep") {
        return Err(CliError::Config(format!("`sweep.axis.key` cannot be `{key}`")));
    }
    if key.contains(',') {
        return Err(CliError::Config("`sweep.axis.key` cannot contain commas".into()));
    }
    let values = spec.axis.values()?;

    let single = |v: f64| -> Result<(Vec<String>, Vec<f64>), CliError> {
        let mut doc = raw.clone();
        if let Value::Object(map) = &mut doc {
            map.remove("sweep");
        }
        config::set_path(&mut doc, key, config::number(v))?;
        let report = run(command, &doc, RunOptions::default())?;
        summarize(command, &report)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let results: Vec<_> = pool.install(|| values.par_iter().map(|&v| single(v)).collect());

    let mut table: Option<Table> = None;
    for (v, result) in values.iter().zip(results) {
        let (names, row) = result.map_err(|e| {
            let at = |m: String| format!("sweep failed at {key} = {v}: {m}");
            match e {
                CliError::Config(m) => CliError::Config(at(m)),
                CliError::Numeric(m) => CliError::Numeric(at(m)),
                CliError::Io(m) => CliError::Io(at(m)),
            }
        })?;
        let t = table.get_or_insert_with(|| {
            let mut columns = vec![key.to_string()];
            columns.extend(names);
            Table::new("rows", columns)
        });
        let mut full = vec![*v];
        full.extend(row);
        t.push(full);
    }
    Ok(table.expect("at least one axis value"))
}
