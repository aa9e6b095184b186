//! Subcommand implementations behind the command-line front end.
//!
//! Each `run_*` function loads the experiment config, executes the work, writes
//! its CSV artifacts under the configured output directory, and prints a short
//! human-readable account to stdout. Artifact contents are deterministic for a
//! given config and seed list; progress notes go to stderr so stdout stays
//! machine-diffable.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::config::{ExperimentConfig, Overrides};
use crate::files::{load_household, load_tariff, FileError, FileErrorKind};
use crate::harness::{run_experiment, sweep_seeds, ExperimentError, ExperimentReport};
use crate::model::{validate_schedule, HouseholdScenario, TariffDay, ViolationList};
use crate::optim::{
    brute_force_optimize, search_space_size, OptimizeError, OptimizerResult, OptimizerSpec,
    SearchSpaceTooLarge,
};
use crate::report;

/// Failure of a subcommand, carrying enough shape to pick the process exit code.
#[derive(Debug)]
pub enum CmdError {
    /// Bad config, bad attack expression, or an experiment that is not runnable
    /// as configured.
    Config(String),
    /// An input file failed to load; the embedded kind separates syntax from
    /// infeasibility.
    File(FileError),
    /// The oracle refused to enumerate a search space above its limit.
    TooLarge(SearchSpaceTooLarge),
    /// A component produced output that breaks its own contract.
    Internal(String),
}

impl CmdError {
    /// Process exit code: 2 config, 3 infeasible input, 4 broken invariant,
    /// 5 search space over the oracle limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::File(e) => match e.error.kind {
                FileErrorKind::Parse => 2,
                FileErrorKind::Infeasible => 3,
            },
            CmdError::TooLarge(_) => 5,
            CmdError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Config(msg) => f.write_str(msg),
            CmdError::File(e) => write!(f, "{e}"),
            CmdError::TooLarge(e) => write!(f, "{e}"),
            CmdError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for CmdError {}

impl From<FileError> for CmdError {
    fn from(e: FileError) -> Self {
        CmdError::File(e)
    }
}

fn from_optimize(err: OptimizeError) -> CmdError {
    match err {
        OptimizeError::InvalidParams(e) => CmdError::Config(e.to_string()),
        OptimizeError::SearchSpaceTooLarge(e) => CmdError::TooLarge(e),
        OptimizeError::Internal(msg) => CmdError::Internal(msg),
    }
}

fn from_experiment(err: ExperimentError) -> CmdError {
    match err {
        ExperimentError::Optimize(e) => from_optimize(e),
        ExperimentError::Attack(e) => CmdError::Config(e.to_string()),
        ExperimentError::UndefinedRi(e) => CmdError::Config(e.to_string()),
        ExperimentError::NoSeeds => CmdError::Config(err.to_string()),
    }
}

fn from_io(path: &Path, err: std::io::Error) -> CmdError {
    CmdError::Internal(format!("writing {}: {err}", path.display()))
}

struct Loaded {
    config: ExperimentConfig,
    scenario: HouseholdScenario,
    tariff: TariffDay,
}

fn load(config_path: &Path, overrides: &Overrides) -> Result<Loaded, CmdError> {
    let mut config = ExperimentConfig::load(config_path)?;
    config.apply(overrides);
    let scenario = load_household(&config.scenario_path)?;
    let tariff = load_tariff(&config.tariff_path)?;
    Ok(Loaded {
        config,
        scenario,
        tariff,
    })
}

/// Schedules coming back from an optimizer must satisfy every scenario
/// constraint; anything else is a bug in the optimizer, not in the input.
fn check_output(scenario: &HouseholdScenario, result: &OptimizerResult) -> Result<(), CmdError> {
    let violations = validate_schedule(&result.schedule, scenario);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CmdError::Internal(format!(
            "optimizer returned an infeasible schedule: {}",
            ViolationList(violations)
        )))
    }
}

fn note_artifact(path: &PathBuf) {
    eprintln!("wrote {}", path.display());
}

struct OptimizeRun {
    name: &'static str,
    seed: Option<u64>,
    result: OptimizerResult,
}

pub fn run_optimize(config_path: &Path, overrides: &Overrides) -> Result<(), CmdError> {
    let Loaded {
        config,
        scenario,
        tariff,
    } = load(config_path, overrides)?;
    let specs = config.optimizer_specs();
    if specs.is_empty() {
        return Err(CmdError::Config(String::from(
            "no optimizers configured; add an [optimizers.baseline], [optimizers.ga], \
             [optimizers.hsa], or [optimizers.oracle] table",
        )));
    }

    let mut runs: Vec<OptimizeRun> = Vec::new();
    for spec in &specs {
        if spec.is_seeded() {
            for &seed in &config.seeds {
                let result = spec
                    .seeded(seed)
                    .run(&scenario, &tariff)
                    .map_err(from_optimize)?;
                check_output(&scenario, &result)?;
                runs.push(OptimizeRun {
                    name: spec.name(),
                    seed: Some(seed),
                    result,
                });
            }
        } else {
            let result = spec.run(&scenario, &tariff).map_err(from_optimize)?;
            check_output(&scenario, &result)?;
            runs.push(OptimizeRun {
                name: spec.name(),
                seed: None,
                result,
            });
        }
    }

    // Hourly columns show one run per optimizer; for seeded ones that is the
    // first configured seed.
    let hourly: Vec<(&str, &OptimizerResult)> = specs
        .iter()
        .map(|spec| {
            let run = runs
                .iter()
                .find(|r| r.name == spec.name())
                .expect("every spec ran at least once");
            (run.name, &run.result)
        })
        .collect();
    let summary_rows: Vec<(&str, Option<u64>, &OptimizerResult)> = runs
        .iter()
        .map(|r| (r.name, r.seed, &r.result))
        .collect();
    let baseline_total = runs
        .iter()
        .find(|r| r.name == "baseline")
        .map(|r| r.result.cost.total);

    let path = report::write_artifact(
        &config.out_dir,
        "costs_hourly.csv",
        &report::optimize_hourly_csv(&hourly),
    )
    .map_err(|e| from_io(&config.out_dir, e))?;
    note_artifact(&path);
    let path = report::write_artifact(
        &config.out_dir,
        "summary.csv",
        &report::optimize_summary_csv(&summary_rows, baseline_total),
    )
    .map_err(|e| from_io(&config.out_dir, e))?;
    note_artifact(&path);

    for run in &runs {
        let seed_note = match run.seed {
            Some(seed) => format!(" seed {seed}"),
            None => String::new(),
        };
        println!(
            "{}{}: total {} cents, {} evaluation(s)",
            run.name, seed_note, run.result.cost.total, run.result.evaluations
        );
    }
    Ok(())
}

struct AttackRun {
    name: &'static str,
    seed: Option<u64>,
    report: ExperimentReport,
}

pub fn run_attack(config_path: &Path, overrides: &Overrides) -> Result<(), CmdError> {
    let Loaded {
        config,
        scenario,
        tariff,
    } = load(config_path, overrides)?;
    if config.attacks.is_empty() {
        return Err(CmdError::Config(String::from(
            "attack experiments need at least one attack; run `optimize` for clean scheduling",
        )));
    }
    let specs = config.optimizer_specs();
    if specs.is_empty() {
        return Err(CmdError::Config(String::from(
            "no optimizers configured; add an [optimizers.baseline], [optimizers.ga], \
             [optimizers.hsa], or [optimizers.oracle] table",
        )));
    }

    let mut runs: Vec<AttackRun> = Vec::new();
    let mut summaries: Vec<(&str, crate::harness::SweepSummary)> = Vec::new();
    for spec in &specs {
        if spec.is_seeded() {
            let sweep = sweep_seeds(
                &scenario,
                &tariff,
                &config.attacks,
                spec,
                config.billing,
                &config.seeds,
            )
            .map_err(from_experiment)?;
            for (seed, rep) in config.seeds.iter().zip(sweep.reports) {
                check_output(&scenario, &rep.clean)?;
                check_output(&scenario, &rep.attacked)?;
                runs.push(AttackRun {
                    name: spec.name(),
                    seed: Some(*seed),
                    report: rep,
                });
            }
            summaries.push((spec.name(), sweep.summary));
        } else {
            let rep = run_experiment(
                &scenario,
                &tariff,
                &config.attacks,
                &spec.seeded(0),
                config.billing,
            )
            .map_err(from_experiment)?;
            check_output(&scenario, &rep.clean)?;
            check_output(&scenario, &rep.attacked)?;
            runs.push(AttackRun {
                name: spec.name(),
                seed: None,
                report: rep,
            });
        }
    }

    let hourly: Vec<(&str, &ExperimentReport)> = specs
        .iter()
        .map(|spec| {
            let run = runs
                .iter()
                .find(|r| r.name == spec.name())
                .expect("every spec ran at least once");
            (run.name, &run.report)
        })
        .collect();
    let summary_rows: Vec<(&str, Option<u64>, &ExperimentReport)> = runs
        .iter()
        .map(|r| (r.name, r.seed, &r.report))
        .collect();

    let path = report::write_artifact(
        &config.out_dir,
        "attack_costs_hourly.csv",
        &report::attack_hourly_csv(&hourly),
    )
    .map_err(|e| from_io(&config.out_dir, e))?;
    note_artifact(&path);
    let path = report::write_artifact(
        &config.out_dir,
        "attack_ri_hourly.csv",
        &report::ri_hourly_csv(&hourly),
    )
    .map_err(|e| from_io(&config.out_dir, e))?;
    note_artifact(&path);
    let path = report::write_artifact(
        &config.out_dir,
        "attack_summary.csv",
        &report::attack_summary_csv(&summary_rows),
    )
    .map_err(|e| from_io(&config.out_dir, e))?;
    note_artifact(&path);

    for run in &runs {
        let seed_note = match run.seed {
            Some(seed) => format!(" seed {seed}"),
            None => String::new(),
        };
        println!(
            "{}{}: clean {} cents, attacked {} cents, resilience {}",
            run.name,
            seed_note,
            run.report.clean_total(),
            run.report.attacked_total(),
            run.report.ri_total
        );
    }
    for (name, summary) in &summaries {
        println!(
            "{name}: resilience over {} seed(s): mean {}, min {}, max {}",
            config.seeds.len(),
            summary.ri_total.mean,
            summary.ri_total.min,
            summary.ri_total.max
        );
    }
    Ok(())
}

pub fn run_oracle(config_path: &Path, overrides: &Overrides) -> Result<(), CmdError> {
    let Loaded {
        config,
        scenario,
        tariff,
    } = load(config_path, overrides)?;
    let size = search_space_size(&scenario);
    let result =
        brute_force_optimize(&scenario, &tariff, config.oracle_limit).map_err(from_optimize)?;
    check_output(&scenario, &result)?;

    let path = report::write_artifact(
        &config.out_dir,
        "oracle_schedule.csv",
        &report::schedule_csv(&result.schedule),
    )
    .map_err(|e| from_io(&config.out_dir, e))?;
    note_artifact(&path);
    let path = report::write_artifact(
        &config.out_dir,
        "oracle_summary.csv",
        &report::oracle_summary_csv(&result, size),
    )
    .map_err(|e| from_io(&config.out_dir, e))?;
    note_artifact(&path);

    println!(
        "oracle: total {} cents after {} evaluation(s) over a space of {} candidate(s)",
        result.cost.total, result.evaluations, size
    );
    Ok(())
}

pub fn run_validate(config_path: &Path, overrides: &Overrides) -> Result<(), CmdError> {
    let Loaded {
        config,
        scenario,
        tariff,
    } = load(config_path, overrides)?;
    println!("config {}: ok", config_path.display());
    println!(
        "household {}: ok ({} appliance(s), {} flexible)",
        config.scenario_path.display(),
        scenario.appliances().len(),
        scenario.flexible().count()
    );
    println!(
        "tariff {}: ok ({})",
        config.tariff_path.display(),
        tariff.season()
    );
    if config.attacks.is_empty() {
        println!("attacks: none");
    } else {
        let names: Vec<String> = config.attacks.iter().map(|a| a.to_string()).collect();
        println!("attacks: ok ({})", names.join("; "));
    }
    let specs = config.optimizer_specs();
    if specs.is_empty() {
        println!("optimizers: none");
    } else {
        let names: Vec<&str> = specs.iter().map(OptimizerSpec::name).collect();
        println!("optimizers: {}", names.join(", "));
    }
    println!(
        "search space: {} candidate(s)",
        search_space_size(&scenario)
    );
    Ok(())
}
