//! Batched containment checks over tampered runs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::erm::{Erm, LocalErmSet};
use crate::error::Result;
use crate::global::{estimate_global_builder, estimate_global_system};
use crate::io::{ErmFile, LocalErmFile, PlantFile, SiStateFile, FORMAT_VERSION};
use crate::local::{estimate_local_builder, estimate_local_system};
use crate::plant::{EventId, Plant};

use super::gen::{random_global_erm, random_local_erms, random_plant, GenConfig};
use super::tamper::{sample_run, tamper_global, tamper_local, EditAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Global,
    Local,
}

/// Error model attached to a fixed plant.
#[derive(Debug, Clone)]
pub enum ErrorModel {
    Global(Erm),
    Local(LocalErmSet),
}

impl ErrorModel {
    pub fn mode(&self) -> Mode {
        match self {
            ErrorModel::Global(_) => Mode::Global,
            ErrorModel::Local(_) => Mode::Local,
        }
    }
}

/// Where scenarios come from.
#[derive(Debug, Clone)]
pub enum Source {
    /// Fresh plant and matrices per scenario.
    Generated { mode: Mode, config: GenConfig },
    /// One plant and error model, fresh runs.
    Fixed {
        plant: Plant,
        errors: ErrorModel,
        max_run_length: usize,
    },
}

impl Source {
    pub fn mode(&self) -> Mode {
        match self {
            Source::Generated { mode, .. } => *mode,
            Source::Fixed { errors, .. } => errors.mode(),
        }
    }
}

/// Everything needed to replay a failing scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproBundle {
    pub plant: PlantFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erm: Option<ErmFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_erm: Option<LocalErmFile>,
    pub si_state: SiStateFile,
    pub initial: Vec<String>,
    pub run: Vec<String>,
    pub script: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioVerdict {
    pub index: usize,
    pub true_state: String,
    pub true_cost: u32,
    pub run_length: usize,
    pub estimate_size: usize,
    pub system_contains: bool,
    pub builder_contains: bool,
    pub methods_agree: bool,
}

impl ScenarioVerdict {
    pub fn passed(&self) -> bool {
        self.system_contains && self.builder_contains && self.methods_agree
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Failure {
    pub index: usize,
    pub bundle: ReproBundle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainmentReport {
    pub format_version: u32,
    pub mode: Mode,
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    pub verdicts: Vec<ScenarioVerdict>,
    pub failures: Vec<Failure>,
}

impl ContainmentReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.count
    }
}

/// The generator for scenario `index` of a batch seeded with `seed`.
pub fn scenario_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn describe(plant: &Plant, action: &EditAction) -> String {
    let n = |e: &EventId| plant.event_name(*e).to_owned();
    match action {
        EditAction::Keep(e) => format!("keep {}", n(e)),
        EditAction::Delete(e) => format!("delete {}", n(e)),
        EditAction::Replace(a, b) => format!("replace {} {}", n(a), n(b)),
        EditAction::Insert(e) => format!("insert {}", n(e)),
    }
}

/// Runs one scenario. The second value is set when a check failed.
pub fn run_scenario(source: &Source, seed: u64, index: usize) -> Result<(ScenarioVerdict, Option<ReproBundle>)> {
    let mut rng = scenario_rng(seed, index);
    let (plant, errors, max_len) = match source {
        Source::Generated { mode, config } => {
            let plant = random_plant(config, &mut rng);
            let errors = match mode {
                Mode::Global => ErrorModel::Global(random_global_erm(&plant, config, &mut rng)),
                Mode::Local => ErrorModel::Local(random_local_erms(&plant, config, &mut rng)),
            };
            (plant, errors, config.max_run_length)
        }
        Source::Fixed {
            plant,
            errors,
            max_run_length,
        } => (plant.clone(), errors.clone(), *max_run_length),
    };
    let q0 = plant.initial().clone();
    let len = rng.gen_range(0..=max_len);
    let run = sample_run(&plant, &q0, len, &mut rng);

    let (tau, cost, script, system, builder) = match &errors {
        ErrorModel::Global(erm) => {
            let t = tamper_global(&plant, &run.events, erm, &mut rng);
            let system = estimate_global_system(&plant, erm, &t.tau, &q0)?;
            let builder = estimate_global_builder(&plant, erm, &t.tau, &q0)?;
            let script = t.script.iter().map(|a| describe(&plant, a)).collect();
            (t.tau, t.cost, script, system, builder)
        }
        ErrorModel::Local(erms) => {
            let t = tamper_local(&plant, &run.events, erms, &mut rng);
            let system = estimate_local_system(&plant, erms, &t.tau, &q0)?;
            let builder = estimate_local_builder(&plant, erms, &t.tau, &q0)?;
            let script: Vec<String> = t
                .scripts
                .iter()
                .enumerate()
                .flat_map(|(site, s)| {
                    let plant = &plant;
                    s.iter().map(move |a| format!("site {}: {}", site + 1, describe(plant, a)))
                })
                .collect();
            (t.tau, t.cost, script, system, builder)
        }
    };

    let verdict = ScenarioVerdict {
        index,
        true_state: plant.state_name(run.state).to_owned(),
        true_cost: cost,
        run_length: run.events.len(),
        estimate_size: builder.len(),
        system_contains: system.contains(run.state, cost),
        builder_contains: builder.contains(run.state, cost),
        methods_agree: system == builder,
    };
    let bundle = if verdict.passed() {
        None
    } else {
        Some(ReproBundle {
            plant: PlantFile::from_plant(&plant),
            erm: match &errors {
                ErrorModel::Global(erm) => Some(ErmFile::from_erm(&plant, erm)),
                ErrorModel::Local(_) => None,
            },
            local_erm: match &errors {
                ErrorModel::Local(erms) => Some(LocalErmFile::from_erms(&plant, erms)),
                ErrorModel::Global(_) => None,
            },
            si_state: SiStateFile::from_si_state(&plant, &tau),
            initial: q0.iter().map(|&s| plant.state_name(s).to_owned()).collect(),
            run: run.events.iter().map(|&e| plant.event_name(e).to_owned()).collect(),
            script,
        })
    };
    Ok((verdict, bundle))
}

/// Runs `count` scenarios. Scenario `i` uses stream `i` of the seeded
/// generator, so any single scenario can be replayed on its own.
pub fn containment_batch(source: &Source, count: usize, seed: u64) -> Result<ContainmentReport> {
    let mut verdicts = Vec::with_capacity(count);
    let mut failures = Vec::new();
    for index in 0..count {
        let (verdict, bundle) = run_scenario(source, seed, index)?;
        if let Some(bundle) = bundle {
            failures.push(Failure { index, bundle });
        }
        verdicts.push(verdict);
    }
    Ok(ContainmentReport {
        format_version: FORMAT_VERSION,
        mode: source.mode(),
        seed,
        count,
        passed: verdicts.iter().filter(|v| v.passed()).count(),
        verdicts,
        failures,
    })
}
