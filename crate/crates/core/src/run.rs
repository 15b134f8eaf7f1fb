//! Method dispatch and chained synchronizations.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimate::EstimateSet;
use crate::global::{estimate_global_builder, estimate_global_system};
use crate::local::{estimate_local_builder, estimate_local_system};
use crate::plant::{Plant, StateSet};
use crate::si_state::SiState;
use crate::sim::ErrorModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Modified system plus the error-free synchronizer.
    System,
    /// Error-tolerant builder.
    Builder,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "system" => Ok(Method::System),
            "builder" => Ok(Method::Builder),
            other => Err(Error::Invalid(format!(
                "method must be `system` or `builder`, got `{other}`"
            ))),
        }
    }
}

pub fn estimate(
    plant: &Plant,
    errors: &ErrorModel,
    method: Method,
    tau: &SiState,
    q0: &StateSet,
) -> Result<EstimateSet> {
    match (errors, method) {
        (ErrorModel::Global(erm), Method::System) => estimate_global_system(plant, erm, tau, q0),
        (ErrorModel::Global(erm), Method::Builder) => estimate_global_builder(plant, erm, tau, q0),
        (ErrorModel::Local(erms), Method::System) => estimate_local_system(plant, erms, tau, q0),
        (ErrorModel::Local(erms), Method::Builder) => estimate_local_builder(plant, erms, tau, q0),
    }
}

/// Runs one synchronization per SI-state. The states of each estimate, with
/// costs dropped, seed the next step, and every step gets the full budget.
/// Stops after the first empty estimate.
pub fn chain(
    plant: &Plant,
    errors: &ErrorModel,
    method: Method,
    initial: &StateSet,
    steps: &[SiState],
) -> Result<Vec<EstimateSet>> {
    let mut q0 = initial.clone();
    let mut out = Vec::with_capacity(steps.len());
    for tau in steps {
        let est = estimate(plant, errors, method, tau, &q0)?;
        let empty = est.is_empty();
        q0 = est.states();
        out.push(est);
        if empty {
            break;
        }
    }
    Ok(out)
}
