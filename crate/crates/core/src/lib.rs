//! Error-tolerant decentralized current-state estimation for discrete event
//! systems observed by several sites under a shared tampering budget.

pub mod engine;
pub mod erm;
pub mod error;
pub mod estimate;
pub mod fixtures;
pub mod global;
pub mod io;
pub mod local;
pub mod oracle;
pub mod plant;
pub mod reach;
pub mod run;
pub mod si_state;
pub mod sim;

pub use erm::{
    erroneous_set, tamper_costs, validate_erm, CostedSequence, Erm, ErmDiagnostic, LocalErmSet,
    RawErm, Symbol,
};
pub use error::{Error, Result};
pub use estimate::{least_cost_filter, EstimateSet};
pub use plant::{EventId, Plant, SiteSet, StateId, StateSet};
pub use si_state::{enumerate_to_sequences, sbuilder_release, SiState};
