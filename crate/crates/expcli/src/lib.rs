//! Reproducible experiment families comparing Hamiltonians against their
//! stoquastic counterparts: dense win fractions, Max-Cut minimum gaps and
//! times to solution, signed-graph Cheeger audits and X-diagonal gaps.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;
pub mod stats;
pub mod summary;

pub use config::{DenseEnsemble, ExperimentConfig, Family, TimeGrid, Variant};
pub use error::{ExpError, Result};
pub use experiments::{
    cheeger_instance, dense_instance, maxcut_mingap_instance, maxcut_paths, maxcut_tts_instance, replay, run,
    xdiag_instance,
};
pub use record::{classify, read_records, ExperimentRecord, Outcome, RecordWriter, VariantResult};
pub use summary::{Summary, SummaryRow};
