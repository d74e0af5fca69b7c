//! Experiment harness: scenarios, reports, suites, search and export.

pub mod equivalence;
pub mod profile;
pub mod report;

pub use equivalence::{cross_exponent_check, equivalence_report, monotone_variant_report, moreover_check};
pub use profile::Profile;
pub use report::{EquivalenceReport, Flag, Flags, Mode, Scenario, Which};
pub mod suites;
pub mod export;
pub mod search;

pub use export::{export_report, read_reports, ExportFormat};
pub use search::{adversarial_search, SearchResult, SearchSpace};
