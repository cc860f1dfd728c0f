//! Output plumbing: table schemas with fixed numeric formats, CSV/JSON
//! writers, run manifests, plot-data emission, and the printed-value
//! comparison engine.

pub mod manifest;
pub mod paper;
pub mod plot;
pub mod table;

pub use manifest::{sha256_file, ManifestBuilder, OutputRecord, RunManifest};
pub use paper::{
    compare_all, CellComparison, CellOutcome, CompareScale, DiscrepancyReport, PaperValue,
    TableComparison,
};
pub use table::{Cell, Column, NumberFormat, TableSchema};
