//! Mining and analysis toolchain for MPI collective usage in open-source
//! code.
//!
//! The pipeline has five stages, one module each:
//!
//! * [`corpus`] discovers repositories through a code-search API, records
//!   them in a manifest, and fetches source snapshots under a byte budget.
//! * [`scanner`] walks a source tree, counts lines per language, strips
//!   comments and string literals, and extracts `MPI_<Name>` call sites.
//! * [`store`] persists repositories, file metadata, and call sites in a
//!   SQLite database and exports them as CSV.
//! * [`patterns`] finds repeated collective groups, counts pair
//!   co-occurrences, and computes homogeneity and fusion statistics.
//! * [`report`] writes the analysis results as CSV and plot-friendly
//!   whitespace-column files.

pub mod collectives;
pub mod corpus;
pub mod patterns;
pub mod report;
pub mod scanner;
pub mod store;

pub use collectives::CollectiveSet;
pub use corpus::{ManifestEntry, Partition, SearchSpec};
pub use patterns::{
    Classification, HomogeneityReport, PairSweepReport, PatternGroup, PatternQuery,
};
pub use scanner::{CallSite, FileRecord, Language, LineCounts, ScanResult};
pub use store::{FileSites, IngestSummary, RepoRecord, Site, Store};
