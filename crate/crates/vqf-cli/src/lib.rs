//! Library half of the `vqf` command: document schema, pipelines, report
//! rendering, and exit-code policy. The binary is argument parsing only,
//! so integration tests can drive everything in-process.

pub mod doc;
pub mod report;

pub use doc::{
    canonical_json, digest, parse_document, read_document, DocError, FormDocument, FormMetadata,
};
pub use report::{
    analyze, exit_code, preimage_report, render_text, verify_report, veronese_report,
    AnalyzeOptions, ReportDocument,
};
