//! Sweep documents, result files (CSV canonical, JSON mirror), and Paje
//! trace export.

mod paje;
mod results;
mod sweep;

pub use paje::{export_paje, write_paje};
pub use results::{
    aggregate, read_results, result_rows, write_aggregate, write_results, write_results_json, write_results_to,
    AggregateRow, ResultRow, AGGREGATE_HEADER, RESULTS_HEADER,
};
pub use sweep::{parse_sweep, SweepSpec};
