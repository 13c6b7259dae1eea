//! Monte-Carlo scenario harness: registry, driver, aggregation and output.

pub mod aggregate;
pub mod config;
pub mod monte_carlo;
pub mod output;
pub mod scenarios;
pub mod svg;

pub use aggregate::{aggregate, AggregateRow};
pub use config::{parse_key_values, Method, RunConfig};
pub use monte_carlo::{replicate_seed, run_method, run_monte_carlo, sample_replicate, score, RunRecord, Score};
pub use output::{parse_records_csv, read_records_csv, records_to_csv, write_aggregate_csv, write_csv};
pub use scenarios::{scenario_registry, ScenarioKind, ScenarioSpec};
pub use svg::emit_svg;
