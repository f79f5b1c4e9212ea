//! Generators, file formats and seeded experiment campaigns.

pub mod experiment;
pub mod generators;
pub mod io;

pub use experiment::{
    read_csv, records_from_csv, records_to_csv, run_experiment, write_csv, ExperimentConfig, Mode, Outcome, Summary,
    TrialRecord, Verdict, CSV_HEADER,
};
pub use generators::{
    gen_bounded_graphic_seq, gen_host_min_degree, gen_sharpness_host, gen_unbalanced_seq, min_degree_target,
};
pub use io::{format_graph, parse_graph, read_graph, read_json, write_graph, write_json};
