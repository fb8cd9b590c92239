//! The seeded generative source: a fair class label and boolean variables
//! that agree with it with probability `1/2 + edge`, `1/2 - edge`, or `1/2`.

mod dataset;
mod io;
mod spec;

pub use dataset::{draw_dataset, Dataset, Sampler};
pub use io::{load_dataset, read_dataset, save_dataset, write_dataset};
pub use spec::{
    make_hetero_spec, make_spec, Dependence, EdgeAssignment, Polarity, RelevantVar, SourceConfig, SourceSpec,
};
