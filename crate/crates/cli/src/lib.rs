//! Run configurations, the result container format and plotting output for
//! the `qsw` binary.

pub mod config;
pub mod container;
mod error;
pub mod pipeline;
pub mod plot;

pub use config::{Attachment, InitialSpec, OperatorStyle, Outputs, Overrides, RunConfig, TimeSpec, WalkChoice};
pub use container::{read_container, write_container, Array, ContainerError, ResultContainer};
pub use error::CliError;
pub use pipeline::{execute, run};
pub use plot::{emit_plot_data, Quantity};
