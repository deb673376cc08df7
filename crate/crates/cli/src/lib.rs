//! Command-line front end for `slagbind`: single-file analyses, project
//! runs that bind a mix table to lab data, and plot-data export.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod output;
pub mod plot;
pub mod project;
pub mod report;

pub use commands::{run, Cli, CliError};
pub use plot::{emit_plot_data, PlotKind, PlotRow};
pub use project::{Project, ProjectError};
pub use report::{run_project, Report};
