//! File formats and the command-line front-end for `turrittin-core`.

pub mod cli;
pub mod format;
pub mod text;
