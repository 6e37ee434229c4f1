//! Configuration ingestion, subcommand dispatch, and bit-stable emission
//! for the consumption-model toolkit. See `config` for the document format,
//! `run` for the commands, and `emit` for the output encodings.

pub mod config;
pub mod emit;
pub mod run;
