//! File formats, Monte-Carlo experiments, the gene example and the
//! command-line front end built on [`pcomb_core`].

pub mod cli;
pub mod gene;
pub mod io;
pub mod simulate;

pub use pcomb_core as core;
