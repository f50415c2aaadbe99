//! Library backing the `omega` binary: graph ingestion, output rendering,
//! and the `run`/`bench` commands. Kept as a library so the pieces are
//! testable without spawning the binary.

pub mod bench;
pub mod input;
pub mod output;
pub mod run;
