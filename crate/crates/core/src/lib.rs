//! Tooling for running an answer set programming solver competition.
//!
//! The pipeline follows the order of the modules: [`syntax`] reads
//! ASP-Core-2 programs, [`classify`] places encodings in sub-tracks,
//! [`hardness`] and [`selection`] pick balanced benchmark instances,
//! [`runner`] executes solvers under limits, [`oracle`] checks their
//! answers on small instances, and [`scoring`] and [`report`] turn the run
//! log into domain scores, leaderboards and tables.
//!
//! ```
//! use aspcomp::classify::{classify, HcfMode, Subtrack};
//! use aspcomp::syntax::parse_program;
//!
//! let program = parse_program("a | b :- c. c.").unwrap();
//! let c = classify(&program, HcfMode::Ground(&[])).unwrap();
//! assert_eq!(c.subtrack, Subtrack::Extended);
//! ```

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod ground;
pub mod hardness;
pub mod oracle;
pub mod report;
pub mod runner;
pub mod scoring;
pub mod selection;
pub mod syntax;
