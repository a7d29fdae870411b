//! Search tools for balanced presentations of the trivial group on two
//! generators: conjugate enumeration in one-relator groups via weighted
//! graph folding, Whitehead normal forms, bounded breadth-first
//! enumeration, and one-relator relator classification.

pub mod classify;
pub mod conjugacy;
pub mod digraph;
pub mod moves;
pub mod normal_forms;
pub mod search;
pub mod words;
