pub mod bounds;
pub mod exactcheck;
pub mod graphs;
pub mod processes;
pub mod harness;
pub mod cli;
