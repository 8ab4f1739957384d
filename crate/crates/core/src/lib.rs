//! Exact branch-and-price solver for the minimum-cost k-vertex cut problem.

pub mod error;
pub mod graph;
pub mod flow;
pub mod instance;
pub mod lp;
pub mod master;
pub mod pricing;
pub mod symmetry;
pub mod engine;
pub mod lab;
pub mod oracle;

pub use error::{Error, Result};
