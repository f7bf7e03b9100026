pub mod cli;
pub mod error;
pub mod grids;
pub mod hnk;
pub mod numlin;
pub mod opspace;
pub mod report;
pub mod triple;

pub use error::{Error, Result};
