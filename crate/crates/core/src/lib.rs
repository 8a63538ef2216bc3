pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod lcfa;
pub mod mc;
pub mod rho;
pub mod specfun;
pub mod units;

pub use error::{Error, ErrorKind, Result};
