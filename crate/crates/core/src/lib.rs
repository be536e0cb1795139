pub mod error;
pub mod expr;
pub mod fedosov;
pub mod charclass;
pub mod cli;
pub mod geometry;
pub mod hermitian;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod taylor_star;
pub mod testkit;
pub mod weyl;

pub use error::{Error, Result};
