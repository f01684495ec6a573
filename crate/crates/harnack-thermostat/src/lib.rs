pub mod chart;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod flow;
pub mod harnack;
pub mod jet;
pub mod tensor;
pub mod thermostat;

pub use error::{GeomError, Result};
