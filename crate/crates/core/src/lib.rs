pub mod distributions;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod oracles;
pub mod projection;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod testers;
pub mod verify;

pub use error::{Error, Result};
