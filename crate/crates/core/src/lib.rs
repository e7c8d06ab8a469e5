pub mod audit;
pub mod beta;
pub mod cli;
pub mod error;
pub mod gamma;
pub mod hyper;
pub mod kernel;
pub mod numeric;
pub mod pochhammer;
pub mod psi;
pub mod quadrature;
pub mod record;

pub use error::{Error, Result};
