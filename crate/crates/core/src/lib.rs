pub mod attacks;
pub mod error;
pub mod harness;
pub mod lrf;
pub mod qsim;
pub mod schemes;
pub mod zq;

pub use error::{Error, Result};
