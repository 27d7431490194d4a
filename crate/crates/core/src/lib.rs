pub mod error;
pub mod sphere;
pub mod tensor;
pub mod bondi;
pub mod io;
pub mod charges;
pub mod limits;
pub mod verify;
pub mod report;
pub mod cli;

pub use error::{Error, Result};
