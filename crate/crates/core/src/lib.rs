pub mod algebra;
pub mod bimodule;
pub mod bounded;
pub mod coherence;
pub mod error;
pub mod instance;
pub mod involution;
pub mod linalg;
pub mod tensor;

pub use error::{Error, Result};
