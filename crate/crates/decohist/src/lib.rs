pub mod error;
pub mod doubled;
pub mod histories;
pub mod linalg;

pub use error::{Error, Result};
