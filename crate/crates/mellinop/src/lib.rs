pub mod error;
pub mod linalg;
pub mod mellin;
pub mod special;

pub use error::{Error, Result};
