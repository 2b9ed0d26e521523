pub mod base;
pub mod category;
pub mod cofinal;
pub mod diagram;
pub mod error;
pub mod factorize;
pub mod fixtures;
pub mod gen;
pub mod json;
pub mod lifting;
pub mod order;
pub mod procalc;
pub mod suite;

pub use error::{Error, Result};
