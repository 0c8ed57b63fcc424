pub mod error;
pub mod model;
pub mod observables;
pub mod quad;
pub mod reference;
pub mod special;
pub mod units;

pub use error::{Error, Result};
