pub mod error;
pub mod exactalg;
pub mod poisson;
pub mod symplectic;
pub mod liealg;
pub mod moment;
pub mod reduction;
pub mod flows;
pub mod plie;
pub mod formats;

pub use error::{Error, Result};
