//! horolab: a numerical laboratory for sparse averages along the horocycle
//! flow on the modular surface, the exponential-sum machinery behind them,
//! complementary-series spectral norms, and box-counting estimates for
//! exceptional sets.

pub mod averages;
pub mod error;
pub mod expsum;
pub mod funcspace;
pub mod rng;
pub mod sl2;
pub mod specfun;
pub mod util;

mod dd;

pub use error::{Error, Result};
