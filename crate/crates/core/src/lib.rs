//! Adaptive step sizes for primal-dual hybrid gradient methods and for
//! randomized primal-dual coordinate descent.

pub mod error;
pub mod gap;
pub mod linalg;
pub mod pdhg;
pub mod problem;
pub mod purecd;
pub mod rate;
pub mod trace;

pub use error::{Error, Result};
