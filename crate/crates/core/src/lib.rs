pub mod error;
pub mod frames;
pub mod hahn_mv;
pub mod krawtchouk_mv;
pub mod lattice;
pub mod oracle;
pub mod ortho1d;
pub mod scalar;
pub mod simplex_jacobi;

pub use error::{Error, Result};
