//! Finite quotients of lamplighter, Baumslag-Solitar and SOL groups: word
//! metrics, l^p isoperimetric profiles in balls, equivariant low-distortion
//! embeddings into l^p and distortion measurement.

pub mod cayley;
pub mod cli;
pub mod distortion;
pub mod embed;
pub mod error;
pub mod group;
pub mod linalg;
pub mod profile;

pub use error::{Error, Result};
