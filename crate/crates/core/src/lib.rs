//! Enumeration engine for cyclic `p`-fold covers `Y^p = F(X)` of the projective
//! line over small finite fields, with exact statistics of their Frobenius traces.

pub mod counting;
pub mod cyclo;
pub mod enumerate;
pub mod error;
pub mod experiment;
pub mod gf;
pub mod moduli;
pub mod poly;
pub mod rvmodel;
pub mod trace;

pub use error::{Error, Result};
