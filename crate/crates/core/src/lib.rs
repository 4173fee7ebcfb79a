//! Askey-Wilson polynomials with conjugate-pair parameters, the q-Hermite and
//! Al-Salam-Chihara families they are built from, the associated densities
//! and the closed-form conditional q-Hermite moments, together with an
//! adaptive quadrature suite that checks the orthogonality relations and
//! identities numerically.

pub mod awpoly;
pub mod densities;
pub mod error;
pub mod moments;
pub mod polyfam;
pub mod qcore;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use qcore::{QParam, TruncationPolicy};
pub use scalar::Scalar;
