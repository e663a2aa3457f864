//! Separation of variables for the (2+1)-dimensional Dirac equation in an
//! external electromagnetic field.
//!
//! The crate covers the gamma-matrix algebra ([`clifford`]), charts of flat
//! spacetime ([`geometry`]), symmetry operators built from Killing fields
//! ([`symmetry`]), the seven complete sets ([`separation`]), the reduced ODE
//! systems ([`reduction`]) and a finite-difference residual oracle
//! ([`verification`]).

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod clifford;
pub mod config;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod linalg;
pub mod pipeline;
pub mod reconciliation;
pub mod reduction;
pub mod sampling;
pub mod separation;
pub mod symmetry;
pub mod verification;

pub use error::{Error, Result};
