//! Exact rational algorithms for infra-solvmanifolds: Jordan decompositions,
//! nilpotent Lie algebras, split solvable hulls, Γ-actions and
//! Chevalley–Eilenberg cohomology.

pub mod action;
pub mod bundle;
pub mod cohomology;
pub mod error;
pub mod hull;
pub mod induce;
pub mod jordan;
pub mod lie;
pub mod linalg;
pub mod matrix;
pub mod mpoly;
pub mod poly;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use rational::Rational;
