//! Time-scale calculus and a verification harness for weighted
//! Ostrowski-type inequalities built on a two-mean Montgomery identity.
//!
//! Layers, bottom-up:
//! - [`timescale`]: discrete and continuous time scales, jump operators;
//! - [`calculus`]: Delta derivative, Delta integral, generalized monomials;
//! - [`ostrowski`]: the weighted kernel, the identity, and the bound families;
//! - [`harness`]: seeded randomized suites and a sharpness search.

pub mod calculus;
pub mod error;
pub mod harness;
pub mod ostrowski;
pub mod timescale;

pub use calculus::{Func, Polynomial, SampledFunc};
pub use error::{Error, Result};
pub use ostrowski::{BoundReport, BoundVariant, KernelSpec, Theorem};
pub use timescale::{PointClass, PointTag, ScaleKind, TimeScale};
