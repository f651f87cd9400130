//! The weighted kernel, its Montgomery identity, and the bounds built on it.

mod bounds;
mod kernel;
mod proof;
mod specialization;

pub use bounds::*;
pub use kernel::*;
pub use proof::*;
pub use specialization::*;
