//! Exact fairness checks for allocating indivisible goods and chores that come
//! in several copies, where no agent may hold two copies of the same type.

pub mod criteria;
pub mod duality;
pub mod error;
pub mod io;
pub mod leveled;
pub mod model;
pub mod random;
pub mod rational;
pub mod search;
pub mod shares;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{Allocation, AllocationViolation, Bundle, Instance, ItemKind, ItemType, SignClass};
pub use rational::Rational;
