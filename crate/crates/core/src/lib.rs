//! Exact counting of non-negative integer solutions of `a₁x₁ + … + aₙxₙ = b`.
//!
//! Several independent routes compute the same count `P(b)`:
//!
//! * [`equation::count_oracle`]: the classic coin-change table, used only to certify the others.
//! * [`bounded`]: inclusion–exclusion for box-bounded variables and the 0/1 counter `P*`.
//! * [`recurrences`]: a flat recurrence in `b` and a base-`m` decimation recurrence that
//!   touches only `O(log b)` arguments.
//! * [`quasipoly`]: the per-residue quasi-polynomial in `⌊b/M⌋`, with the closed form for
//!   the shift-free residues and the two-variable special case.
//! * [`transform`]: re-expressing the count of one equation through another equation with the
//!   same number of variables.
//!
//! All arithmetic is exact (arbitrary precision); nothing goes through floating point.

pub mod bounded;
pub mod cli;
pub mod combinatorics;
pub mod equation;
pub mod error;
pub mod quasipoly;
pub mod recurrences;
pub mod transform;

pub use combinatorics::BigCount;
pub use equation::{count_oracle, Equation, Residue};
pub use error::{Error, Result};
