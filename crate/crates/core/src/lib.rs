//! On-line hypothesis selection.
//!
//! Three ways of picking a good hypothesis out of a finite class from a
//! stream of labeled examples:
//!
//! * batch selection draws a fixed sample sized from a lower bound `gamma`
//!   on the best hypothesis's advantage and picks the empirical best;
//! * constrained selection accumulates weights and stops once one reaches a
//!   threshold derived from `gamma`;
//! * adaptive selection needs no prior knowledge and stops once some success
//!   count clears a tolerance that shrinks with the sample size.
//!
//! [`bounds`] holds the sample-complexity calculus, [`hypotheses`] the
//! synthetic classes and example sources, [`selectors`] the algorithms,
//! [`experiments`] the seeded trial harness and [`cli`] the command-line
//! front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod hypotheses;
pub mod selectors;

pub use error::{Error, Result};
