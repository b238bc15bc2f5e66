//! Exact-arithmetic library for copulas and multivariate measures of concordance.
//!
//! Everything in the identity-checking path is computed over arbitrary-precision
//! rationals, so algebraic relations between concordance values can be asserted
//! as exact equalities rather than within floating-point tolerances. The main
//! pieces:
//!
//! * [`grid::MassGrid`] — checkerboard copulas with exact mass tensors and
//!   prefix sums; the workhorse representation.
//! * [`copula::Copula`] — checkerboards, the singular copulas of
//!   `(±U, …, ±U)`, convex mixtures, and product extensions.
//! * [`symmetry::Symmetry`] — the group of cube symmetries (permutations and
//!   coordinate flips) acting on copulas.
//! * [`marginals`] — extended marginals, proper copulas, and the concordance
//!   order.
//! * [`concordance::Measure`] — Nelsen's multivariate rho and tau plus the
//!   extension of a bivariate Spearman/Kendall base, with their transition
//!   sequences.
//! * [`subsets`] — subset families and the weighted marginal sums that the
//!   identity layer is written in.
//! * [`identities`] / [`suite`] — machine checks of the reflection-reduction,
//!   complementarity, Úbeda, and reflected-M formulas, bundled into seeded
//!   verification suites.

pub mod concordance;
pub mod copula;
mod error;
pub mod generate;
pub mod grid;
pub mod identities;
pub mod index_set;
pub mod marginals;
pub mod rational;
pub mod subsets;
pub mod suite;
pub mod symmetry;

pub use concordance::Measure;
pub use copula::{Copula, Point, ReflectedM};
pub use error::{Error, Result};
pub use grid::MassGrid;
pub use identities::{IdentityReport, Verdict};
pub use index_set::IndexSet;
pub use rational::Rational;
pub use symmetry::Symmetry;
