//! Exact computation with rational multiplicative-group actions.
//!
//! A rational `Gm`-action on a variety with function field `K` is encoded by
//! its comorphism `K -> K(t)`; the infinitesimal side is a derivation of `K`
//! with a generating set of integer-weight eigenvectors. This crate models
//! `K` as `Q(x1, ..., xn)` and provides both directions of the
//! correspondence:
//!
//! * [`GmAction::extract_derivation`] takes `f` to `ev_1(d/dt phi*(f))`;
//! * [`action_from_derivation`] sums `exp(z D)`, substitutes the logarithm
//!   series for `z`, reconstructs the rational functions of `t`, and only
//!   returns a certificate once the result is checked exactly.
//!
//! All arithmetic is exact over `Q`; there is no floating point anywhere.

mod action;
mod context;
mod correspond;
mod derivation;
mod error;
pub mod expr;
mod factored;
mod gcd;
mod poly;
mod ratfunc;
mod series;

pub use action::{GmAction, LaurentNormalForm, SliceResult, EXT_VAR};
pub use context::Context;
pub use correspond::{
    action_from_derivation, rational_reconstruct, round_trip_ad, round_trip_da, Certificate, Verdict,
    DEFAULT_DMAX, DEFAULT_ORDER,
};
pub use derivation::{BirationalMap, Derivation};
pub use error::{Error, Result};
pub use gcd::poly_gcd;
pub use poly::{Monomial, MultiPoly};
pub use ratfunc::RatFunc;
pub use series::{SeriesVar, TruncSeries};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
