//! Hexagonal circle patterns for the discrete maps z^c and Log.
//!
//! The map z on the lattice region Q is evolved by prescribed face
//! cross-ratios together with an axis constraint ([`pattern_core`]); the
//! same patterns are described by a radius function on the dual labels
//! ([`radius_system`]). Border behaviour is governed by a discrete
//! Painleve recurrence ([`painleve`]) and a discrete Riccati recurrence
//! ([`riccati`]). [`geometry`] rebuilds patterns from radii and certifies
//! immersion.
//!
//! Every numerical routine is generic over [`real::Real`], implemented for
//! `f64` and for the 512-bit [`real::Ext`].

// `!(x > 0)` is the NaN-rejecting form throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod lattice;
pub mod painleve;
pub mod pattern_core;
pub mod radius_system;
pub mod real;
pub mod riccati;

pub use error::{Error, Result};
pub use lattice::{MultiIndex, SubIndex};
pub use pattern_core::{PatternParams, ZField};
pub use radius_system::RadiusField;
pub use real::{Ext, Precision, Real};
