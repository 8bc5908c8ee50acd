//! Planar portraits of stable maps from closed manifolds to the plane.
//!
//! The crate covers both directions: reading a portrait off an explicit
//! map (apparent contour tracing, cusp detection, fiber counting) and
//! building portraits combinatorially, plus the invariants tying a
//! portrait to its source manifold (stratified Euler characteristic,
//! cusp parity, Morse data of linear projections).

pub mod analysis;
pub mod constructors;
pub mod expr;
pub mod local_models;
pub mod numeric;
pub mod portrait;
pub mod render;
