//! Conformal transformations of Minkowski space as O(d,2) matrices, the
//! canonical flows of wedges, double cones and light cones, modular theory of
//! finite-dimensional standard subspaces, and a lattice chiral field on the
//! circle on which these are compared.

pub mod chiral;
pub mod cli;
pub mod confgroup;
pub mod error;
pub mod flows;
pub mod geometry;
pub mod modular;
pub mod tolerances;
