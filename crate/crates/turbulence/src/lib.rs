//! Framed turbulence charts and their flow polyhedra.
//!
//! A chart is an undirected multigraph whose internal vertices split their
//! half-edges into two ordered classes. Unit nonnegative flows form the
//! turbulence polyhedron; routes and bands (strings that cross the split at
//! every internal vertex) present it, and compatible families of them
//! subdivide it.

pub mod chart;
pub mod compat;
pub mod convert;
pub mod envelope;
pub mod gen;
pub mod io;
pub mod linalg;
pub mod polyhedron;
pub mod render;
pub mod trails;
