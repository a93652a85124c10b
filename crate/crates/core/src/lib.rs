//! Discrete potential theory on weighted planar graphs embedded in the plane.
//!
//! The crate builds embedded graphs with a rotation system and face structure,
//! carves discrete domains with counterclockwise-ordered oriented boundary
//! edges, and computes the classical objects of discrete potential theory on
//! them: harmonic measure, Green's functions, random-walk partition functions,
//! discrete cross-ratios, discrete extremal length (with its exact dual), and
//! separator/annulus surgery. A Monte Carlo module provides free and
//! conditioned walk samplers, and [`harness`] evaluates comparability ratios
//! over a generated corpus of rough domains.
//!
//! The crate is `no_std` (with `alloc`); file formats, CLI, and parallel
//! corpus execution live in the companion `dpt-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod math;

pub mod domain;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod invariants;
pub mod montecarlo;
pub mod network;
pub mod potential;
pub mod solve;
pub mod surgery;

pub use domain::{BoundaryArc, BoundaryEdge, DiscreteDomain, Quadrilateral};
pub use graph::{EmbeddedGraph, Face, Point, StructureReport};
pub use network::{Endpoint, Network};
