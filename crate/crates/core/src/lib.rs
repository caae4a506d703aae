//! Flat surfaces, Dehn–Thurston multicurve counting and the Jacobian calculus
//! of square-root period maps.
//!
//! The crate is organised by subsystem:
//!
//! * [`surface`]: triangulated translation and half-translation surfaces,
//!   geodesic flow, saddle connections, cylinders and the orientation double cover.
//! * [`delaunay`]: edge-flip Delaunay triangulations, the short-saddle-connection
//!   check, period coordinates and the Euclidean distance between surfaces.
//! * [`homology`] and [`cocycle`]: homology frames, intersection form, duals,
//!   the flow action on cohomology and integer mapping-class matrices.
//! * [`dehn_thurston`]: multicurve counting with the max-type extremal length
//!   estimate, twist actions and the Busemann / Patterson–Sullivan cocycles.
//! * [`surgery`]: transverse multicurves and the systole-inflating deformation.
//! * [`jacobians`]: zeros to coefficients, Vandermonde, zero trees, periods.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cocycle;
pub mod config;
pub mod dehn_thurston;
pub mod delaunay;
pub mod homology;
pub mod jacobians;
pub mod linalg;
pub mod origami;
pub mod stats;
pub mod surface;
pub mod surgery;

pub use config::RunConfig;
pub use surface::{FlatSurface, Holonomy, Kind};
