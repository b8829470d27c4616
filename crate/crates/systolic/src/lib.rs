//! Systoles, volumes, and systolic ratios of compact orientable flat
//! 3-manifolds, in their flat metrics and in a family of singular
//! metrics warped over a planar lattice.
//!
//! The library is organised bottom-up:
//!
//! * [`lattice`]: square and hexagonal planar lattices and their
//!   Dirichlet-Voronoi cells,
//! * [`metric`]: the warped metric `dx^2 + dy^2 + psi(x,y) dz^2` with
//!   `psi = cos^2(dist to lattice)`, curve lengths, and the periodic
//!   cosine profile used for the Klein bottle cross-check,
//! * [`groups`]: exact screw motions and translations generating the
//!   fundamental groups, quotient descriptions, deck words,
//! * [`volume`]: cell integrals and quotient volumes,
//! * [`systole`]: closed-form systoles, displacement lower bounds, and
//!   systolic ratios,
//! * [`oracle`]: an independent discretised shortest-path oracle plus
//!   Jacobi-field second-variation checks,
//! * [`cli`]: the command line front end.

pub mod cli;
pub mod error;
pub mod geom;
pub mod groups;
pub mod lattice;
pub mod metric;
pub mod oracle;
pub mod systole;
pub mod volume;

pub use error::{Error, Result};
