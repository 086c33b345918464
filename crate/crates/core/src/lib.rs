//! Numerical toolkit for λ-hypersurfaces: hypersurfaces satisfying
//! `⟨(X − X0)/t0, N⟩ + H = λ`, the critical points of the Gaussian-weighted
//! area under weighted volume-preserving variations.
//!
//! The crate covers analytic families (spheres, cylinders), discrete planar
//! curves and their products with flat factors, Gaussian-weighted quadrature,
//! first and second variations, a discrete volume-preserving flow, spectral
//! stability on spheres, identity checks, and a shooting solver for closed
//! λ-curves.

pub mod curves;
pub mod error;
pub mod fields;
pub mod flow;
pub mod functionals;
pub mod geometry;
pub mod identities;
pub mod io;
pub mod quadrature;
pub mod stability;
pub mod variation;
pub mod vector;

pub use error::{Error, Result};
pub use geometry::{GeometrySample, Hypersurface, Param, PolylineCurve};
pub use quadrature::{build_grid, integrate, QuadratureGrid};
