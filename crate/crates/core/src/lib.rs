//! Sasaki-metric area of unit vector fields on the round 2-sphere.
//!
//! Fields are described by an angle function `θ(α, β)` against the frame
//! `{e1, e2}` tangent to parallels and meridians, so that
//! `V = cos θ · e1 + sin θ · e2`. The crate evaluates the area functional
//! on spherical annuli `|α| ≤ α₀` and on the twice-punctured sphere,
//! computes the annulus lower bound and its closed-form minimizer, and
//! rediscovers that minimizer by discrete variational descent.
//!
//! The crate is `no_std` and only needs `alloc`; all IO lives in the
//! `sasaki` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod closed_forms;
pub mod elliptic;
mod error;
pub mod fields;
pub mod functional;
pub mod optimizer;
pub mod quadrature;
pub mod sphere;
pub mod spline;

pub use error::{Error, Result};
