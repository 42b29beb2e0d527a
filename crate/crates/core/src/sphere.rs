//! Latitude/longitude coordinates, the `{e1, e2}` frame and annulus regions.

use core::f64::consts::{FRAC_PI_2, TAU};

use libm::{cos, floor, sin};

use crate::{Error, Result};

/// Maps any finite longitude into `(0, 2π]`.
pub fn normalize_longitude(beta: f64) -> f64 {
    let r = beta - TAU * floor(beta / TAU);
    if r <= 0.0 || r > TAU {
        TAU
    } else {
        r
    }
}

/// A point of the sphere minus its poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon {
    alpha: f64,
    beta: f64,
}

impl LatLon {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha.abs() >= FRAC_PI_2 || !beta.is_finite() {
            return Err(Error::InvalidLatitude { alpha });
        }
        Ok(LatLon { alpha, beta: normalize_longitude(beta) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// The band `|α| ≤ α₀` between two opposite parallels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSpec {
    alpha0: f64,
}

impl AnnulusSpec {
    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn contains(&self, alpha: f64) -> bool {
        alpha.abs() <= self.alpha0
    }
}

pub fn make_annulus(alpha0: f64) -> Result<AnnulusSpec> {
    if !(alpha0 > 0.0 && alpha0 < FRAC_PI_2) {
        return Err(Error::DegenerateAnnulus { alpha0 });
    }
    Ok(AnnulusSpec { alpha0 })
}

/// Region a field or an area integral lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Annulus(AnnulusSpec),
    /// The sphere with both poles removed, `|α| < π/2`.
    PuncturedSphere,
}

impl Region {
    /// Largest admissible `|α|`.
    pub fn half_width(&self) -> f64 {
        match self {
            Region::Annulus(a) => a.alpha0,
            Region::PuncturedSphere => FRAC_PI_2,
        }
    }

    pub fn contains(&self, alpha: f64) -> bool {
        match self {
            Region::Annulus(a) => a.contains(alpha),
            Region::PuncturedSphere => alpha.abs() < FRAC_PI_2,
        }
    }
}

pub type Vec3 = [f64; 3];

/// Ambient realization of the frame at a point: `e1` along the parallel,
/// `e2` along the meridian, and `e1 × e2 = point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame3 {
    pub point: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

pub fn frame_at(p: LatLon) -> Frame3 {
    let (sa, ca) = (sin(p.alpha), cos(p.alpha));
    let (sb, cb) = (sin(p.beta), cos(p.beta));
    Frame3 {
        point: [ca * cb, ca * sb, sa],
        e1: [-sb, cb, 0.0],
        e2: [-sa * cb, -sa * sb, ca],
    }
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
