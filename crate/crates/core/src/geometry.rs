//! Metric primitives on `S^d` and `RP^d`.
//!
//! Distances are computed as `2·atan2(‖x−y‖, ‖x+y‖)`, which equals
//! `arccos⟨x,y⟩` but keeps full relative precision near `0` and `π`.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::math::{self, PI, TAU};
use crate::rng::RngStream;

/// A point of `S^d`, stored as `d + 1` coordinates of unit Euclidean norm.
#[derive(Clone, PartialEq)]
pub struct UnitVector {
    coords: Vec<f64>,
}

impl fmt::Debug for UnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("UnitVector").field(&self.coords).finish()
    }
}

impl UnitVector {
    /// Normalizes `coords`; needs at least two finite coordinates and a
    /// nonzero norm.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDimension(coords.len().saturating_sub(1)));
        }
        let n = math::norm(&coords);
        if !n.is_finite() || n == 0.0 || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateVector);
        }
        Ok(Self::scaled(coords, n))
    }

    /// Keeps `coords` bit for bit when their norm is within `1e−12` of one,
    /// as for coordinates read back from storage; fails otherwise.
    pub fn from_stored(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDimension(coords.len().saturating_sub(1)));
        }
        let near_unit = (math::norm(&coords) - 1.0).abs() <= 1e-12;
        if !near_unit || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateVector);
        }
        Ok(Self { coords })
    }

    fn scaled(mut coords: Vec<f64>, norm: f64) -> Self {
        if norm != 1.0 {
            coords.iter_mut().for_each(|c| *c /= norm);
        }
        Self { coords }
    }

    /// Normalizes without validation; the caller guarantees a nonzero,
    /// finite vector of length ≥ 2.
    pub(crate) fn normalized(coords: Vec<f64>) -> Self {
        let n = math::norm(&coords);
        debug_assert!(n > 0.0 && n.is_finite());
        Self::scaled(coords, n)
    }

    /// Wraps coordinates already known to be of unit norm, e.g. a signed
    /// permutation of another unit vector.
    pub(crate) fn from_unit_coords(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    /// Standard basis vector `e_{index+1}` of `S^dim` (zero-based `index`).
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidDimension(dim));
        }
        if index > dim {
            return Err(Error::InvalidParameter(alloc::format!(
                "basis index {index} out of range for S^{dim}"
            )));
        }
        let mut coords = alloc::vec![0.0; dim + 1];
        coords[index] = 1.0;
        Ok(Self { coords })
    }

    /// The point `(cos θ, sin θ)` of `S^1`.
    pub fn from_angle(theta: f64) -> Self {
        Self {
            coords: alloc::vec![math::cos(theta), math::sin(theta)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn neg(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        math::dot(&self.coords, &other.coords)
    }

    /// Angular coordinate of a point of `S^1`.
    pub fn angle(&self) -> Result<CircleAngle> {
        CircleAngle::from_unit_vector(self)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// An angle on `S^1`, always reduced into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CircleAngle(f64);

impl CircleAngle {
    pub fn new(theta: f64) -> Self {
        Self(math::rem_euclid(theta, TAU))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn to_unit_vector(self) -> UnitVector {
        UnitVector::from_angle(self.0)
    }

    pub fn from_unit_vector(x: &UnitVector) -> Result<Self> {
        if x.dim() != 1 {
            return Err(Error::DimensionMismatch {
                left: x.dim(),
                right: 1,
            });
        }
        Ok(Self::new(math::atan2(x.coords[1], x.coords[0])))
    }

    /// Shift by `delta` radians.
    pub fn shifted(self, delta: f64) -> Self {
        Self::new(self.0 + delta)
    }
}

/// Geodesic distance on the unit sphere, from raw coordinates.
#[inline]
pub(crate) fn geodesic(a: &[f64], b: &[f64]) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    2.0 * math::atan2(math::sqrt(diff), math::sqrt(sum))
}

/// Quotient distance on `RP^d`, from raw coordinates.
#[inline]
pub(crate) fn projective(a: &[f64], b: &[f64]) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    let (lo, hi) = if diff < sum { (diff, sum) } else { (sum, diff) };
    2.0 * math::atan2(math::sqrt(lo), math::sqrt(hi))
}

/// `arccos⟨x, y⟩ ∈ [0, π]`.
pub fn geodesic_distance(x: &UnitVector, y: &UnitVector) -> Result<f64> {
    x.check_dim(y)?;
    Ok(geodesic(&x.coords, &y.coords))
}

/// `arccos|⟨x, y⟩| ∈ [0, π/2]`; invariant under negating either argument.
pub fn projective_distance(x: &UnitVector, y: &UnitVector) -> Result<f64> {
    x.check_dim(y)?;
    Ok(projective(&x.coords, &y.coords))
}

/// Arc-length distance on `S^1` in angular coordinates, in `[0, π]`.
pub fn circle_distance(a: CircleAngle, b: CircleAngle) -> f64 {
    let d = (a.0 - b.0).abs();
    if d > PI {
        TAU - d
    } else {
        d
    }
}

/// Euclidean chord length `‖x − y‖`.
pub fn chord_length(x: &UnitVector, y: &UnitVector) -> Result<f64> {
    x.check_dim(y)?;
    let d: f64 = x
        .coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(math::sqrt(d))
}

pub(crate) fn gaussian_vec(len: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Rotation-invariant sample of `S^dim` (normalized standard normal vector).
pub fn sample_uniform(dim: usize, rng: &mut RngStream) -> Result<UnitVector> {
    if dim < 1 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(sample_uniform_unchecked(dim, rng))
}

pub(crate) fn sample_uniform_unchecked(dim: usize, rng: &mut RngStream) -> UnitVector {
    loop {
        let v = gaussian_vec(dim + 1, rng);
        let n = math::norm(&v);
        if n > 1e-150 {
            return UnitVector::scaled(v, n);
        }
    }
}

/// Follows the great circle from `x` in tangent direction `v`; the arc
/// length travelled is `‖v‖`. `v` must be orthogonal to `x`.
pub(crate) fn exp_map(x: &[f64], v: &[f64]) -> UnitVector {
    let t = math::norm(v);
    if t < 1e-300 {
        return UnitVector::normalized(x.to_vec());
    }
    let (s, c) = (math::sin(t), math::cos(t));
    let coords = x.iter().zip(v).map(|(xi, vi)| c * xi + s * vi / t).collect();
    UnitVector::normalized(coords)
}

/// Removes the component of `v` along the unit vector `x`.
pub(crate) fn tangent_part(x: &[f64], v: &mut [f64]) {
    let c = math::dot(x, v);
    v.iter_mut().zip(x).for_each(|(vi, xi)| *vi -= c * xi);
}

/// Random geodesic step from `x`; the typical displacement is `step`.
pub(crate) fn perturb(x: &UnitVector, step: f64, rng: &mut RngStream) -> UnitVector {
    let mut v = gaussian_vec(x.coords.len(), rng);
    tangent_part(&x.coords, &mut v);
    let scale = step / math::sqrt(x.dim() as f64);
    v.iter_mut().for_each(|c| *c *= scale);
    exp_map(&x.coords, &v)
}

/// Log-uniform variate in `[lo, hi]`.
pub(crate) fn log_uniform(lo: f64, hi: f64, rng: &mut RngStream) -> f64 {
    let u: f64 = rng.random();
    math::exp(math::ln(lo) + u * (math::ln(hi) - math::ln(lo)))
}
