//! Floating point abstraction shared by the geometric code.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Coordinate scalar: `f32` or `f64`.
///
/// Topology (vertex identity, generations, tags) never depends on the scalar;
/// only coordinates and the measures derived from them do.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Relative volume `|T| / diam(T)^n` below which a cell is rejected.
    const DEGENERACY_TOL: f64;
    /// Slack on barycentric coordinates in point location and containment tests.
    const BARY_TOL: f64;
    /// Relative slack of the conformity checker's coplanarity test.
    const PLANE_TOL: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("integer representable in scalar type")
    }
}

impl Scalar for f64 {
    const DEGENERACY_TOL: f64 = 1e-12;
    const BARY_TOL: f64 = 1e-12;
    const PLANE_TOL: f64 = 1e-10;
}

impl Scalar for f32 {
    const DEGENERACY_TOL: f64 = 1e-6;
    const BARY_TOL: f64 = 1e-5;
    const PLANE_TOL: f64 = 1e-4;
}
