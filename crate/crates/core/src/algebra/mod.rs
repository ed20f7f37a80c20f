//! Coefficient arithmetic: exact rationals, big reals, polynomials and jets.

mod bigfloat;
mod jet;
mod poly;
pub mod roots;
mod scalar;

pub use bigfloat::{BigFloat, DEFAULT_PRECISION};
pub use jet::Jet;
pub use poly::{Poly, PolyX, PolyXL, Render};
pub use scalar::{ratio, Rational, Ring, Scalar, ScalarKind};

use num_traits::One;

use crate::error::Result;

/// A representation of a coefficient function `p(x)` that the iteration
/// recurrences can differentiate and combine.
pub trait Representation: Clone + std::fmt::Debug + Send + Sync {
    /// `true` when arithmetic is exact and an identically-zero result is a proof.
    const EXACT: bool;

    fn differentiate(&self) -> Result<Self>;
    fn try_add(&self, other: &Self) -> Result<Self>;
    fn try_sub(&self, other: &Self) -> Result<Self>;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn vanishes(&self) -> bool;
    /// The constant one in the same representation (same center and order for jets).
    fn one_like(&self) -> Self;
}

impl<S: Scalar> Representation for Poly<S> {
    const EXACT: bool = matches!(S::KIND, ScalarKind::ExactRational);

    fn differentiate(&self) -> Result<Self> {
        Ok(self.derivative())
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(self - other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn vanishes(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn one_like(&self) -> Self {
        Poly::one()
    }
}

impl Representation for PolyXL {
    const EXACT: bool = true;

    fn differentiate(&self) -> Result<Self> {
        Ok(self.derivative())
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(self - other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn vanishes(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn one_like(&self) -> Self {
        Poly::one()
    }
}

impl<S: Scalar> Representation for Jet<S> {
    const EXACT: bool = false;

    fn differentiate(&self) -> Result<Self> {
        self.derivative()
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        Jet::try_add(self, other)
    }
    fn try_sub(&self, other: &Self) -> Result<Self> {
        Jet::try_sub(self, other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        Jet::try_mul(self, other)
    }
    fn vanishes(&self) -> bool {
        Jet::is_zero(self)
    }
    fn one_like(&self) -> Self {
        let one = self.center().like_rational(&Rational::one());
        Jet::constant(one, self.center().clone(), self.order())
    }
}

/// Representations that can be evaluated at a point of the scalar field.
pub trait PointValue<S> {
    fn value_at(&self, x: &S) -> Result<S>;
}

impl<S: Scalar> PointValue<S> for Poly<S> {
    fn value_at(&self, x: &S) -> Result<S> {
        Ok(self.eval(x))
    }
}

impl<S: Scalar> PointValue<S> for Jet<S> {
    /// Jets only know their value at the center.
    fn value_at(&self, x: &S) -> Result<S> {
        if x != self.center() {
            return Err(crate::error::Error::CenterMismatch);
        }
        self.value()
    }
}
