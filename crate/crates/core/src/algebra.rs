//! Context handles for the algebras in this crate.
//!
//! An [`Algebra`] value carries whatever context the carrier needs (e.g. a
//! truncation order) and exposes the ring operations on its element type.
//! The weight enters only through [`Algebra::scale`]: generic carriers keep
//! coefficients in the ground ring `Q[L]`, while specialized instances (see
//! [`crate::axioms::DegenerateInstance`]) substitute a concrete rational for
//! `L` inside `scale`. Identity checkers are written once against these
//! traits and run unchanged over every carrier.

use std::fmt;

use crate::scalar::Scalar;

pub trait Algebra {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// In-place `acc += c * x`; carriers with cheap term-wise insertion
    /// override this to avoid cloning the accumulator per summand.
    fn add_scaled_assign(&self, acc: &mut Self::Elem, c: &Scalar, x: &Self::Elem) {
        *acc = self.add(acc, &self.scale(c, x));
    }

    /// Exact equality. Truncated carriers override this to compare the
    /// entries both sides retain.
    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a == b
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.eq(a, &self.zero())
    }
}

/// An algebra with a derivation of the fixed weight: `d(xy) = d(x)y + x d(y)
/// + L d(x)d(y)`.
pub trait Differential: Algebra {
    fn d(&self, a: &Self::Elem) -> Self::Elem;

    fn d_pow(&self, a: &Self::Elem, n: u32) -> Self::Elem {
        let mut out = a.clone();
        for _ in 0..n {
            out = self.d(&out);
        }
        out
    }
}

/// An algebra with a Rota-Baxter operator of the fixed weight:
/// `P(x)P(y) = P(xP(y)) + P(P(x)y) + L P(xy)`.
pub trait RotaBaxter: Algebra {
    fn rb(&self, a: &Self::Elem) -> Self::Elem;
}

/// The ground ring viewed as an algebra over itself.
pub struct ScalarAlgebra;

impl Algebra for ScalarAlgebra {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    fn one(&self) -> Scalar {
        Scalar::one()
    }

    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }

    fn neg(&self, a: &Scalar) -> Scalar {
        -a
    }

    fn scale(&self, c: &Scalar, a: &Scalar) -> Scalar {
        c * a
    }

    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }
}
