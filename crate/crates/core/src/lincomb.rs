//! Finite formal linear combinations of basis elements with [`Scalar`]
//! coefficients.
//!
//! This is the universal element representation: free differential algebra
//! elements, shuffle algebra elements and forest elements are all
//! `LinComb<B>` for a suitable basis type `B`. Keys are kept in `B`'s total
//! order and zero coefficients are pruned eagerly, so structural equality is
//! exact algebra equality and printing is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinComb<B: Ord> {
    terms: BTreeMap<B, Scalar>,
}

impl<B: Ord> Default for LinComb<B> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<B: Ord + Clone> LinComb<B> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `b` with coefficient 1.
    pub fn basis(b: B) -> Self {
        Self::term(b, Scalar::one())
    }

    pub fn term(b: B, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(b, c);
        }
        LinComb { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (B, Scalar)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (b, c) in iter {
            out.add_term(b, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&B, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: &B) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, b: B, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(b) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// In-place sum; avoids cloning the accumulator in hot loops.
    pub fn add_assign(&mut self, other: &Self) {
        for (b, c) in other.terms() {
            self.add_term(b.clone(), c.clone());
        }
    }

    /// In-place `self += c * other`.
    pub fn add_scaled_assign(&mut self, c: &Scalar, other: &Self) {
        if c.is_zero() {
            return;
        }
        for (b, v) in other.terms() {
            self.add_term(b.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (b, v) in &self.terms {
            out.add_term(b.clone(), v * c);
        }
        out
    }

    /// Linear extension of a basis-to-element map.
    pub fn map<C: Ord + Clone>(&self, mut f: impl FnMut(&B) -> LinComb<C>) -> LinComb<C> {
        let mut out = LinComb::zero();
        for (b, c) in &self.terms {
            for (b2, c2) in f(b).terms {
                out.add_term(b2, &c2 * c);
            }
        }
        out
    }

    /// Linear extension of a basis-to-basis map.
    pub fn map_basis<C: Ord + Clone>(&self, mut f: impl FnMut(&B) -> C) -> LinComb<C> {
        let mut out = LinComb::zero();
        for (b, c) in &self.terms {
            out.add_term(f(b), c.clone());
        }
        out
    }
}

/// Bilinear extension of a map on basis pairs.
pub fn bilinear<A, B, C>(
    u: &LinComb<A>,
    v: &LinComb<B>,
    mut f: impl FnMut(&A, &B) -> LinComb<C>,
) -> LinComb<C>
where
    A: Ord + Clone,
    B: Ord + Clone,
    C: Ord + Clone,
{
    let mut out = LinComb::zero();
    for (a, ca) in u.terms() {
        for (b, cb) in v.terms() {
            let c = ca * cb;
            for (k, ck) in f(a, b).terms {
                out.add_term(k, &ck * &c);
            }
        }
    }
    out
}

impl<B: Ord + Clone> Add for &LinComb<B> {
    type Output = LinComb<B>;
    fn add(self, rhs: &LinComb<B>) -> LinComb<B> {
        let mut out = self.clone();
        for (b, c) in rhs.terms() {
            out.add_term(b.clone(), c.clone());
        }
        out
    }
}

impl<B: Ord + Clone> Sub for &LinComb<B> {
    type Output = LinComb<B>;
    fn sub(self, rhs: &LinComb<B>) -> LinComb<B> {
        self + &-rhs
    }
}

impl<B: Ord + Clone> Neg for &LinComb<B> {
    type Output = LinComb<B>;
    fn neg(self) -> LinComb<B> {
        LinComb {
            terms: self.terms.iter().map(|(b, c)| (b.clone(), -c)).collect(),
        }
    }
}

/// Controls whether a basis element must be parenthesized when it carries a
/// coefficient, e.g. tensor words `a (x) b` print as `2*(a (x) b)`.
pub trait BasisDisplay: fmt::Display {
    fn is_unit_basis(&self) -> bool;
    fn needs_parens_with_coeff(&self) -> bool {
        false
    }
}

impl<B: Ord + BasisDisplay> fmt::Display for LinComb<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (b, c) in &self.terms {
            let (neg, body) = render_lc_term(b, c);
            if first {
                if neg {
                    write!(f, "-{body}")?;
                } else {
                    write!(f, "{body}")?;
                }
                first = false;
            } else if neg {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

impl<B: Ord + BasisDisplay> fmt::Debug for LinComb<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn render_lc_term<B: BasisDisplay>(b: &B, c: &Scalar) -> (bool, String) {
    if b.is_unit_basis() {
        if c.is_single_term() && c.single_term_negative() {
            return (true, (&Scalar::zero() - c).to_string());
        }
        return (false, c.to_string());
    }
    let basis = if b.needs_parens_with_coeff() && !c.is_one() {
        format!("({b})")
    } else {
        b.to_string()
    };
    if c.is_one() {
        (false, basis)
    } else if c.is_single_term() {
        let neg = c.single_term_negative();
        let c = if neg { &Scalar::zero() - c } else { c.clone() };
        if c.is_one() {
            (neg, basis)
        } else {
            (neg, format!("{c}*{basis}"))
        }
    } else {
        (false, format!("({c})*{basis}"))
    }
}
