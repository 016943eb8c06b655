//! Truncated weighted Hurwitz series over a base algebra.
//!
//! A series of order `N` stores the entries `f(0), ..., f(N)` of a function
//! on the naturals with values in the base algebra. The product is the
//! binomially weighted convolution
//!
//! ```text
//! (fg)(n) = sum_{k=0}^{n} sum_{j=0}^{n-k} C(n,k) C(n-k,j) L^k f(n-j) g(k+j)
//! ```
//!
//! and the two shift operators make this the universal example of the
//! structures in this crate: `partial` (drop the 0 slot) is a weighted
//! derivation, `pi` (prepend a 0) is a weighted Rota-Baxter operator, and
//! `partial . pi` is the identity.
//!
//! Entry `n` of every operation here depends only on entries `<= n+1` of
//! the inputs, so order-`N` truncations carry exact prefixes of the
//! untruncated series. Operations track orders precisely: `partial` loses
//! one, `pi` gains one, the product preserves. Binary operations on
//! mismatched orders are an error rather than a silent truncation; use
//! [`truncate_to`] to coerce explicitly. [`HurwitzAlgebra`] packages the
//! deliberate coercion policy needed to drive the generic identity
//! checkers over a fixed-order carrier.

use std::fmt;

use thiserror::Error;

use crate::algebra::{Algebra, Differential, RotaBaxter};
use crate::scalar::{binomial, Scalar};

/// Order-`N` truncation of a series: exactly `N + 1` entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HurwitzSeries<E> {
    entries: Vec<E>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HurwitzError {
    #[error("order mismatch: {0} vs {1} (truncate explicitly to combine)")]
    OrderMismatch(usize, usize),
    #[error("cannot shift an order-0 series down")]
    OrderZero,
    #[error("cannot extend a series of order {0} to order {1}")]
    TruncationGrows(usize, usize),
    #[error("a series needs at least one entry")]
    Empty,
}

impl<E: Clone> HurwitzSeries<E> {
    pub fn from_entries(entries: Vec<E>) -> Result<Self, HurwitzError> {
        if entries.is_empty() {
            return Err(HurwitzError::Empty);
        }
        Ok(HurwitzSeries { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entry(&self, n: usize) -> &E {
        &self.entries[n]
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }
}

impl<E: fmt::Display> fmt::Display for HurwitzSeries<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// The weighted Hurwitz product; both factors must have the same order.
pub fn hmul<A: Algebra>(
    base: &A,
    f: &HurwitzSeries<A::Elem>,
    g: &HurwitzSeries<A::Elem>,
) -> Result<HurwitzSeries<A::Elem>, HurwitzError> {
    if f.order() != g.order() {
        return Err(HurwitzError::OrderMismatch(f.order(), g.order()));
    }
    let n_max = f.order();
    let mut entries = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = base.zero();
        for k in 0..=n {
            for j in 0..=n - k {
                if base.is_zero(f.entry(n - j)) || base.is_zero(g.entry(k + j)) {
                    continue;
                }
                let coeff = &Scalar::from_rational(
                    &binomial(n as u32, k as u32) * &binomial((n - k) as u32, j as u32),
                ) * &Scalar::lambda_pow(k as u32);
                let prod = base.mul(f.entry(n - j), g.entry(k + j));
                base.add_scaled_assign(&mut acc, &coeff, &prod);
            }
        }
        entries.push(acc);
    }
    Ok(HurwitzSeries { entries })
}

/// The shift-down derivation: entry `n` of the result is `f(n + 1)`.
/// The order drops by one.
pub fn partial<E: Clone>(f: &HurwitzSeries<E>) -> Result<HurwitzSeries<E>, HurwitzError> {
    if f.order() == 0 {
        return Err(HurwitzError::OrderZero);
    }
    Ok(HurwitzSeries { entries: f.entries[1..].to_vec() })
}

/// The shift-up Rota-Baxter operator: entry 0 is zero, entry `n` is
/// `f(n - 1)`. The order grows by one.
pub fn pi<A: Algebra>(base: &A, f: &HurwitzSeries<A::Elem>) -> HurwitzSeries<A::Elem> {
    let mut entries = Vec::with_capacity(f.entries.len() + 1);
    entries.push(base.zero());
    entries.extend(f.entries.iter().cloned());
    HurwitzSeries { entries }
}

/// Constant series: `a` at entry 0, zero above.
pub fn kappa<A: Algebra>(base: &A, a: &A::Elem, order: usize) -> HurwitzSeries<A::Elem> {
    let mut entries = vec![a.clone()];
    entries.resize(order + 1, base.zero());
    HurwitzSeries { entries }
}

pub fn unit_series<A: Algebra>(base: &A, order: usize) -> HurwitzSeries<A::Elem> {
    kappa(base, &base.one(), order)
}

pub fn zero_series<A: Algebra>(base: &A, order: usize) -> HurwitzSeries<A::Elem> {
    HurwitzSeries { entries: vec![base.zero(); order + 1] }
}

/// Evaluation at 0, the counit of the construction.
pub fn epsilon<E: Clone>(f: &HurwitzSeries<E>) -> E {
    f.entries[0].clone()
}

/// The universal embedding of a differential algebra: entry `n` is the
/// n-th derivative of `x`.
pub fn eta<R: Differential>(alg: &R, x: &R::Elem, order: usize) -> HurwitzSeries<R::Elem> {
    let mut entries = Vec::with_capacity(order + 1);
    entries.push(x.clone());
    for n in 1..=order {
        let prev = entries[n - 1].clone();
        entries.push(alg.d(&prev));
    }
    HurwitzSeries { entries }
}

/// Entrywise image under a base-algebra map.
pub fn lift_entrywise<E, F>(
    h: impl Fn(&E) -> F,
    f: &HurwitzSeries<E>,
) -> HurwitzSeries<F> {
    HurwitzSeries { entries: f.entries.iter().map(h).collect() }
}

/// The lift of an algebra map out of a differential algebra: entry `n` is
/// the image of the n-th derivative.
pub fn cofree_lift<R: Differential, E>(
    f: impl Fn(&R::Elem) -> E,
    source: &R,
    x: &R::Elem,
    order: usize,
) -> HurwitzSeries<E> {
    let mut entries = Vec::with_capacity(order + 1);
    let mut cur = x.clone();
    for n in 0..=order {
        entries.push(f(&cur));
        if n < order {
            cur = source.d(&cur);
        }
    }
    HurwitzSeries { entries }
}

/// Explicit coercion down to a smaller (or equal) order.
pub fn truncate_to<E: Clone>(
    f: &HurwitzSeries<E>,
    order: usize,
) -> Result<HurwitzSeries<E>, HurwitzError> {
    if order > f.order() {
        return Err(HurwitzError::TruncationGrows(f.order(), order));
    }
    Ok(HurwitzSeries { entries: f.entries[..=order].to_vec() })
}

/// Fixed-order Hurwitz carrier usable as a target for the generic identity
/// checkers and morphism evaluations.
///
/// Elements may drift in order as shifts are applied, so the binary
/// operations here align both operands to the shorter order first and
/// equality compares the shared prefix; every retained entry is exact, so
/// each comparison is an exact instance of the identity under test. The
/// strict order-tracking entry points above stay the public arithmetic
/// surface.
pub struct HurwitzAlgebra<A: Algebra> {
    pub base: A,
    pub order: usize,
}

impl<A: Algebra> HurwitzAlgebra<A> {
    pub fn new(base: A, order: usize) -> Self {
        HurwitzAlgebra { base, order }
    }

    fn align(
        &self,
        a: &HurwitzSeries<A::Elem>,
        b: &HurwitzSeries<A::Elem>,
    ) -> (HurwitzSeries<A::Elem>, HurwitzSeries<A::Elem>) {
        let n = a.order().min(b.order());
        (
            truncate_to(a, n).expect("shrinking truncation"),
            truncate_to(b, n).expect("shrinking truncation"),
        )
    }
}

impl<A: Algebra> Algebra for HurwitzAlgebra<A> {
    type Elem = HurwitzSeries<A::Elem>;

    fn zero(&self) -> Self::Elem {
        zero_series(&self.base, self.order)
    }

    fn one(&self) -> Self::Elem {
        unit_series(&self.base, self.order)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (a, b) = self.align(a, b);
        let entries = a
            .entries
            .iter()
            .zip(&b.entries)
            .map(|(x, y)| self.base.add(x, y))
            .collect();
        HurwitzSeries { entries }
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        HurwitzSeries { entries: a.entries.iter().map(|x| self.base.neg(x)).collect() }
    }

    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Self::Elem {
        HurwitzSeries { entries: a.entries.iter().map(|x| self.base.scale(c, x)).collect() }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (a, b) = self.align(a, b);
        hmul(&self.base, &a, &b).expect("aligned orders")
    }

    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        let n = a.order().min(b.order());
        a.entries[..=n]
            .iter()
            .zip(&b.entries[..=n])
            .all(|(x, y)| self.base.eq(x, y))
    }
}

impl<A: Algebra> Differential for HurwitzAlgebra<A> {
    fn d(&self, a: &Self::Elem) -> Self::Elem {
        partial(a).expect("derivation applied to an order-0 series")
    }
}

impl<A: Algebra> RotaBaxter for HurwitzAlgebra<A> {
    fn rb(&self, a: &Self::Elem) -> Self::Elem {
        pi(&self.base, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ScalarAlgebra;
    use crate::freediff::{symbol_elem, CommDiffAlgebra, CommMonomial, DiffElem, DiffWord, Symbol};
    use crate::lincomb::LinComb;
    use crate::scalar::Rational;

    fn sc(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn series(vals: &[i64]) -> HurwitzSeries<Scalar> {
        HurwitzSeries::from_entries(vals.iter().map(|&v| sc(v)).collect()).unwrap()
    }

    #[test]
    fn product_low_entries() {
        let a = ScalarAlgebra;
        let f = series(&[2, 3, 5]);
        let g = series(&[7, 11, 13]);
        let fg = hmul(&a, &f, &g).unwrap();
        // (fg)(0) = f(0)g(0)
        assert_eq!(fg.entry(0), &sc(14));
        // (fg)(1) = f(1)g(0) + f(0)g(1) + L f(1)g(1)
        let expected = &(&sc(21) + &sc(22)) + &(&Scalar::lambda() * &sc(33));
        assert_eq!(fg.entry(1), &expected);
    }

    #[test]
    fn unit_series_is_identity() {
        let a = ScalarAlgebra;
        let f = series(&[2, 3, 5]);
        let one = unit_series(&a, 2);
        assert_eq!(hmul(&a, &f, &one).unwrap(), f);
        assert_eq!(hmul(&a, &one, &f).unwrap(), f);
    }

    #[test]
    fn order_mismatch_rejected() {
        let a = ScalarAlgebra;
        let f = series(&[1, 2]);
        let g = series(&[1, 2, 3]);
        assert_eq!(hmul(&a, &f, &g), Err(HurwitzError::OrderMismatch(1, 2)));
    }

    #[test]
    fn shifts() {
        let a = ScalarAlgebra;
        let f = series(&[2, 3, 5]);
        assert_eq!(partial(&f).unwrap(), series(&[3, 5]));
        assert_eq!(partial(&series(&[7])), Err(HurwitzError::OrderZero));
        assert_eq!(pi(&a, &series(&[2, 3])), series(&[0, 2, 3]));
        // sections: partial . pi is the identity at full order
        assert_eq!(partial(&pi(&a, &f)).unwrap(), f);
        // partial of the unit and of a constant is zero
        assert_eq!(partial(&unit_series(&a, 3)).unwrap(), zero_series(&a, 2));
        assert_eq!(partial(&kappa(&a, &sc(5), 3)).unwrap(), zero_series(&a, 2));
        assert_eq!(pi(&a, &zero_series(&a, 1)), zero_series(&a, 2));
    }

    #[test]
    fn kappa_and_epsilon_are_algebra_maps() {
        let a = ScalarAlgebra;
        assert_eq!(kappa(&a, &sc(1), 2), unit_series(&a, 2));
        assert_eq!(kappa(&a, &Scalar::zero(), 2), zero_series(&a, 2));
        let ka = kappa(&a, &sc(3), 3);
        let kb = kappa(&a, &sc(5), 3);
        assert_eq!(hmul(&a, &ka, &kb).unwrap(), kappa(&a, &sc(15), 3));
        assert_eq!(epsilon(&ka), sc(3));
        assert_eq!(epsilon(&unit_series(&a, 0)), sc(1));
        let f = series(&[2, 3]);
        let g = series(&[7, 1]);
        assert_eq!(
            epsilon(&hmul(&a, &f, &g).unwrap()),
            &epsilon(&f) * &epsilon(&g)
        );
    }

    fn x(order: u32) -> DiffElem<CommMonomial> {
        symbol_elem(Symbol::new("x", order))
    }

    #[test]
    fn eta_examples() {
        let alg = CommDiffAlgebra::new();
        let e = eta(&alg, &x(0), 2);
        assert_eq!(e.entries(), &[x(0), x(1), x(2)]);
        assert_eq!(epsilon(&e), x(0));

        // eta is multiplicative up to the truncation order
        let xy = crate::freediff::mul_elems(&x(0), &x(1));
        let ex = eta(&alg, &x(0), 4);
        let ey = eta(&alg, &x(1), 4);
        assert_eq!(hmul(&alg, &ex, &ey).unwrap(), eta(&alg, &xy, 4));

        // eta intertwines the derivations one order down
        let de = partial(&eta(&alg, &x(0), 4)).unwrap();
        assert_eq!(de, eta(&alg, &x(1), 3));
    }

    #[test]
    fn entrywise_lift_examples() {
        let alg = CommDiffAlgebra::new();
        // an algebra map assigning a rational to each derivative symbol
        let h = |e: &DiffElem<CommMonomial>| -> Scalar {
            let mut acc = Scalar::zero();
            for (word, c) in e.terms() {
                let mut prod = Scalar::one();
                for s in crate::freediff::DiffWord::factors(word) {
                    prod = &prod * &Scalar::from_rational(Rational::from_int(s.order as i64 + 2));
                }
                acc = &acc + &(&prod * c);
            }
            acc
        };
        let one_series = unit_series(&alg, 2);
        let lifted: HurwitzSeries<Scalar> = lift_entrywise(h, &one_series);
        assert_eq!(lifted, unit_series(&ScalarAlgebra, 2));

        let ka = kappa(&alg, &x(0), 2);
        assert_eq!(lift_entrywise(h, &ka), kappa(&ScalarAlgebra, &sc(2), 2));

        // shifting down commutes with the entrywise lift
        let f = eta(&alg, &x(0), 3);
        assert_eq!(
            partial(&lift_entrywise(h, &f)).unwrap(),
            lift_entrywise(h, &partial(&f).unwrap())
        );
    }

    #[test]
    fn cofree_lift_examples() {
        let alg = CommDiffAlgebra::new();
        let f = |e: &DiffElem<CommMonomial>| e.clone();
        let lifted = cofree_lift(f, &alg, &x(0), 3);
        assert_eq!(epsilon(&lifted), x(0));
        assert_eq!(lifted.entries(), eta(&alg, &x(0), 3).entries());

        let one: DiffElem<CommMonomial> = LinComb::basis(CommMonomial::one());
        assert_eq!(cofree_lift(f, &alg, &one, 2), unit_series(&alg, 2));

        // iterating the shift reads off later entries at slot 0
        let s = eta(&alg, &x(0), 5);
        let mut shifted = s.clone();
        for n in 0..=5 {
            assert_eq!(epsilon(&shifted), *s.entry(n));
            if n < 5 {
                shifted = partial(&shifted).unwrap();
            }
        }
    }

    #[test]
    fn fixed_order_handle_identities() {
        let h = HurwitzAlgebra::new(ScalarAlgebra, 4);
        let f = series(&[2, 3, 5, 7, 11]);
        let g = series(&[1, -4, 2, 0, 6]);
        // section identity at full order
        assert!(h.eq(&h.d(&h.rb(&f)), &f));
        // weighted Leibniz, compared on the shared prefix (order 3)
        let lhs = h.d(&h.mul(&f, &g));
        let rhs = h.add(
            &h.add(&h.mul(&h.d(&f), &g), &h.mul(&f, &h.d(&g))),
            &h.scale(&Scalar::lambda(), &h.mul(&h.d(&f), &h.d(&g))),
        );
        assert!(h.eq(&lhs, &rhs));
        // Rota-Baxter identity, exact on all retained entries
        let lhs = h.mul(&h.rb(&f), &h.rb(&g));
        let rhs = h.add(
            &h.add(&h.rb(&h.mul(&h.rb(&f), &g)), &h.rb(&h.mul(&f, &h.rb(&g)))),
            &h.scale(&Scalar::lambda(), &h.rb(&h.mul(&f, &g))),
        );
        assert!(h.eq(&lhs, &rhs));
    }

    #[test]
    fn depth_two_tower() {
        // series over series: the generic carrier composes with itself
        let inner = HurwitzAlgebra::new(ScalarAlgebra, 2);
        let tower = HurwitzAlgebra::new(HurwitzAlgebra::new(ScalarAlgebra, 2), 2);
        let f = HurwitzSeries::from_entries(vec![
            series(&[1, 2, 3]),
            series(&[0, 1, 0]),
            series(&[5, 0, 1]),
        ])
        .unwrap();
        assert!(tower.eq(&tower.d(&tower.rb(&f)), &f));
        let g = tower.mul(&f, &tower.one());
        assert!(tower.eq(&g, &f));
        let _ = inner;
    }

    #[test]
    fn truncate_to_shrinks_only() {
        let f = series(&[1, 2, 3]);
        assert_eq!(truncate_to(&f, 1).unwrap(), series(&[1, 2]));
        assert_eq!(truncate_to(&f, 2).unwrap(), f);
        assert_eq!(truncate_to(&f, 3), Err(HurwitzError::TruncationGrows(2, 3)));
    }
}
