//! Free differential algebras of the fixed weight on a variable set, in a
//! commutative and a noncommutative flavour.
//!
//! The carrier basis is words over the derivative alphabet `{ x_(n) }`:
//! multisets for the commutative case ([`CommMonomial`]), sequences for the
//! noncommutative case ([`NcWord`]). The derivation acts on a one-letter
//! word by bumping the derivative order and extends to longer words by the
//! weighted Leibniz recursion on the first factor; both flavours share that
//! one code path.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use thiserror::Error;

use crate::algebra::{Algebra, Differential};
use crate::lincomb::{bilinear, BasisDisplay, LinComb};
use crate::scalar::{binomial, Scalar};

/// A formal derivative of a base variable: `x_(n)` is the n-th derivative
/// of `x`. The variable name is shared, so symbols clone cheaply.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol {
    pub base: std::sync::Arc<str>,
    pub order: u32,
}

impl Symbol {
    pub fn new(base: impl AsRef<str>, order: u32) -> Self {
        let base: std::sync::Arc<str> = base.as_ref().into();
        assert!(!base.is_empty(), "empty variable name");
        Symbol { base, order }
    }

    /// The symbol one derivative up.
    pub fn bump(&self) -> Self {
        Symbol { base: self.base.clone(), order: self.order + 1 }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_({})", self.base, self.order)
    }
}

/// Basis words of a free algebra over the derivative alphabet.
pub trait DiffWord: Ord + Clone + fmt::Debug + BasisDisplay {
    const COMMUTATIVE: bool;

    fn one() -> Self;
    fn is_one(&self) -> bool;
    fn single(sym: Symbol) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Splits off the leading factor; `None` for the empty word.
    fn split_first(&self) -> Option<(Symbol, Self)>;
    fn factors(&self) -> &[Symbol];
}

/// Commutative word: a multiset of symbols kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CommMonomial(Vec<Symbol>);

impl CommMonomial {
    pub fn from_symbols(mut syms: Vec<Symbol>) -> Self {
        syms.sort();
        CommMonomial(syms)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

impl PartialOrd for CommMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CommMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

impl DiffWord for CommMonomial {
    const COMMUTATIVE: bool = true;

    fn one() -> Self {
        CommMonomial(Vec::new())
    }

    fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn single(sym: Symbol) -> Self {
        CommMonomial(vec![sym])
    }

    fn mul(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        CommMonomial(v)
    }

    fn split_first(&self) -> Option<(Symbol, Self)> {
        let (first, rest) = self.0.split_first()?;
        Some((first.clone(), CommMonomial(rest.to_vec())))
    }

    fn factors(&self) -> &[Symbol] {
        &self.0
    }
}

/// Noncommutative word: an ordered sequence of symbols.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NcWord(Vec<Symbol>);

impl NcWord {
    pub fn from_symbols(syms: Vec<Symbol>) -> Self {
        NcWord(syms)
    }
}

impl PartialOrd for NcWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NcWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

impl DiffWord for NcWord {
    const COMMUTATIVE: bool = false;

    fn one() -> Self {
        NcWord(Vec::new())
    }

    fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn single(sym: Symbol) -> Self {
        NcWord(vec![sym])
    }

    fn mul(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        NcWord(v)
    }

    fn split_first(&self) -> Option<(Symbol, Self)> {
        let (first, rest) = self.0.split_first()?;
        Some((first.clone(), NcWord(rest.to_vec())))
    }

    fn factors(&self) -> &[Symbol] {
        &self.0
    }
}

fn display_word(f: &mut fmt::Formatter<'_>, factors: &[Symbol]) -> fmt::Result {
    if factors.is_empty() {
        return write!(f, "1");
    }
    // run-length compress equal adjacent factors into powers
    let mut first = true;
    let mut i = 0;
    while i < factors.len() {
        let mut j = i + 1;
        while j < factors.len() && factors[j] == factors[i] {
            j += 1;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if j - i == 1 {
            write!(f, "{}", factors[i])?;
        } else {
            write!(f, "{}^{}", factors[i], j - i)?;
        }
        i = j;
    }
    Ok(())
}

impl fmt::Display for CommMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display_word(f, &self.0)
    }
}

impl fmt::Display for NcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display_word(f, &self.0)
    }
}

impl BasisDisplay for CommMonomial {
    fn is_unit_basis(&self) -> bool {
        self.is_one()
    }
}

impl BasisDisplay for NcWord {
    fn is_unit_basis(&self) -> bool {
        self.is_one()
    }
}

/// An element of the free differential algebra with word basis `W`.
pub type DiffElem<W> = LinComb<W>;

pub fn symbol_elem<W: DiffWord>(sym: Symbol) -> DiffElem<W> {
    LinComb::basis(W::single(sym))
}

pub fn mul_elems<W: DiffWord>(a: &DiffElem<W>, b: &DiffElem<W>) -> DiffElem<W> {
    bilinear(a, b, |x, y| LinComb::basis(x.mul(y)))
}

pub fn pow_elem<W: DiffWord>(a: &DiffElem<W>, n: u32) -> DiffElem<W> {
    let mut out = LinComb::basis(W::one());
    for _ in 0..n {
        out = mul_elems(&out, a);
    }
    out
}

/// The derivation on a basis word: order bump on one letter, weighted
/// Leibniz recursion on the first factor otherwise, and 0 on the empty word.
pub fn d_word<W: DiffWord>(w: &W) -> DiffElem<W> {
    match w.split_first() {
        None => LinComb::zero(),
        Some((u1, rest)) => {
            let du1: DiffElem<W> = symbol_elem(u1.bump());
            if rest.is_one() {
                return du1;
            }
            let rest_elem = LinComb::basis(rest.clone());
            let drest = d_word(&rest);
            let t1 = mul_elems(&du1, &rest_elem);
            let t2 = mul_elems(&LinComb::basis(W::single(u1)), &drest);
            let t3 = mul_elems(&du1, &drest).scale(&Scalar::lambda());
            &(&t1 + &t2) + &t3
        }
    }
}

pub fn d_elem<W: DiffWord>(e: &DiffElem<W>) -> DiffElem<W> {
    e.map(d_word)
}

pub fn d_elem_pow<W: DiffWord>(e: &DiffElem<W>, n: u32) -> DiffElem<W> {
    let mut out = e.clone();
    for _ in 0..n {
        out = d_elem(&out);
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FreeDiffError {
    #[error("the power rule needs a positive exponent")]
    ZeroPower,
    #[error("variable `{0}` has no assigned image")]
    UnmappedVariable(String),
}

/// Closed form for `d(x^n)`:
/// `sum_{i=1}^{n} C(n,i) L^(i-1) x^(n-i) d(x)^i`.
pub fn power_rule_rhs<W: DiffWord>(x: &DiffElem<W>, n: u32) -> Result<DiffElem<W>, FreeDiffError> {
    if n == 0 {
        return Err(FreeDiffError::ZeroPower);
    }
    let dx = d_elem(x);
    let mut out = LinComb::zero();
    for i in 1..=n {
        let coeff = &Scalar::from_rational(binomial(n, i)) * &Scalar::lambda_pow(i - 1);
        let term = mul_elems(&pow_elem(x, n - i), &pow_elem(&dx, i));
        out = &out + &term.scale(&coeff);
    }
    Ok(out)
}

/// Closed form for `d^n(xy)`:
/// `sum_{k=0}^{n} sum_{j=0}^{n-k} C(n,k) C(n-k,j) L^k d^(n-j)(x) d^(k+j)(y)`.
pub fn iterated_leibniz_rhs<W: DiffWord>(
    x: &DiffElem<W>,
    y: &DiffElem<W>,
    n: u32,
) -> DiffElem<W> {
    let mut dx = Vec::with_capacity(n as usize + 1);
    let mut dy = Vec::with_capacity(n as usize + 1);
    dx.push(x.clone());
    dy.push(y.clone());
    for i in 1..=n {
        dx.push(d_elem(&dx[i as usize - 1]));
        dy.push(d_elem(&dy[i as usize - 1]));
    }
    let mut out = LinComb::zero();
    for k in 0..=n {
        for j in 0..=n - k {
            let coeff = &Scalar::from_rational(&binomial(n, k) * &binomial(n - k, j))
                * &Scalar::lambda_pow(k);
            let term = mul_elems(&dx[(n - j) as usize], &dy[(k + j) as usize]);
            out = &out + &term.scale(&coeff);
        }
    }
    out
}

/// Variable assignment for [`extend_hom`].
pub type VarMap<T> = BTreeMap<String, T>;

/// Evaluates the unique differential-algebra morphism determined by a
/// variable assignment: `x_(n)` goes to the n-th derivative of the image of
/// `x`, words multiply, and the extension is linear.
pub fn extend_hom<W: DiffWord, T: Differential>(
    assign: &VarMap<T::Elem>,
    target: &T,
    e: &DiffElem<W>,
) -> Result<T::Elem, FreeDiffError> {
    let mut acc = target.zero();
    for (word, coeff) in e.terms() {
        let mut prod = target.one();
        for sym in word.factors() {
            let image = assign
                .get(sym.base.as_ref() as &str)
                .ok_or_else(|| FreeDiffError::UnmappedVariable(sym.base.to_string()))?;
            prod = target.mul(&prod, &target.d_pow(image, sym.order));
        }
        acc = target.add(&acc, &target.scale(coeff, &prod));
    }
    Ok(acc)
}

/// Handle for the free differential algebra itself.
pub struct FreeDiffAlgebra<W>(PhantomData<W>);

impl<W> FreeDiffAlgebra<W> {
    pub fn new() -> Self {
        FreeDiffAlgebra(PhantomData)
    }
}

impl<W> Default for FreeDiffAlgebra<W> {
    fn default() -> Self {
        Self::new()
    }
}

pub type CommDiffAlgebra = FreeDiffAlgebra<CommMonomial>;
pub type NcDiffAlgebra = FreeDiffAlgebra<NcWord>;

impl<W: DiffWord> Algebra for FreeDiffAlgebra<W> {
    type Elem = DiffElem<W>;

    fn zero(&self) -> Self::Elem {
        LinComb::zero()
    }

    fn one(&self) -> Self::Elem {
        LinComb::basis(W::one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a + b
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        -a
    }

    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Self::Elem {
        a.scale(c)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        mul_elems(a, b)
    }

    fn add_scaled_assign(&self, acc: &mut Self::Elem, c: &Scalar, x: &Self::Elem) {
        acc.add_scaled_assign(c, x);
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
}

impl<W: DiffWord> Differential for FreeDiffAlgebra<W> {
    fn d(&self, a: &Self::Elem) -> Self::Elem {
        d_elem(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(base: &str, order: u32) -> Symbol {
        Symbol::new(base, order)
    }

    fn var(base: &str, order: u32) -> DiffElem<CommMonomial> {
        symbol_elem(sym(base, order))
    }

    fn mono(syms: &[(&str, u32)]) -> CommMonomial {
        CommMonomial::from_symbols(syms.iter().map(|&(b, o)| sym(b, o)).collect())
    }

    #[test]
    fn d_on_letters_and_unit() {
        assert_eq!(d_elem(&var("x", 0)), var("x", 1));
        let one: DiffElem<CommMonomial> = LinComb::basis(CommMonomial::one());
        assert!(d_elem(&one).is_zero());
    }

    #[test]
    fn d_of_product_of_two_letters() {
        // one unfolding of the k=2 recursion
        let e = mul_elems(&var("x", 0), &var("y", 0));
        let expected = LinComb::from_terms([
            (mono(&[("x", 1), ("y", 0)]), Scalar::one()),
            (mono(&[("x", 0), ("y", 1)]), Scalar::one()),
            (mono(&[("x", 1), ("y", 1)]), Scalar::lambda()),
        ]);
        assert_eq!(d_elem(&e), expected);
    }

    #[test]
    fn d_of_square() {
        let x = var("x", 0);
        let expected = LinComb::from_terms([
            (mono(&[("x", 0), ("x", 1)]), Scalar::from_int(2)),
            (mono(&[("x", 1), ("x", 1)]), Scalar::lambda()),
        ]);
        assert_eq!(d_elem(&pow_elem(&x, 2)), expected);
    }

    #[test]
    fn power_rule_examples() {
        let x = var("x", 0);
        assert_eq!(power_rule_rhs(&x, 1).unwrap(), var("x", 1));
        assert_eq!(power_rule_rhs(&x, 2).unwrap(), d_elem(&pow_elem(&x, 2)));
        // n = 3: 3 x^2 x' + 3 L x (x')^2 + L^2 (x')^3
        let expected = LinComb::from_terms([
            (mono(&[("x", 0), ("x", 0), ("x", 1)]), Scalar::from_int(3)),
            (
                mono(&[("x", 0), ("x", 1), ("x", 1)]),
                &Scalar::from_int(3) * &Scalar::lambda(),
            ),
            (mono(&[("x", 1), ("x", 1), ("x", 1)]), Scalar::lambda_pow(2)),
        ]);
        assert_eq!(power_rule_rhs(&x, 3).unwrap(), expected);
        assert_eq!(power_rule_rhs(&x, 0), Err(FreeDiffError::ZeroPower));
    }

    #[test]
    fn power_rule_matches_derivation_up_to_six() {
        let x = var("x", 0);
        let y = var("y", 2);
        for n in 1..=6 {
            assert_eq!(power_rule_rhs(&x, n).unwrap(), d_elem(&pow_elem(&x, n)));
            assert_eq!(power_rule_rhs(&y, n).unwrap(), d_elem(&pow_elem(&y, n)));
        }
    }

    #[test]
    fn iterated_leibniz_examples() {
        let x = var("x", 0);
        let y = var("y", 0);
        assert_eq!(iterated_leibniz_rhs(&x, &y, 0), mul_elems(&x, &y));
        assert_eq!(iterated_leibniz_rhs(&x, &y, 1), d_elem(&mul_elems(&x, &y)));
        assert_eq!(
            iterated_leibniz_rhs(&x, &y, 2),
            d_elem(&d_elem(&mul_elems(&x, &y)))
        );
    }

    #[test]
    fn commutative_canonicalization() {
        // the derivation result cannot depend on input factor order
        let a = mul_elems(&var("x", 0), &var("y", 1));
        let b = mul_elems(&var("y", 1), &var("x", 0));
        assert_eq!(a, b);
        assert_eq!(d_elem(&a), d_elem(&b));
    }

    #[test]
    fn nc_words_keep_order() {
        let x: DiffElem<NcWord> = symbol_elem(sym("x", 0));
        let y: DiffElem<NcWord> = symbol_elem(sym("y", 0));
        assert_ne!(mul_elems(&x, &y), mul_elems(&y, &x));
        // Leibniz recursion also applies in the noncommutative case
        let d = d_elem(&mul_elems(&x, &y));
        let expected = LinComb::from_terms([
            (NcWord::from_symbols(vec![sym("x", 1), sym("y", 0)]), Scalar::one()),
            (NcWord::from_symbols(vec![sym("x", 0), sym("y", 1)]), Scalar::one()),
            (NcWord::from_symbols(vec![sym("x", 1), sym("y", 1)]), Scalar::lambda()),
        ]);
        assert_eq!(d, expected);
    }

    #[test]
    fn extend_hom_examples() {
        let alg = CommDiffAlgebra::new();
        let mut assign: VarMap<DiffElem<CommMonomial>> = BTreeMap::new();
        assign.insert("x".into(), var("g", 0));

        // x_(2) goes to the double derivative of the image
        let e = var("x", 2);
        let image = extend_hom(&assign, &alg, &e).unwrap();
        assert_eq!(image, var("g", 2));

        // the unit maps to the unit
        let one: DiffElem<CommMonomial> = LinComb::basis(CommMonomial::one());
        assert_eq!(extend_hom(&assign, &alg, &one).unwrap(), alg.one());

        // unmapped variable is reported by name
        let bad = var("z", 0);
        assert_eq!(
            extend_hom(&assign, &alg, &bad),
            Err(FreeDiffError::UnmappedVariable("z".into()))
        );
    }

    #[test]
    fn extend_hom_intertwines_d() {
        // morphism property against the derivation, with a nontrivial image
        let alg = CommDiffAlgebra::new();
        let mut assign: VarMap<DiffElem<CommMonomial>> = BTreeMap::new();
        assign.insert("x".into(), &var("g", 0) + &var("h", 1).scale(&Scalar::lambda()));
        assign.insert("y".into(), mul_elems(&var("g", 0), &var("g", 0)));

        let e = &mul_elems(&var("x", 0), &var("y", 1)) + &var("x", 2).scale(&Scalar::from_int(3));
        let lhs = extend_hom(&assign, &alg, &d_elem(&e)).unwrap();
        let rhs = d_elem(&extend_hom(&assign, &alg, &e).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn extend_hom_into_series_target() {
        use crate::hurwitz::{eta, kappa, HurwitzAlgebra};

        // images may mix constant series with derivative series; the
        // morphism property is checked against the derivation on both
        // sides, compared on the shared prefix
        let target = HurwitzAlgebra::new(CommDiffAlgebra::new(), 5);
        let base = CommDiffAlgebra::new();
        let mut assign: VarMap<_> = BTreeMap::new();
        assign.insert("x".into(), kappa(&base, &var("x", 0), 5));
        assign.insert("y".into(), eta(&base, &var("y", 0), 5));

        let e = mul_elems(&var("x", 0), &var("y", 1));
        let image = extend_hom(&assign, &target, &e).unwrap();
        let expected = target.mul(
            &kappa(&base, &var("x", 0), 5),
            &target.d(&eta(&base, &var("y", 0), 5)),
        );
        assert!(target.eq(&image, &expected));

        let lhs = extend_hom(&assign, &target, &d_elem(&e)).unwrap();
        let rhs = target.d(&image);
        assert!(target.eq(&lhs, &rhs), "morphism property against the derivation");
    }

    #[test]
    fn display_monomials() {
        let m = mono(&[("x", 0), ("x", 0), ("y", 1)]);
        assert_eq!(m.to_string(), "x_(0)^2*y_(1)");
        assert_eq!(CommMonomial::one().to_string(), "1");
    }
}
