//! The mixable shuffle algebra: the free commutative Rota-Baxter algebra
//! over a base algebra.
//!
//! The carrier is spanned by tensor words `a_0 (x) ... (x) a_m` whose slots
//! are basis monomials of the base. The product shuffles the tails of the
//! two words while letting slots merge with a weight `L` per merge, the
//! Rota-Baxter operator prepends a unit slot, and when the base carries a
//! derivation the word algebra inherits one that peels the leading slot.

use std::fmt;

use crate::algebra::{Algebra, Differential, RotaBaxter};
use crate::freediff::{d_word, DiffElem, DiffWord, FreeDiffError};
use crate::lincomb::{bilinear, BasisDisplay, LinComb};
use crate::scalar::Scalar;

/// A tensor word: a nonempty sequence of base monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorWord<W> {
    slots: Vec<W>,
}

impl<W: DiffWord> TensorWord<W> {
    /// Panics on an empty slot list; words have length at least one.
    pub fn new(slots: Vec<W>) -> Self {
        assert!(!slots.is_empty(), "tensor words are nonempty");
        TensorWord { slots }
    }

    /// The unit word: a single slot holding the base unit.
    pub fn unit() -> Self {
        TensorWord { slots: vec![W::one()] }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn slots(&self) -> &[W] {
        &self.slots
    }

    pub fn is_unit(&self) -> bool {
        self.slots.len() == 1 && self.slots[0].is_one()
    }
}

impl<W: Ord> PartialOrd for TensorWord<W> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: Ord> Ord for TensorWord<W> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.slots.len(), &self.slots).cmp(&(other.slots.len(), &other.slots))
    }
}

impl<W: fmt::Display> fmt::Display for TensorWord<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, " (x) ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl<W: DiffWord> BasisDisplay for TensorWord<W> {
    fn is_unit_basis(&self) -> bool {
        self.is_unit()
    }

    fn needs_parens_with_coeff(&self) -> bool {
        self.slots.len() > 1
    }
}

/// An element of the mixable shuffle algebra over base monomials `W`.
pub type ShaElem<W> = LinComb<TensorWord<W>>;

/// Builds words from slot-wise elements, expanding multilinearly so every
/// stored slot is a single basis monomial.
pub fn word_from_slots<W: DiffWord>(slots: &[DiffElem<W>]) -> ShaElem<W> {
    assert!(!slots.is_empty(), "tensor words are nonempty");
    let mut acc: Vec<(Vec<W>, Scalar)> = vec![(Vec::new(), Scalar::one())];
    for slot in slots {
        let mut next = Vec::new();
        for (prefix, c) in &acc {
            for (m, cm) in slot.terms() {
                let mut slots = prefix.clone();
                slots.push(m.clone());
                next.push((slots, c * cm));
            }
        }
        acc = next;
    }
    LinComb::from_terms(acc.into_iter().map(|(slots, c)| (TensorWord::new(slots), c)))
}

/// The canonical embedding of the base algebra as length-one words.
pub fn j_embed<W: DiffWord>(a: &DiffElem<W>) -> ShaElem<W> {
    a.map_basis(|m| TensorWord::new(vec![m.clone()]))
}

fn prepend<W: Clone>(head: W, tail: &[W]) -> Vec<W> {
    let mut v = Vec::with_capacity(tail.len() + 1);
    v.push(head);
    v.extend(tail.iter().cloned());
    v
}

/// Mixable shuffle of the word tails `(a_1..a_m)` and `(b_1..b_n)`, both
/// nonempty here. Returns `(slots, k)` pairs, `k` the power of the weight.
///
/// Each of the three branches spells out its degenerate case (left side
/// exhausted, right side exhausted, both) the way the recursion's stated
/// conventions read; a test checks they agree with the uniform recursion
/// that treats an empty side as neutral.
fn tail_shuffle<W: DiffWord>(u: &[W], v: &[W]) -> Vec<(Vec<W>, u32)> {
    debug_assert!(!u.is_empty() && !v.is_empty());
    let m = u.len();
    let n = v.len();
    let mut out = Vec::new();
    // a_1 (x) ((a_2..a_m) sh (b_1..b_n)), the inner product being b_1..b_n when m = 1
    if m == 1 {
        out.push((prepend(u[0].clone(), v), 0));
    } else {
        for (w, k) in tail_shuffle(&u[1..], v) {
            out.push((prepend(u[0].clone(), &w), k));
        }
    }
    // b_1 (x) ((a_1..a_m) sh (b_2..b_n)), the inner product being a_1..a_m when n = 1
    if n == 1 {
        out.push((prepend(v[0].clone(), u), 0));
    } else {
        for (w, k) in tail_shuffle(u, &v[1..]) {
            out.push((prepend(v[0].clone(), &w), k));
        }
    }
    // L a_1b_1 (x) ((a_2..a_m) sh (b_2..b_n)), collapsing to L a_1b_1 when m = n = 1
    let merged = u[0].mul(&v[0]);
    match (m == 1, n == 1) {
        (true, true) => out.push((vec![merged], 1)),
        (true, false) => out.push((prepend(merged, &v[1..]), 1)),
        (false, true) => out.push((prepend(merged, &u[1..]), 1)),
        (false, false) => {
            for (w, k) in tail_shuffle(&u[1..], &v[1..]) {
                out.push((prepend(merged.clone(), &w), k + 1));
            }
        }
    }
    out
}

/// The mixable shuffle product of two basis words: the leading slots
/// multiply in the base and the tails shuffle with weighted merges.
pub fn mix_shuffle<W: DiffWord>(a: &TensorWord<W>, b: &TensorWord<W>) -> ShaElem<W> {
    let head = a.slots[0].mul(&b.slots[0]);
    let at = &a.slots[1..];
    let bt = &b.slots[1..];
    if at.is_empty() && bt.is_empty() {
        return LinComb::basis(TensorWord::new(vec![head]));
    }
    if at.is_empty() {
        return LinComb::basis(TensorWord::new(prepend(head, bt)));
    }
    if bt.is_empty() {
        return LinComb::basis(TensorWord::new(prepend(head, at)));
    }
    let mut out = LinComb::zero();
    for (tail, k) in tail_shuffle(at, bt) {
        out.add_term(TensorWord::new(prepend(head.clone(), &tail)), Scalar::lambda_pow(k));
    }
    out
}

/// Bilinear extension of [`mix_shuffle`].
pub fn sha_product<W: DiffWord>(u: &ShaElem<W>, v: &ShaElem<W>) -> ShaElem<W> {
    bilinear(u, v, mix_shuffle)
}

/// The Rota-Baxter operator: prepends a unit slot to every word.
pub fn p_op<W: DiffWord>(u: &ShaElem<W>) -> ShaElem<W> {
    u.map_basis(|w| TensorWord::new(prepend(W::one(), &w.slots)))
}

/// The derivation induced by the base derivation: differentiate the leading
/// slot, or merge it into the next slot, with the usual weighted cross term.
pub fn d_op<W: DiffWord>(u: &ShaElem<W>) -> ShaElem<W> {
    u.map(|word| {
        let x0 = &word.slots[0];
        let d0 = d_word(x0);
        if word.slots.len() == 1 {
            return j_embed(&d0);
        }
        let rest = &word.slots[1..];
        let rest2 = &word.slots[2..];
        let x1 = &word.slots[1];
        let mut out = LinComb::zero();
        for (m, c) in d0.terms() {
            // d0(x0) (x) x1 (x) ...
            out.add_term(TensorWord::new(prepend(m.clone(), rest)), c.clone());
            // L d0(x0)x1 (x) x2 (x) ...
            out.add_term(TensorWord::new(prepend(m.mul(x1), rest2)), c * &Scalar::lambda());
        }
        // x0x1 (x) x2 (x) ...
        out.add_term(TensorWord::new(prepend(x0.mul(x1), rest2)), Scalar::one());
        out
    })
}

/// Evaluates the unique Rota-Baxter morphism determined by a base-algebra
/// map `phi`: a word is the leading slot times `P` of the remaining word.
pub fn extend_rb_hom<W, T, F>(phi: &F, target: &T, u: &ShaElem<W>) -> Result<T::Elem, FreeDiffError>
where
    W: DiffWord,
    T: RotaBaxter,
    F: Fn(&W) -> Result<T::Elem, FreeDiffError>,
{
    fn eval_slots<W, T, F>(phi: &F, target: &T, slots: &[W]) -> Result<T::Elem, FreeDiffError>
    where
        W: DiffWord,
        T: RotaBaxter,
        F: Fn(&W) -> Result<T::Elem, FreeDiffError>,
    {
        let head = phi(&slots[0])?;
        if slots.len() == 1 {
            return Ok(head);
        }
        let tail = eval_slots(phi, target, &slots[1..])?;
        Ok(target.mul(&head, &target.rb(&tail)))
    }

    let mut acc = target.zero();
    for (word, c) in u.terms() {
        let img = eval_slots(phi, target, &word.slots)?;
        acc = target.add(&acc, &target.scale(c, &img));
    }
    Ok(acc)
}

/// Handle for the mixable shuffle algebra over the free differential base.
pub struct ShuffleAlgebra<W>(std::marker::PhantomData<W>);

impl<W> ShuffleAlgebra<W> {
    pub fn new() -> Self {
        ShuffleAlgebra(std::marker::PhantomData)
    }
}

impl<W> Default for ShuffleAlgebra<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W: DiffWord> Algebra for ShuffleAlgebra<W> {
    type Elem = ShaElem<W>;

    fn zero(&self) -> Self::Elem {
        LinComb::zero()
    }

    fn one(&self) -> Self::Elem {
        LinComb::basis(TensorWord::unit())
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
        sha_product(a, b)
    }

    fn add_scaled_assign(&self, acc: &mut Self::Elem, c: &Scalar, x: &Self::Elem) {
        acc.add_scaled_assign(c, x);
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
}

impl<W: DiffWord> RotaBaxter for ShuffleAlgebra<W> {
    fn rb(&self, a: &Self::Elem) -> Self::Elem {
        p_op(a)
    }
}

impl<W: DiffWord> Differential for ShuffleAlgebra<W> {
    fn d(&self, a: &Self::Elem) -> Self::Elem {
        d_op(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freediff::{mul_elems, symbol_elem, CommMonomial, Symbol};

    type Word = TensorWord<CommMonomial>;

    fn m(syms: &[(&str, u32)]) -> CommMonomial {
        CommMonomial::from_symbols(syms.iter().map(|&(b, o)| Symbol::new(b, o)).collect())
    }

    fn w(slots: &[CommMonomial]) -> Word {
        TensorWord::new(slots.to_vec())
    }

    fn one() -> CommMonomial {
        CommMonomial::one()
    }

    #[test]
    fn base_cases() {
        let a = m(&[("a", 0)]);
        let b = m(&[("b", 0)]);
        // both length one: slots multiply
        assert_eq!(
            mix_shuffle(&w(std::slice::from_ref(&a)), &w(std::slice::from_ref(&b))),
            LinComb::basis(w(&[a.mul(&b)]))
        );
        // right length one: (a0 (x) a1) (b0) = (a0b0) (x) a1
        let a1 = m(&[("c", 1)]);
        assert_eq!(
            mix_shuffle(&w(&[a.clone(), a1.clone()]), &w(std::slice::from_ref(&b))),
            LinComb::basis(w(&[a.mul(&b), a1.clone()]))
        );
        // left length one, symmetric
        assert_eq!(
            mix_shuffle(&w(std::slice::from_ref(&b)), &w(&[a.clone(), a1.clone()])),
            LinComb::basis(w(&[a.mul(&b), a1]))
        );
    }

    #[test]
    fn length_two_times_length_two() {
        let a = m(&[("a", 0)]);
        let b = m(&[("b", 0)]);
        // (1 (x) a)(1 (x) b) = 1 (x) a (x) b + 1 (x) b (x) a + L 1 (x) ab
        let lhs = mix_shuffle(&w(&[one(), a.clone()]), &w(&[one(), b.clone()]));
        let expected = LinComb::from_terms([
            (w(&[one(), a.clone(), b.clone()]), Scalar::one()),
            (w(&[one(), b.clone(), a.clone()]), Scalar::one()),
            (w(&[one(), a.mul(&b)]), Scalar::lambda()),
        ]);
        assert_eq!(lhs, expected);
    }

    /// Uniform version of the tail recursion where an empty side is
    /// neutral; the spelled-out degenerate branches must agree with it.
    fn tail_shuffle_uniform(
        u: &[CommMonomial],
        v: &[CommMonomial],
    ) -> Vec<(Vec<CommMonomial>, u32)> {
        if u.is_empty() {
            return vec![(v.to_vec(), 0)];
        }
        if v.is_empty() {
            return vec![(u.to_vec(), 0)];
        }
        let mut out = Vec::new();
        for (w, k) in tail_shuffle_uniform(&u[1..], v) {
            out.push((prepend(u[0].clone(), &w), k));
        }
        for (w, k) in tail_shuffle_uniform(u, &v[1..]) {
            out.push((prepend(v[0].clone(), &w), k));
        }
        for (w, k) in tail_shuffle_uniform(&u[1..], &v[1..]) {
            out.push((prepend(u[0].mul(&v[0]), &w), k + 1));
        }
        out
    }

    fn collect(pairs: Vec<(Vec<CommMonomial>, u32)>) -> ShaElem<CommMonomial> {
        LinComb::from_terms(
            pairs
                .into_iter()
                .map(|(slots, k)| (TensorWord::new(slots), Scalar::lambda_pow(k))),
        )
    }

    #[test]
    fn degenerate_conventions_agree_with_uniform_recursion() {
        let atoms = [one(), m(&[("a", 0)]), m(&[("b", 1)])];
        let mut tails: Vec<Vec<CommMonomial>> = Vec::new();
        for len in 1..=3usize {
            let mut idx = vec![0usize; len];
            loop {
                tails.push(idx.iter().map(|&i| atoms[i].clone()).collect());
                let mut j = 0;
                loop {
                    if j == len {
                        break;
                    }
                    idx[j] += 1;
                    if idx[j] < atoms.len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == len {
                    break;
                }
            }
        }
        for u in &tails {
            for v in &tails {
                assert_eq!(
                    collect(tail_shuffle(u, v)),
                    collect(tail_shuffle_uniform(u, v)),
                    "tails {u:?} vs {v:?}"
                );
            }
        }
    }

    #[test]
    fn unit_and_embedding() {
        let alg = ShuffleAlgebra::<CommMonomial>::new();
        let a = symbol_elem::<CommMonomial>(Symbol::new("a", 0));
        let b = symbol_elem::<CommMonomial>(Symbol::new("b", 0));
        let ja = j_embed(&a);
        let jb = j_embed(&b);
        assert_eq!(alg.mul(&ja, &alg.one()), ja);
        assert_eq!(alg.mul(&ja, &jb), j_embed(&mul_elems(&a, &b)));
    }

    #[test]
    fn p_op_examples() {
        let a = m(&[("a", 0)]);
        let u = LinComb::basis(w(std::slice::from_ref(&a)));
        assert_eq!(p_op(&u), LinComb::basis(w(&[one(), a.clone()])));
        assert!(p_op(&ShaElem::<CommMonomial>::zero()).is_zero());
    }

    #[test]
    fn rb_residual_vanishes() {
        let alg = ShuffleAlgebra::<CommMonomial>::new();
        let u = LinComb::basis(w(&[m(&[("a", 0)]), m(&[("b", 0)])]));
        let v = LinComb::basis(w(&[one(), m(&[("c", 1)])]));
        let lhs = alg.mul(&alg.rb(&u), &alg.rb(&v));
        let rhs = &(&alg.rb(&alg.mul(&u, &alg.rb(&v))) + &alg.rb(&alg.mul(&alg.rb(&u), &v)))
            + &alg.rb(&alg.mul(&u, &v)).scale(&Scalar::lambda());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_op_examples() {
        let x0 = m(&[("x", 0)]);
        let y2 = m(&[("y", 2)]);
        // d(x0 (x) y2) = d0(x0) (x) y2 + x0*y2 + L d0(x0)*y2
        let du = d_op(&LinComb::basis(w(&[x0.clone(), y2.clone()])));
        let expected = LinComb::from_terms([
            (w(&[m(&[("x", 1)]), y2.clone()]), Scalar::one()),
            (w(&[x0.mul(&y2)]), Scalar::one()),
            (w(&[m(&[("x", 1)]).mul(&y2)]), Scalar::lambda()),
        ]);
        assert_eq!(du, expected);

        // d(1 (x) x0) = x0, the section identity on one word
        let dv = d_op(&LinComb::basis(w(&[one(), x0.clone()])));
        assert_eq!(dv, LinComb::basis(w(std::slice::from_ref(&x0))));

        // length-one words differentiate in the base
        let dw = d_op(&LinComb::basis(w(std::slice::from_ref(&x0))));
        assert_eq!(dw, j_embed(&d_word(&x0)));
    }

    #[test]
    fn section_identity_and_j_morphism() {
        let u = LinComb::from_terms([
            (w(&[m(&[("a", 0)]), m(&[("b", 1)])]), Scalar::lambda()),
            (w(&[one(), one(), m(&[("a", 2)])]), Scalar::from_int(3)),
        ]);
        assert_eq!(d_op(&p_op(&u)), u);
        // j is a morphism of differential algebras
        let ab = m(&[("a", 0), ("b", 0)]);
        assert_eq!(
            d_op(&j_embed(&LinComb::basis(ab.clone()))),
            j_embed(&d_word(&ab))
        );
    }

    #[test]
    fn extend_rb_hom_examples() {
        // evaluate into the shuffle algebra itself via the identity slot map
        let alg = ShuffleAlgebra::<CommMonomial>::new();
        let phi = |mm: &CommMonomial| -> Result<ShaElem<CommMonomial>, FreeDiffError> {
            Ok(LinComb::basis(TensorWord::new(vec![mm.clone()])))
        };
        let a = m(&[("a", 0)]);
        let ja = LinComb::basis(w(std::slice::from_ref(&a)));
        assert_eq!(extend_rb_hom(&phi, &alg, &ja).unwrap(), ja);
        let pa = LinComb::basis(w(&[one(), a.clone()]));
        assert_eq!(extend_rb_hom(&phi, &alg, &pa).unwrap(), alg.rb(&ja));
        // the identity-style map commutes with P on a longer word
        let word = LinComb::basis(w(&[a.clone(), one(), m(&[("b", 1)])]));
        assert_eq!(
            extend_rb_hom(&phi, &alg, &p_op(&word)).unwrap(),
            alg.rb(&extend_rb_hom(&phi, &alg, &word).unwrap())
        );
    }
}
