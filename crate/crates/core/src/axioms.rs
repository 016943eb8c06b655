//! Randomized identity checkers and the instances they run over.
//!
//! Every checker draws its samples from a deterministic per-sample stream:
//! sample `i` of a run with seed `s` sees exactly the same elements on
//! every machine and in every order of execution, so a reported
//! counterexample is reproducible from `(identity, seed, sample index)`
//! alone. Residuals are compared to zero exactly.
//!
//! Besides the free constructions from the sibling modules, this module
//! provides the degenerate scalar instance (the weight specialized to a
//! nonzero rational, where the operators are scalar multiplications), a
//! difference-operator fixture on rational polynomials, and deliberately
//! broken forest instances that the checkers must catch, guarding
//! against a vacuous test harness.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, Differential, RotaBaxter};
use crate::decorated::{DecElem, DecForest};
use crate::forests::{
    d_forest, graft_elem, rb_product, std_decomposition, Forest, ForestElem, Tree,
};
use crate::freediff::{CommMonomial, DiffElem, DiffWord, Symbol};
use crate::hurwitz::HurwitzSeries;
use crate::lincomb::LinComb;
use crate::scalar::{binomial, Rational, Scalar};
use crate::shuffle::{ShaElem, TensorWord};

/// Outcome of one checker run.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub identity: String,
    pub samples: u32,
    pub seed: u64,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

/// At most this many counterexamples are kept per report.
const MAX_FAILURES: usize = 5;

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "identity": self.identity,
            "samples": self.samples,
            "seed": self.seed,
            "pass": self.pass(),
            "failures": self.failures,
            "elapsed_ms": self.elapsed.as_millis() as u64,
        })
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}  samples={} seed={} elapsed={}ms",
            self.identity,
            if self.pass() { "pass" } else { "FAIL" },
            self.samples,
            self.seed,
            self.elapsed.as_millis()
        )?;
        for line in &self.failures {
            write!(f, "\n  counterexample {line}")?;
        }
        Ok(())
    }
}

/// The deterministic RNG for sample `index` of a run with `seed`.
pub fn sample_rng(seed: u64, index: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index as u64 + 1))
}

/// Whether the unit condition `d(1) = 0` is part of the Leibniz check.
/// Weak mode exists for the degenerate scalar instance, where `d(1)` is a
/// nonzero scalar by construction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LeibnizMode {
    Strict,
    Weak,
}

pub type Gen<'a, E> = dyn FnMut(&mut ChaCha8Rng) -> E + 'a;

/// Checks `d(xy) = d(x)y + x d(y) + L d(x)d(y)` on sampled pairs, plus
/// `d(1) = 0` in strict mode.
pub fn check_leibniz<T: Differential>(
    alg: &T,
    gen: &mut Gen<'_, T::Elem>,
    samples: u32,
    seed: u64,
    mode: LeibnizMode,
) -> CheckReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    if mode == LeibnizMode::Strict && !alg.is_zero(&alg.d(&alg.one())) {
        failures.push(format!("d(1) = {} but must be 0", alg.d(&alg.one())));
    }
    for i in 0..samples {
        if failures.len() >= MAX_FAILURES {
            break;
        }
        let mut rng = sample_rng(seed, i);
        let x = gen(&mut rng);
        let y = gen(&mut rng);
        let lhs = alg.d(&alg.mul(&x, &y));
        let rhs = alg.add(
            &alg.add(&alg.mul(&alg.d(&x), &y), &alg.mul(&x, &alg.d(&y))),
            &alg.scale(&Scalar::lambda(), &alg.mul(&alg.d(&x), &alg.d(&y))),
        );
        if !alg.eq(&lhs, &rhs) {
            failures.push(format!("{i}: x = {x}, y = {y}"));
        }
    }
    CheckReport {
        identity: "leibniz".into(),
        samples,
        seed,
        failures,
        elapsed: start.elapsed(),
    }
}

/// Checks `P(x)P(y) = P(xP(y)) + P(P(x)y) + L P(xy)` on sampled pairs.
pub fn check_rb<T: RotaBaxter>(
    alg: &T,
    gen: &mut Gen<'_, T::Elem>,
    samples: u32,
    seed: u64,
) -> CheckReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..samples {
        if failures.len() >= MAX_FAILURES {
            break;
        }
        let mut rng = sample_rng(seed, i);
        let x = gen(&mut rng);
        let y = gen(&mut rng);
        let lhs = alg.mul(&alg.rb(&x), &alg.rb(&y));
        let rhs = alg.add(
            &alg.add(
                &alg.rb(&alg.mul(&x, &alg.rb(&y))),
                &alg.rb(&alg.mul(&alg.rb(&x), &y)),
            ),
            &alg.scale(&Scalar::lambda(), &alg.rb(&alg.mul(&x, &y))),
        );
        if !alg.eq(&lhs, &rhs) {
            failures.push(format!("{i}: x = {x}, y = {y}"));
        }
    }
    CheckReport {
        identity: "rb".into(),
        samples,
        seed,
        failures,
        elapsed: start.elapsed(),
    }
}

/// Checks the section identity `d(P(x)) = x` on sampled elements.
pub fn check_section<T: Differential + RotaBaxter>(
    alg: &T,
    gen: &mut Gen<'_, T::Elem>,
    samples: u32,
    seed: u64,
) -> CheckReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..samples {
        if failures.len() >= MAX_FAILURES {
            break;
        }
        let mut rng = sample_rng(seed, i);
        let x = gen(&mut rng);
        if !alg.eq(&alg.d(&alg.rb(&x)), &x) {
            failures.push(format!("{i}: x = {x}"));
        }
    }
    CheckReport {
        identity: "section".into(),
        samples,
        seed,
        failures,
        elapsed: start.elapsed(),
    }
}

/// Which intertwining equations a morphism check runs.
#[derive(Clone, Copy, Debug)]
pub struct HomChecks {
    pub mul: bool,
    pub d: bool,
    pub rb: bool,
}

impl HomChecks {
    pub fn all() -> Self {
        HomChecks { mul: true, d: true, rb: true }
    }
}

/// Checks that an evaluated morphism respects multiplication and
/// intertwines the operators on sampled elements.
pub fn check_hom<S, T>(
    phi: &dyn Fn(&S::Elem) -> T::Elem,
    source: &S,
    target: &T,
    which: HomChecks,
    gen: &mut Gen<'_, S::Elem>,
    samples: u32,
    seed: u64,
) -> CheckReport
where
    S: Differential + RotaBaxter,
    T: Differential + RotaBaxter,
{
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..samples {
        if failures.len() >= MAX_FAILURES {
            break;
        }
        let mut rng = sample_rng(seed, i);
        let x = gen(&mut rng);
        if which.mul {
            let y = gen(&mut rng);
            let lhs = phi(&source.mul(&x, &y));
            let rhs = target.mul(&phi(&x), &phi(&y));
            if !target.eq(&lhs, &rhs) {
                failures.push(format!("{i}: mul, x = {x}, y = {y}"));
                continue;
            }
        }
        if which.d {
            let lhs = phi(&source.d(&x));
            let rhs = target.d(&phi(&x));
            if !target.eq(&lhs, &rhs) {
                failures.push(format!("{i}: d, x = {x}"));
                continue;
            }
        }
        if which.rb {
            let lhs = phi(&source.rb(&x));
            let rhs = target.rb(&phi(&x));
            if !target.eq(&lhs, &rhs) {
                failures.push(format!("{i}: P, x = {x}"));
            }
        }
    }
    CheckReport {
        identity: "hom".into(),
        samples,
        seed,
        failures,
        elapsed: start.elapsed(),
    }
}

// ---------------------------------------------------------------------
// random elements
//
// Size conventions: a size bound of 0 yields the unit of the algebra
// (the empty monomial, the single-vertex forest, the unit tensor word).

pub fn rand_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.random_range(-9i64..=9);
    let den = rng.random_range(1i64..=4);
    Rational::new(num, den)
}

fn rand_nonzero_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = rand_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

/// A small nonzero coefficient, at most quadratic in the weight.
pub fn rand_coeff(rng: &mut ChaCha8Rng) -> Scalar {
    let deg = rng.random_range(0u32..=2);
    Scalar::term(deg, rand_nonzero_rational(rng))
}

pub fn rand_symbol(rng: &mut ChaCha8Rng, vars: &[&str], max_order: u32) -> Symbol {
    let base = vars[rng.random_range(0..vars.len())];
    Symbol::new(base, rng.random_range(0..=max_order))
}

pub fn rand_monomial(
    rng: &mut ChaCha8Rng,
    vars: &[&str],
    max_order: u32,
    max_degree: usize,
) -> CommMonomial {
    if max_degree == 0 {
        return CommMonomial::one();
    }
    let degree = rng.random_range(0..=max_degree);
    CommMonomial::from_symbols((0..degree).map(|_| rand_symbol(rng, vars, max_order)).collect())
}

pub fn rand_diff_elem(
    rng: &mut ChaCha8Rng,
    vars: &[&str],
    max_order: u32,
    max_degree: usize,
    max_terms: usize,
) -> DiffElem<CommMonomial> {
    let terms = rng.random_range(1..=max_terms.max(1));
    LinComb::from_terms((0..terms).map(|_| {
        (rand_monomial(rng, vars, max_order, max_degree), rand_coeff(rng))
    }))
}

/// A planar rooted tree with exactly `vertices` vertices.
pub fn rand_tree(rng: &mut ChaCha8Rng, vertices: usize) -> Tree {
    assert!(vertices >= 1);
    if vertices == 1 {
        return Tree::leaf();
    }
    let mut remaining = vertices - 1;
    let mut children = Vec::new();
    while remaining > 0 {
        let take = rng.random_range(1..=remaining);
        children.push(rand_tree(rng, take));
        remaining -= take;
    }
    Tree::with_children(children)
}

/// A forest with at most `max_vertices` vertices (at least one).
pub fn rand_forest(rng: &mut ChaCha8Rng, max_vertices: usize) -> Forest {
    if max_vertices <= 1 {
        return Forest::unit();
    }
    let total = rng.random_range(1..=max_vertices);
    let mut remaining = total;
    let mut trees = Vec::new();
    while remaining > 0 {
        let take = rng.random_range(1..=remaining);
        trees.push(rand_tree(rng, take));
        remaining -= take;
    }
    Forest::from_trees(trees)
}

pub fn rand_forest_elem(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    max_terms: usize,
) -> ForestElem {
    let terms = rng.random_range(1..=max_terms.max(1));
    LinComb::from_terms(
        (0..terms).map(|_| (rand_forest(rng, max_vertices), rand_coeff(rng))),
    )
}

pub fn rand_dec_forest(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    vars: &[&str],
    max_order: u32,
) -> DecForest {
    let shape = rand_forest(rng, max_vertices);
    let angles = shape.leaf_count() - 1;
    let decorations = (0..angles).map(|_| rand_symbol(rng, vars, max_order)).collect();
    DecForest::new(shape, decorations).expect("angle count")
}

pub fn rand_dec_elem(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    vars: &[&str],
    max_order: u32,
    max_terms: usize,
) -> DecElem {
    let terms = rng.random_range(1..=max_terms.max(1));
    LinComb::from_terms((0..terms).map(|_| {
        (rand_dec_forest(rng, max_vertices, vars, max_order), rand_coeff(rng))
    }))
}

/// A tensor word of length at most `max_len` with monomial slots of
/// degree at most `slot_degree`.
pub fn rand_tensor_word(
    rng: &mut ChaCha8Rng,
    max_len: usize,
    vars: &[&str],
    max_order: u32,
    slot_degree: usize,
) -> TensorWord<CommMonomial> {
    if max_len <= 1 {
        return TensorWord::unit();
    }
    let len = rng.random_range(1..=max_len);
    TensorWord::new(
        (0..len)
            .map(|_| rand_monomial(rng, vars, max_order, slot_degree))
            .collect(),
    )
}

pub fn rand_sha_elem(
    rng: &mut ChaCha8Rng,
    max_len: usize,
    vars: &[&str],
    max_order: u32,
    max_terms: usize,
) -> ShaElem<CommMonomial> {
    rand_sha_elem_with_degree(rng, max_len, vars, max_order, 2, max_terms)
}

pub fn rand_sha_elem_with_degree(
    rng: &mut ChaCha8Rng,
    max_len: usize,
    vars: &[&str],
    max_order: u32,
    slot_degree: usize,
    max_terms: usize,
) -> ShaElem<CommMonomial> {
    let terms = rng.random_range(1..=max_terms.max(1));
    LinComb::from_terms((0..terms).map(|_| {
        (rand_tensor_word(rng, max_len, vars, max_order, slot_degree), rand_coeff(rng))
    }))
}

/// A truncated series with entries drawn from an entry generator.
pub fn rand_hurwitz<E>(
    rng: &mut ChaCha8Rng,
    order: usize,
    mut entry: impl FnMut(&mut ChaCha8Rng) -> E,
) -> HurwitzSeries<E>
where
    E: Clone,
{
    HurwitzSeries::from_entries((0..=order).map(|_| entry(rng)).collect()).expect("nonempty")
}

// ---------------------------------------------------------------------
// instances

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("the degenerate instance needs a nonzero weight")]
pub struct ZeroWeightError;

/// The degenerate instance: the rationals with the weight specialized to a
/// fixed nonzero value `w`, `d(r) = -r/w` and `P(r) = -w r`.
///
/// `d` here satisfies the product identity but `d(1) = -1/w` is nonzero,
/// which is exactly what [`LeibnizMode::Weak`] exists for: the operator is
/// a weak derivation and not a derivation in the strict sense.
pub struct DegenerateInstance {
    weight: Rational,
}

pub fn degenerate_instance(weight: Rational) -> Result<DegenerateInstance, ZeroWeightError> {
    if weight.is_zero() {
        return Err(ZeroWeightError);
    }
    Ok(DegenerateInstance { weight })
}

impl DegenerateInstance {
    pub fn weight(&self) -> &Rational {
        &self.weight
    }
}

impl Algebra for DegenerateInstance {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }

    fn one(&self) -> Rational {
        Rational::one()
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }

    fn neg(&self, a: &Rational) -> Rational {
        &Rational::zero() - a
    }

    fn scale(&self, c: &Scalar, a: &Rational) -> Rational {
        &c.eval_at(&self.weight) * a
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
}

impl Differential for DegenerateInstance {
    fn d(&self, a: &Rational) -> Rational {
        &self.neg(a) / &self.weight
    }
}

impl RotaBaxter for DegenerateInstance {
    fn rb(&self, a: &Rational) -> Rational {
        self.neg(&(a * &self.weight))
    }
}

/// A polynomial in one indeterminate `t` over the rationals; carrier of
/// the difference-operator fixture.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TPoly(pub Scalar);

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_with_var("t"))
    }
}

/// The difference fixture at weight 1: the shift endomorphism
/// `p(t) -> p(t + 1)` minus the identity is a strict derivation of
/// weight 1 on rational polynomials.
pub struct ShiftDifference;

impl ShiftDifference {
    /// `p(t) -> p(t + 1)` by binomial expansion of each power.
    pub fn shift(p: &TPoly) -> TPoly {
        let mut out = Scalar::zero();
        for (deg, r) in p.0.terms() {
            for i in 0..=deg {
                let c = &binomial(deg, i) * r;
                out = &out + &Scalar::term(i, c);
            }
        }
        TPoly(out)
    }
}

impl Algebra for ShiftDifference {
    type Elem = TPoly;

    fn zero(&self) -> TPoly {
        TPoly(Scalar::zero())
    }

    fn one(&self) -> TPoly {
        TPoly(Scalar::one())
    }

    fn add(&self, a: &TPoly, b: &TPoly) -> TPoly {
        TPoly(&a.0 + &b.0)
    }

    fn neg(&self, a: &TPoly) -> TPoly {
        TPoly(-&a.0)
    }

    fn scale(&self, c: &Scalar, a: &TPoly) -> TPoly {
        // the fixture lives at weight 1
        TPoly(&Scalar::from_rational(c.eval_at(&Rational::one())) * &a.0)
    }

    fn mul(&self, a: &TPoly, b: &TPoly) -> TPoly {
        TPoly(&a.0 * &b.0)
    }
}

impl Differential for ShiftDifference {
    fn d(&self, a: &TPoly) -> TPoly {
        self.sub(&Self::shift(a), a)
    }
}

pub fn rand_tpoly(rng: &mut ChaCha8Rng) -> TPoly {
    let mut out = Scalar::zero();
    for deg in 0..=rng.random_range(0u32..=3) {
        out = &out + &Scalar::term(deg, rand_rational(rng));
    }
    TPoly(out)
}

/// Which deliberately broken operator [`BrokenForests`] exposes. Each
/// mutation is the documented counterexample for one checker.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ForestMutation {
    /// Derivation without the weighted cross term; fails the Leibniz check.
    DropWeightTerm,
    /// `P` as the identity map; fails the Rota-Baxter check.
    IdentityOperator,
    /// `P` grafting twice; fails the section check.
    ShiftedGraft,
}

/// Forest algebra with one operator deliberately broken.
pub struct BrokenForests {
    pub mutation: ForestMutation,
}

fn broken_d_basis(f: &Forest) -> ForestElem {
    // two-term recursion over the standard decomposition: the weighted
    // cross term is deliberately missing
    fn d_piece(p: &Forest) -> ForestElem {
        if p.breadth() == 2 && p.trees().iter().all(Tree::is_leaf) {
            return LinComb::basis(Forest::unit());
        }
        match p.trees()[0].ungraft() {
            None => LinComb::zero(),
            Some(inner) => LinComb::basis(inner),
        }
    }
    fn d_pieces(pieces: &[Forest]) -> ForestElem {
        if pieces.len() == 1 {
            return d_piece(&pieces[0]);
        }
        let mut rest = LinComb::basis(pieces[1].clone());
        for p in &pieces[2..] {
            rest = rb_product(&rest, &LinComb::basis(p.clone()));
        }
        let t1 = rb_product(&d_piece(&pieces[0]), &rest);
        let t2 = rb_product(&LinComb::basis(pieces[0].clone()), &d_pieces(&pieces[1..]));
        &t1 + &t2
    }
    d_pieces(&std_decomposition(f))
}

impl Algebra for BrokenForests {
    type Elem = ForestElem;

    fn zero(&self) -> ForestElem {
        LinComb::zero()
    }

    fn one(&self) -> ForestElem {
        LinComb::basis(Forest::unit())
    }

    fn add(&self, a: &ForestElem, b: &ForestElem) -> ForestElem {
        a + b
    }

    fn neg(&self, a: &ForestElem) -> ForestElem {
        -a
    }

    fn scale(&self, c: &Scalar, a: &ForestElem) -> ForestElem {
        a.scale(c)
    }

    fn mul(&self, a: &ForestElem, b: &ForestElem) -> ForestElem {
        rb_product(a, b)
    }
}

impl Differential for BrokenForests {
    fn d(&self, a: &ForestElem) -> ForestElem {
        match self.mutation {
            ForestMutation::DropWeightTerm => a.map(broken_d_basis),
            _ => d_forest(a),
        }
    }
}

impl RotaBaxter for BrokenForests {
    fn rb(&self, a: &ForestElem) -> ForestElem {
        match self.mutation {
            ForestMutation::IdentityOperator => a.clone(),
            ForestMutation::ShiftedGraft => graft_elem(&graft_elem(a)),
            ForestMutation::DropWeightTerm => graft_elem(a),
        }
    }
}
