//! Angularly decorated planar rooted forests: the free noncommutative
//! Rota-Baxter algebra over the derivative alphabet, together with the
//! derivation that makes it the free differential Rota-Baxter algebra.
//!
//! A decorated forest is a shape from [`crate::forests`] plus one symbol
//! per angle, i.e. per gap between consecutive leaves; a forest with `l`
//! leaves carries exactly `l - 1` decorations. The single vertex carries
//! none and is the unit. In text form the decorations sit in their angles:
//! `. x_(0) [. y_(1) .]` is the two-tree forest whose second tree is a
//! cherry with an internal decoration.
//!
//! The standard decomposition splits a decorated forest into its decorated
//! trees with the inter-tree symbols between them; products, the
//! derivation, and morphism evaluation all recurse along it.

use std::fmt;

use crate::algebra::{Algebra, Differential, RotaBaxter};
use crate::forests::{mul_forest, Forest, Tree};
use crate::freediff::{FreeDiffError, Symbol, VarMap};
use crate::lincomb::{bilinear, BasisDisplay, LinComb};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("shape with {leaves} leaves needs {} decorations, found {found}", leaves - 1)]
pub struct DecorationCountError {
    pub leaves: usize,
    pub found: usize,
}

/// A planar rooted forest with one symbol in each angle.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DecForest {
    shape: Forest,
    decorations: Vec<Symbol>,
}

impl DecForest {
    pub fn new(shape: Forest, decorations: Vec<Symbol>) -> Result<Self, DecorationCountError> {
        let leaves = shape.leaf_count();
        if decorations.len() + 1 != leaves {
            return Err(DecorationCountError { leaves, found: decorations.len() });
        }
        Ok(DecForest { shape, decorations })
    }

    /// The unit: the bare vertex, no decorations.
    pub fn unit() -> Self {
        DecForest { shape: Forest::unit(), decorations: Vec::new() }
    }

    pub fn shape(&self) -> &Forest {
        &self.shape
    }

    pub fn decorations(&self) -> &[Symbol] {
        &self.decorations
    }

    pub fn is_unit(&self) -> bool {
        self.shape.is_unit()
    }

    pub fn vertex_count(&self) -> usize {
        self.shape.vertex_count()
    }

    pub fn breadth(&self) -> usize {
        self.shape.breadth()
    }
}

fn fmt_dec_tree(f: &mut fmt::Formatter<'_>, t: &Tree, decs: &[Symbol]) -> fmt::Result {
    if t.is_leaf() {
        debug_assert!(decs.is_empty());
        return write!(f, ".");
    }
    write!(f, "[")?;
    fmt_dec_trees(f, t.children(), decs)?;
    write!(f, "]")
}

fn fmt_dec_trees(f: &mut fmt::Formatter<'_>, trees: &[Tree], decs: &[Symbol]) -> fmt::Result {
    let mut pos = 0usize;
    for (i, t) in trees.iter().enumerate() {
        if i > 0 {
            write!(f, " {} ", decs[pos])?;
            pos += 1;
        }
        let inner = t.leaf_count() - 1;
        fmt_dec_tree(f, t, &decs[pos..pos + inner])?;
        pos += inner;
    }
    debug_assert_eq!(pos, decs.len());
    Ok(())
}

impl fmt::Display for DecForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_dec_trees(f, self.shape.trees(), &self.decorations)
    }
}

impl BasisDisplay for DecForest {
    fn is_unit_basis(&self) -> bool {
        self.is_unit()
    }
}

/// An element of the decorated forest algebra.
pub type DecElem = LinComb<DecForest>;

/// The standard decomposition: the decorated trees of the forest and the
/// inter-tree decoration symbols, alternating. The decoration vector is
/// split at the angles between consecutive trees, one symbol per junction.
pub fn std_decomp(d: &DecForest) -> (Vec<DecForest>, Vec<Symbol>) {
    let mut trees = Vec::with_capacity(d.breadth());
    let mut seps = Vec::with_capacity(d.breadth().saturating_sub(1));
    let mut pos = 0usize;
    for (i, t) in d.shape.trees().iter().enumerate() {
        if i > 0 {
            seps.push(d.decorations[pos].clone());
            pos += 1;
        }
        let inner = t.leaf_count() - 1;
        trees.push(DecForest {
            shape: Forest::single(t.clone()),
            decorations: d.decorations[pos..pos + inner].to_vec(),
        });
        pos += inner;
    }
    debug_assert_eq!(pos, d.decorations.len());
    (trees, seps)
}

/// Concatenation with a decoration in the new angle between the factors.
pub fn concat_sym(a: &DecForest, y: &Symbol, b: &DecForest) -> DecForest {
    let mut decorations = a.decorations.clone();
    decorations.push(y.clone());
    decorations.extend(b.decorations.iter().cloned());
    DecForest { shape: a.shape.concat(&b.shape), decorations }
}

fn concat3(u: &DecElem, y: &Symbol, v: &DecElem) -> DecElem {
    bilinear(u, v, |a, b| LinComb::basis(concat_sym(a, y, b)))
}

/// The product on basis elements: shapes multiply in the forest algebra,
/// decoration vectors concatenate onto every shape term. The product keeps
/// the total leaf count minus one, so each term is decorated consistently.
pub fn dec_mul(a: &DecForest, b: &DecForest) -> DecElem {
    let shape_product = mul_forest(&a.shape, &b.shape);
    let mut decorations = a.decorations.clone();
    decorations.extend(b.decorations.iter().cloned());
    let mut out = LinComb::zero();
    for (shape, c) in shape_product.terms() {
        let term = DecForest::new(shape.clone(), decorations.clone())
            .expect("the product preserves leaf counts");
        out.add_term(term, c.clone());
    }
    out
}

/// Bilinear extension of [`dec_mul`].
pub fn dec_product(u: &DecElem, v: &DecElem) -> DecElem {
    bilinear(u, v, dec_mul)
}

/// The Rota-Baxter operator: grafting the shape; grafting adds no leaves,
/// so the decorations carry over unchanged.
pub fn p_dec(u: &DecElem) -> DecElem {
    u.map_basis(|d| DecForest {
        shape: Forest::single(d.shape.graft()),
        decorations: d.decorations.clone(),
    })
}

/// The generator embedding: a symbol becomes the two-vertex forest with
/// that symbol in its angle.
pub fn j_dec(sym: Symbol) -> DecForest {
    DecForest {
        shape: Forest::from_trees(vec![Tree::leaf(), Tree::leaf()]),
        decorations: vec![sym],
    }
}

/// Derivation of a decorated tree: `None` (zero) on the bare vertex, root
/// removal on a grafted tree; the angles survive, so the decorations do.
fn d_dec_tree_basis(d: &DecForest) -> Option<DecForest> {
    debug_assert_eq!(d.breadth(), 1);
    d.shape.trees()[0]
        .ungraft()
        .map(|inner| DecForest { shape: inner, decorations: d.decorations.clone() })
}

fn d_dec_tree(d: &DecForest) -> DecElem {
    match d_dec_tree_basis(d) {
        None => LinComb::zero(),
        Some(f) => LinComb::basis(f),
    }
}

/// The derivation on a basis forest, by induction on the breadth: a lone
/// decorated tree uses the base cases, and `D = D_1 y D_t` expands into the
/// seven weighted terms obtained by differentiating any nonempty subset of
/// the three concatenation factors (the middle symbol differentiates by an
/// order bump).
pub fn d_dec_basis(d: &DecForest) -> DecElem {
    let (trees, seps) = std_decomp(d);
    if trees.len() == 1 {
        return d_dec_tree(&trees[0]);
    }
    let d1 = LinComb::basis(trees[0].clone());
    let dd1 = d_dec_tree(&trees[0]);
    let y = &seps[0];
    let dy = y.bump();
    let skip = trees[0].decorations.len() + 1;
    let tail = DecForest {
        shape: Forest::from_trees(d.shape.trees()[1..].to_vec()),
        decorations: d.decorations[skip..].to_vec(),
    };
    let dt = LinComb::basis(tail.clone());
    let ddt = d_dec_basis(&tail);

    let lambda = Scalar::lambda();
    let mut out = concat3(&dd1, y, &dt);
    out = &out + &concat3(&d1, &dy, &dt);
    out = &out + &concat3(&d1, y, &ddt);
    out = &out + &concat3(&dd1, &dy, &dt).scale(&lambda);
    out = &out + &concat3(&dd1, y, &ddt).scale(&lambda);
    out = &out + &concat3(&d1, &dy, &ddt).scale(&lambda);
    out = &out + &concat3(&dd1, &dy, &ddt).scale(&Scalar::lambda_pow(2));
    out
}

/// The derivation, extended linearly.
pub fn d_dec(u: &DecElem) -> DecElem {
    u.map(d_dec_basis)
}

/// The closed general Leibniz form of the derivation: write the forest as
/// the concatenation `D_1 y_1 D_2 ... y_(b-1) D_b`, pick any nonempty
/// subset of the `2b - 1` factors to differentiate, weight by `L^(|I|-1)`,
/// and concatenate back. Must agree with [`d_dec_basis`] on every input.
pub fn d_dec_general(d: &DecForest) -> DecElem {
    let (trees, seps) = std_decomp(d);
    let b = trees.len();
    let k = 2 * b - 1;
    assert!(k < usize::BITS as usize, "breadth out of range");
    let derived: Vec<Option<DecForest>> = trees.iter().map(d_dec_tree_basis).collect();
    let mut out = LinComb::zero();
    'subsets: for mask in 1u64..(1u64 << k) {
        // factor i of the concatenation is a tree for even i, a symbol
        // for odd i (0-based)
        let mut pieces = Vec::with_capacity(b);
        for (ti, t) in trees.iter().enumerate() {
            if mask & (1 << (2 * ti)) != 0 {
                match &derived[ti] {
                    None => continue 'subsets, // differentiated a bare vertex
                    Some(f) => pieces.push(f.clone()),
                }
            } else {
                pieces.push(t.clone());
            }
        }
        let mut acc = pieces[0].clone();
        for (si, sep) in seps.iter().enumerate() {
            let sym = if mask & (1 << (2 * si + 1)) != 0 { sep.bump() } else { sep.clone() };
            acc = concat_sym(&acc, &sym, &pieces[si + 1]);
        }
        out.add_term(acc, Scalar::lambda_pow(mask.count_ones() - 1));
    }
    out
}

/// Evaluates the unique morphism of differential Rota-Baxter algebras
/// determined by images of the base variables: a decoration symbol `x_(n)`
/// maps to the n-th derivative of the image of `x`, grafting maps to the
/// target operator `P`, and the standard decomposition maps to the product
/// of its pieces.
pub fn extend_drb_hom<T>(
    assign: &VarMap<T::Elem>,
    target: &T,
    u: &DecElem,
) -> Result<T::Elem, FreeDiffError>
where
    T: Differential + RotaBaxter,
{
    fn sym_image<T: Differential + RotaBaxter>(
        assign: &VarMap<T::Elem>,
        target: &T,
        sym: &Symbol,
    ) -> Result<T::Elem, FreeDiffError> {
        let base = assign
            .get(sym.base.as_ref() as &str)
            .ok_or_else(|| FreeDiffError::UnmappedVariable(sym.base.to_string()))?;
        Ok(target.d_pow(base, sym.order))
    }

    fn eval_basis<T: Differential + RotaBaxter>(
        assign: &VarMap<T::Elem>,
        target: &T,
        d: &DecForest,
    ) -> Result<T::Elem, FreeDiffError> {
        let (trees, seps) = std_decomp(d);
        if trees.len() == 1 {
            return match d_dec_tree_basis(&trees[0]) {
                None => Ok(target.one()),
                Some(inner) => Ok(target.rb(&eval_basis(assign, target, &inner)?)),
            };
        }
        let mut acc = eval_basis(assign, target, &trees[0])?;
        for (y, t) in seps.iter().zip(&trees[1..]) {
            acc = target.mul(&acc, &sym_image(assign, target, y)?);
            acc = target.mul(&acc, &eval_basis(assign, target, t)?);
        }
        Ok(acc)
    }

    let mut acc = target.zero();
    for (d, c) in u.terms() {
        let img = eval_basis(assign, target, d)?;
        acc = target.add(&acc, &target.scale(c, &img));
    }
    Ok(acc)
}

/// All decorated forests with at most `max_vertices` vertices and
/// decorations drawn from `symbols`.
pub fn enumerate_decorated(max_vertices: usize, symbols: &[Symbol]) -> Vec<DecForest> {
    assert!(!symbols.is_empty());
    let mut out = Vec::new();
    for shape in crate::forests::enumerate_forests_up_to(max_vertices) {
        let angles = shape.leaf_count() - 1;
        let mut idx = vec![0usize; angles];
        loop {
            let decorations: Vec<Symbol> = idx.iter().map(|&i| symbols[i].clone()).collect();
            out.push(DecForest::new(shape.clone(), decorations).expect("counted angles"));
            let mut j = 0;
            while j < angles {
                idx[j] += 1;
                if idx[j] < symbols.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == angles {
                break;
            }
        }
    }
    out
}

/// Handle for the decorated forest algebra.
pub struct DecoratedAlgebra;

impl Algebra for DecoratedAlgebra {
    type Elem = DecElem;

    fn zero(&self) -> DecElem {
        LinComb::zero()
    }

    fn one(&self) -> DecElem {
        LinComb::basis(DecForest::unit())
    }

    fn add(&self, a: &DecElem, b: &DecElem) -> DecElem {
        a + b
    }

    fn neg(&self, a: &DecElem) -> DecElem {
        -a
    }

    fn scale(&self, c: &Scalar, a: &DecElem) -> DecElem {
        a.scale(c)
    }

    fn mul(&self, a: &DecElem, b: &DecElem) -> DecElem {
        dec_product(a, b)
    }

    fn add_scaled_assign(&self, acc: &mut Self::Elem, c: &Scalar, x: &Self::Elem) {
        acc.add_scaled_assign(c, x);
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
}

impl RotaBaxter for DecoratedAlgebra {
    fn rb(&self, a: &DecElem) -> DecElem {
        p_dec(a)
    }
}

impl Differential for DecoratedAlgebra {
    fn d(&self, a: &DecElem) -> DecElem {
        d_dec(a)
    }
}
