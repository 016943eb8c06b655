//! Planar rooted forests with the weighted Rota-Baxter product.
//!
//! Trees are rigid: the left-to-right order of children is significant and
//! equality is structural. The single vertex `.` is the unit of the product
//! `⋄`, written `*` in the text grammar. On trees the product recurses
//! under grafting with a weighted merge term; on forests it merges the last
//! tree of the left factor with the first tree of the right factor. The
//! derivation splits a forest along its `⋄`-standard decomposition, where
//! the pieces alternate between the constituent trees and the two-vertex
//! forest `.|.`.

use std::cmp::Ordering;
use std::fmt;

use crate::algebra::{Algebra, Differential, RotaBaxter};
use crate::lincomb::{bilinear, BasisDisplay, LinComb};
use crate::scalar::Scalar;

/// A planar rooted tree: a root with an ordered (possibly empty) list of
/// subtrees.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Tree {
    children: Vec<Tree>,
}

impl Tree {
    /// The single vertex.
    pub fn leaf() -> Self {
        Tree { children: Vec::new() }
    }

    pub fn with_children(children: Vec<Tree>) -> Self {
        Tree { children }
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(Tree::vertex_count).sum::<usize>()
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(Tree::leaf_count).sum()
        }
    }

    /// The forest under the root; `None` for the single vertex.
    pub fn ungraft(&self) -> Option<Forest> {
        if self.is_leaf() {
            None
        } else {
            Some(Forest::from_trees(self.children.clone()))
        }
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertex_count()
            .cmp(&other.vertex_count())
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return write!(f, ".");
        }
        write!(f, "[")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A planar rooted forest: a nonempty ordered sequence of trees.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    /// The unit forest: the single vertex.
    pub fn unit() -> Self {
        Forest { trees: vec![Tree::leaf()] }
    }

    pub fn single(tree: Tree) -> Self {
        Forest { trees: vec![tree] }
    }

    pub fn from_trees(trees: Vec<Tree>) -> Self {
        assert!(!trees.is_empty(), "forests are nonempty");
        Forest { trees }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn is_unit(&self) -> bool {
        self.trees.len() == 1 && self.trees[0].is_leaf()
    }

    pub fn breadth(&self) -> usize {
        self.trees.len()
    }

    pub fn depth(&self) -> usize {
        self.trees.iter().map(Tree::depth).max().unwrap_or(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.trees.iter().map(Tree::vertex_count).sum()
    }

    pub fn leaf_count(&self) -> usize {
        self.trees.iter().map(Tree::leaf_count).sum()
    }

    /// Adds a new root above the whole forest.
    pub fn graft(&self) -> Tree {
        Tree { children: self.trees.clone() }
    }

    /// Concatenation, the free-semigroup product.
    pub fn concat(&self, other: &Forest) -> Forest {
        let mut trees = self.trees.clone();
        trees.extend(other.trees.iter().cloned());
        Forest { trees }
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertex_count()
            .cmp(&other.vertex_count())
            .then_with(|| self.trees.cmp(&other.trees))
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl BasisDisplay for Forest {
    fn is_unit_basis(&self) -> bool {
        self.is_unit()
    }
}

/// An element of the forest algebra.
pub type ForestElem = LinComb<Forest>;

/// `(depth, breadth, leaf count)` of a forest.
pub fn metrics(f: &Forest) -> (usize, usize, usize) {
    (f.depth(), f.breadth(), f.leaf_count())
}

/// Tree-level product. Terms are always single trees.
///
/// `fuel` bounds the recursion in debug builds; it strictly decreases with
/// the combined depth, which is what makes the recursion well-founded.
fn mul_tree(l: &Tree, r: &Tree, fuel: usize) -> ForestElem {
    debug_assert!(fuel > 0, "tree product failed to descend the depth filtration");
    if r.is_leaf() {
        return LinComb::basis(Forest::single(l.clone()));
    }
    if l.is_leaf() {
        return LinComb::basis(Forest::single(r.clone()));
    }
    let lbar = l.ungraft().expect("non-leaf");
    let rbar = r.ungraft().expect("non-leaf");
    let fuel = fuel - 1;
    // ⌊ l̄ ⋄ ⌊r̄⌋ ⌋
    let t1 = mul_forest_with_fuel(&lbar, &Forest::single(r.clone()), fuel);
    // ⌊ ⌊l̄⌋ ⋄ r̄ ⌋
    let t2 = mul_forest_with_fuel(&Forest::single(l.clone()), &rbar, fuel);
    // L ⌊ l̄ ⋄ r̄ ⌋
    let t3 = mul_forest_with_fuel(&lbar, &rbar, fuel);
    let grafted = |u: &ForestElem| u.map_basis(|w| Forest::single(w.graft()));
    &(&grafted(&t1) + &grafted(&t2)) + &grafted(&t3).scale(&Scalar::lambda())
}

fn mul_forest_with_fuel(f: &Forest, g: &Forest, fuel: usize) -> ForestElem {
    let (f_init, f_last) = f.trees.split_at(f.trees.len() - 1);
    let (g_first, g_tail) = g.trees.split_at(1);
    let mid = mul_tree(&f_last[0], &g_first[0], fuel);
    let mut out = LinComb::zero();
    for (m, c) in mid.terms() {
        debug_assert_eq!(m.breadth(), 1, "tree product term must be a tree");
        let mut trees = f_init.to_vec();
        trees.push(m.trees[0].clone());
        trees.extend(g_tail.iter().cloned());
        out.add_term(Forest::from_trees(trees), c.clone());
    }
    out
}

/// The weighted Rota-Baxter product on basis forests: the inner pair of
/// trees merges via the tree-level recursion, outer trees concatenate.
pub fn mul_forest(f: &Forest, g: &Forest) -> ForestElem {
    mul_forest_with_fuel(f, g, f.depth() + g.depth() + 1)
}

/// Bilinear extension of [`mul_forest`].
pub fn rb_product(u: &ForestElem, v: &ForestElem) -> ForestElem {
    bilinear(u, v, mul_forest)
}

/// Grafting extended linearly, the Rota-Baxter operator.
pub fn graft_elem(u: &ForestElem) -> ForestElem {
    u.map_basis(|f| Forest::single(f.graft()))
}

/// The `⋄`-standard decomposition: the trees of `F` interleaved with copies
/// of the two-vertex forest `.|.`, a sequence of length `2b - 1` whose
/// `⋄`-product returns `F`.
pub fn std_decomposition(f: &Forest) -> Vec<Forest> {
    let two = Forest::from_trees(vec![Tree::leaf(), Tree::leaf()]);
    let mut parts = Vec::with_capacity(2 * f.trees.len() - 1);
    for (i, t) in f.trees.iter().enumerate() {
        if i > 0 {
            parts.push(two.clone());
        }
        parts.push(Forest::single(t.clone()));
    }
    parts
}

/// The derivation on a single decomposition piece: zero on the unit, the
/// unit on `.|.`, and removal of the root on a grafted tree.
fn d_piece(p: &Forest) -> ForestElem {
    if p.breadth() == 2 && p.is_unit_pair() {
        return LinComb::basis(Forest::unit());
    }
    debug_assert_eq!(p.breadth(), 1, "decomposition piece");
    match p.trees[0].ungraft() {
        None => LinComb::zero(),
        Some(inner) => LinComb::basis(inner),
    }
}

impl Forest {
    fn is_unit_pair(&self) -> bool {
        self.trees.len() == 2 && self.trees.iter().all(Tree::is_leaf)
    }
}

fn product_of_pieces(pieces: &[Forest]) -> ForestElem {
    let mut acc = LinComb::basis(pieces[0].clone());
    for p in &pieces[1..] {
        acc = rb_product(&acc, &LinComb::basis(p.clone()));
    }
    acc
}

fn d_pieces(pieces: &[Forest]) -> ForestElem {
    if pieces.len() == 1 {
        return d_piece(&pieces[0]);
    }
    let v1 = LinComb::basis(pieces[0].clone());
    let dv1 = d_piece(&pieces[0]);
    let rest = product_of_pieces(&pieces[1..]);
    let drest = d_pieces(&pieces[1..]);
    let t1 = rb_product(&dv1, &rest);
    let t2 = rb_product(&v1, &drest);
    let t3 = rb_product(&dv1, &drest).scale(&Scalar::lambda());
    &(&t1 + &t2) + &t3
}

/// The forest derivation of a basis forest, evaluated through the
/// recursive Leibniz relation over the `⋄`-standard decomposition.
pub fn d_forest_basis(f: &Forest) -> ForestElem {
    d_pieces(&std_decomposition(f))
}

/// The forest derivation, extended linearly.
pub fn d_forest(u: &ForestElem) -> ForestElem {
    u.map(d_forest_basis)
}

/// The closed subset-sum form of the derivation: over every nonempty
/// subset of decomposition pieces, differentiate the selected pieces and
/// `⋄`-multiply everything back together, weighted by `L^(|I|-1)`.
///
/// Agrees with [`d_forest_basis`] everywhere; the recursive form is the
/// evaluation route because the subset sum is exponential in the breadth.
pub fn d_forest_subset_sum(f: &Forest) -> ForestElem {
    let pieces = std_decomposition(f);
    let k = pieces.len();
    assert!(k < usize::BITS as usize, "breadth out of range");
    let derived: Vec<ForestElem> = pieces.iter().map(d_piece).collect();
    let mut out = LinComb::zero();
    for mask in 1u64..(1u64 << k) {
        let mut prod: Option<ForestElem> = None;
        let mut dead = false;
        for (i, piece) in pieces.iter().enumerate() {
            let factor = if mask & (1 << i) != 0 {
                if derived[i].is_zero() {
                    dead = true;
                    break;
                }
                derived[i].clone()
            } else {
                LinComb::basis(piece.clone())
            };
            prod = Some(match prod {
                None => factor,
                Some(acc) => rb_product(&acc, &factor),
            });
        }
        if dead {
            continue;
        }
        let weight = Scalar::lambda_pow(mask.count_ones() - 1);
        out = &out + &prod.expect("nonempty piece list").scale(&weight);
    }
    out
}

/// All planar rooted trees with exactly `n` vertices, in canonical order.
pub fn enumerate_trees(n: usize) -> Vec<Tree> {
    assert!(n >= 1);
    if n == 1 {
        return vec![Tree::leaf()];
    }
    // children form a forest with n - 1 vertices
    enumerate_forest_lists(n - 1)
        .into_iter()
        .map(Tree::with_children)
        .collect()
}

fn enumerate_forest_lists(total: usize) -> Vec<Vec<Tree>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for t in enumerate_trees(first) {
            for rest in enumerate_forest_lists(total - first) {
                let mut list = vec![t.clone()];
                list.extend(rest);
                out.push(list);
            }
        }
    }
    out
}

/// All planar rooted forests with between 1 and `max` vertices.
pub fn enumerate_forests_up_to(max: usize) -> Vec<Forest> {
    let mut out = Vec::new();
    for n in 1..=max {
        for list in enumerate_forest_lists(n) {
            if !list.is_empty() {
                out.push(Forest::from_trees(list));
            }
        }
    }
    out
}

/// Handle for the forest algebra.
pub struct ForestAlgebra;

impl Algebra for ForestAlgebra {
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

    fn add_scaled_assign(&self, acc: &mut Self::Elem, c: &Scalar, x: &Self::Elem) {
        acc.add_scaled_assign(c, x);
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
}

impl RotaBaxter for ForestAlgebra {
    fn rb(&self, a: &ForestElem) -> ForestElem {
        graft_elem(a)
    }
}

impl Differential for ForestAlgebra {
    fn d(&self, a: &ForestElem) -> ForestElem {
        d_forest(a)
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::{Forest, Tree};

    /// Tiny structural parser for tests: '.', '[..]', '|'.
    pub(crate) fn parse_forest(s: &str) -> Forest {
        fn parse_trees(chars: &mut std::iter::Peekable<std::str::Chars>) -> Vec<Tree> {
            let mut trees = Vec::new();
            loop {
                match chars.peek() {
                    Some('.') => {
                        chars.next();
                        trees.push(Tree::leaf());
                    }
                    Some('[') => {
                        chars.next();
                        let inner = parse_trees(chars);
                        assert_eq!(chars.next(), Some(']'));
                        trees.push(Tree::with_children(inner));
                    }
                    _ => break,
                }
                if chars.peek() == Some(&'|') {
                    chars.next();
                } else {
                    break;
                }
            }
            trees
        }
        let mut it = s.chars().peekable();
        let trees = parse_trees(&mut it);
        assert!(it.next().is_none(), "trailing input in {s}");
        Forest::from_trees(trees)
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::parse_forest;
    use super::*;

    fn fe(s: &str) -> ForestElem {
        LinComb::basis(parse_forest(s))
    }

    #[test]
    fn grafting_and_metrics() {
        assert_eq!(Forest::unit().graft().to_string(), "[.]");
        assert_eq!(parse_forest(".|.").graft().to_string(), "[.|.]");
        assert_eq!(
            Forest::single(parse_forest(".|.").graft()).graft().to_string(),
            "[[.|.]]"
        );
        assert_eq!(metrics(&Forest::unit()), (0, 1, 1));
        assert_eq!(metrics(&parse_forest("[.|.]")), (1, 1, 2));
        assert_eq!(metrics(&parse_forest(".|[.]")), (1, 2, 2));
    }

    #[test]
    fn concat_is_free_semigroup() {
        let a = parse_forest(".|.");
        let b = parse_forest("[.]");
        assert_eq!(a.concat(&b).to_string(), ".|.|[.]");
        let c = parse_forest("[[.]]");
        assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
    }

    #[test]
    fn golden_product() {
        // [.|.] ⋄ [.] = [.|[.]] + [[.|.]] + L [.|.]
        let lhs = rb_product(&fe("[.|.]"), &fe("[.]"));
        let expected = LinComb::from_terms([
            (parse_forest("[.|[.]]"), Scalar::one()),
            (parse_forest("[[.|.]]"), Scalar::one()),
            (parse_forest("[.|.]"), Scalar::lambda()),
        ]);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn unit_laws() {
        let samples = ["[.|.]", ".|[.]|.", "[[.]|.]"];
        for s in samples {
            assert_eq!(rb_product(&fe(s), &fe(".")), fe(s));
            assert_eq!(rb_product(&fe("."), &fe(s)), fe(s));
        }
    }

    #[test]
    fn tree_times_tree_unfolding() {
        // [.] ⋄ [.] = 2 [[.]] + L [.]
        let lhs = rb_product(&fe("[.]"), &fe("[.]"));
        let expected = LinComb::from_terms([
            (parse_forest("[[.]]"), Scalar::from_int(2)),
            (parse_forest("[.]"), Scalar::lambda()),
        ]);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn std_decomposition_examples() {
        assert_eq!(std_decomposition(&parse_forest("[.|.]")), vec![parse_forest("[.|.]")]);
        assert_eq!(
            std_decomposition(&parse_forest(".|[.]")),
            vec![parse_forest("."), parse_forest(".|."), parse_forest("[.]")]
        );
        assert_eq!(
            std_decomposition(&parse_forest("[.|.]|[.]")),
            vec![parse_forest("[.|.]"), parse_forest(".|."), parse_forest("[.]")]
        );
        // the product of the pieces reassembles the forest
        for s in ["[.|.]|[.]", ".|.|.", "[[.]]|.|[.|.]"] {
            let f = parse_forest(s);
            assert_eq!(product_of_pieces(&std_decomposition(&f)), LinComb::basis(f));
        }
    }

    #[test]
    fn derivation_base_cases() {
        assert!(d_forest(&fe(".")).is_zero());
        assert_eq!(d_forest(&fe(".|.")), fe("."));
        assert_eq!(d_forest(&fe("[.]")), fe("."));
        assert_eq!(d_forest(&fe("[.|[.]]")), fe(".|[.]"));
    }

    #[test]
    fn derivation_worked_examples() {
        // d(.|[.]) = [.] + .|. + L .
        let expected = LinComb::from_terms([
            (parse_forest("[.]"), Scalar::one()),
            (parse_forest(".|."), Scalar::one()),
            (Forest::unit(), Scalar::lambda()),
        ]);
        assert_eq!(d_forest(&fe(".|[.]")), expected);

        // d([.|.]|.) = .|.|. + [.|.] + L .|.
        let expected = LinComb::from_terms([
            (parse_forest(".|.|."), Scalar::one()),
            (parse_forest("[.|.]"), Scalar::one()),
            (parse_forest(".|."), Scalar::lambda()),
        ]);
        assert_eq!(d_forest(&fe("[.|.]|.")), expected);
    }

    #[test]
    fn derivation_eight_term_example() {
        // d([.|.]|[.]) expands to eight terms. Note the fifth: the
        // inner pair of single vertices merges, so it reads .|.|[.],
        // which is what the recursive relation and the Leibniz rule both
        // force (and what reassembling d via any bracketing gives).
        let expected = LinComb::from_terms([
            (parse_forest("[.|[.]]"), Scalar::one()),
            (parse_forest("[[.|.]]"), Scalar::one()),
            (parse_forest("[.|.]"), &Scalar::from_int(2) * &Scalar::lambda()),
            (parse_forest("[.|.]|."), Scalar::one()),
            (parse_forest(".|.|[.]"), Scalar::one()),
            (parse_forest(".|[.]"), Scalar::lambda()),
            (parse_forest(".|.|."), Scalar::lambda()),
            (parse_forest(".|."), Scalar::lambda_pow(2)),
        ]);
        let computed = d_forest(&fe("[.|.]|[.]"));
        assert_eq!(computed.num_terms(), 8);
        assert_eq!(computed, expected);

        // cross-check through the Leibniz rule on [.|.] ⋄ (.|.) ⋄ [.]
        let u = rb_product(&fe("[.|.]"), &fe(".|."));
        let v = fe("[.]");
        let leibniz = &(&rb_product(&d_forest(&u), &v) + &rb_product(&u, &d_forest(&v)))
            + &rb_product(&d_forest(&u), &d_forest(&v)).scale(&Scalar::lambda());
        assert_eq!(leibniz, expected);
    }

    #[test]
    fn subset_sum_matches_recursion_small() {
        for f in enumerate_forests_up_to(5) {
            assert_eq!(
                d_forest_subset_sum(&f),
                d_forest_basis(&f),
                "mismatch on {f}"
            );
        }
    }

    #[test]
    fn d_after_graft_is_identity() {
        for s in ["[.|.]", ".|[.]|.", "[[.]|.]", "."] {
            let u = fe(s);
            assert_eq!(d_forest(&graft_elem(&u)), u);
        }
    }

    #[test]
    fn associativity_spot_checks() {
        let xs = ["[.]", ".|.", "[.|.]", ".|[.]"];
        for a in xs {
            for b in xs {
                for c in xs {
                    let ab_c = rb_product(&rb_product(&fe(a), &fe(b)), &fe(c));
                    let a_bc = rb_product(&fe(a), &rb_product(&fe(b), &fe(c)));
                    assert_eq!(ab_c, a_bc, "({a} {b}) {c}");
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        // Catalan numbers: trees with n vertices, forests with exactly n
        assert_eq!(enumerate_trees(1).len(), 1);
        assert_eq!(enumerate_trees(4).len(), 5);
        assert_eq!(enumerate_trees(5).len(), 14);
        let forests = enumerate_forests_up_to(4);
        let by_size = |n: usize| forests.iter().filter(|f| f.vertex_count() == n).count();
        assert_eq!(by_size(1), 1);
        assert_eq!(by_size(2), 2);
        assert_eq!(by_size(3), 5);
        assert_eq!(by_size(4), 14);
    }
}
