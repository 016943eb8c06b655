//! Randomized structural invariants with their full sample counts:
//! associativity, commutativity and unit laws for each product, the
//! 500-pair Leibniz run for the free differential algebra, and the
//! intertwining of the derivative-series embedding.

use rand_chacha::ChaCha8Rng;

use drb::algebra::Algebra;
use drb::axioms::{
    check_leibniz, rand_dec_elem, rand_diff_elem, rand_forest_elem, rand_sha_elem, sample_rng,
    LeibnizMode,
};
use drb::decorated::{dec_product, DecoratedAlgebra};
use drb::forests::{rb_product, ForestAlgebra};
use drb::freediff::{d_elem, CommDiffAlgebra};
use drb::hurwitz::{eta, partial, truncate_to};
use drb::shuffle::sha_product;

#[test]
fn freediff_leibniz_500_pairs() {
    let alg = CommDiffAlgebra::new();
    let mut gen = |rng: &mut ChaCha8Rng| rand_diff_elem(rng, &["x", "y"], 3, 4, 2);
    let r = check_leibniz(&alg, &mut gen, 500, 17, LeibnizMode::Strict);
    assert!(r.pass(), "{r}");
}

#[test]
fn shuffle_product_is_associative_and_commutative() {
    // triples with total tensor length at most 6
    for i in 0..300u32 {
        let mut rng = sample_rng(21, i);
        let u = rand_sha_elem(&mut rng, 2, &["x", "y"], 2, 1);
        let v = rand_sha_elem(&mut rng, 2, &["x", "y"], 2, 1);
        let w = rand_sha_elem(&mut rng, 2, &["x", "y"], 2, 1);
        assert_eq!(sha_product(&u, &v), sha_product(&v, &u), "commutativity at {i}");
        assert_eq!(
            sha_product(&sha_product(&u, &v), &w),
            sha_product(&u, &sha_product(&v, &w)),
            "associativity at {i}"
        );
    }
}

#[test]
fn forest_product_is_associative_with_unit() {
    let alg = ForestAlgebra;
    for i in 0..300u32 {
        let mut rng = sample_rng(22, i);
        let a = rand_forest_elem(&mut rng, 7, 1);
        let b = rand_forest_elem(&mut rng, 7, 1);
        let c = rand_forest_elem(&mut rng, 7, 1);
        assert_eq!(
            rb_product(&rb_product(&a, &b), &c),
            rb_product(&a, &rb_product(&b, &c)),
            "associativity at {i}"
        );
        assert_eq!(rb_product(&a, &alg.one()), a);
        assert_eq!(rb_product(&alg.one(), &a), a);
    }
}

#[test]
fn decorated_product_is_associative_with_unit() {
    let alg = DecoratedAlgebra;
    for i in 0..300u32 {
        let mut rng = sample_rng(23, i);
        let a = rand_dec_elem(&mut rng, 6, &["x", "y"], 2, 1);
        let b = rand_dec_elem(&mut rng, 6, &["x", "y"], 2, 1);
        let c = rand_dec_elem(&mut rng, 6, &["x", "y"], 2, 1);
        assert_eq!(
            dec_product(&dec_product(&a, &b), &c),
            dec_product(&a, &dec_product(&b, &c)),
            "associativity at {i}"
        );
        assert_eq!(dec_product(&a, &alg.one()), a);
        assert_eq!(dec_product(&alg.one(), &a), a);
    }
}

#[test]
fn derivative_series_embedding_intertwines() {
    let alg = CommDiffAlgebra::new();
    for i in 0..100u32 {
        let mut rng = sample_rng(24, i);
        let x = rand_diff_elem(&mut rng, &["x", "y"], 2, 3, 2);
        // shifting the embedded series equals embedding the derivative,
        // one order down
        let lhs = partial(&eta(&alg, &x, 5)).unwrap();
        let rhs = eta(&alg, &d_elem(&x), 4);
        assert_eq!(lhs, rhs, "intertwining at {i}");
        let _ = truncate_to(&lhs, 3).unwrap();
    }
}
