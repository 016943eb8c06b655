//! Exact computer algebra for differential and Rota-Baxter operators of a
//! formal weight.
//!
//! The crate builds, over the ground ring `Q[L]` of rational polynomials in
//! the weight `L`, the standard family of free objects attached to a
//! weighted derivation (`d(xy) = d(x)y + x d(y) + L d(x)d(y)`) and a
//! weighted Rota-Baxter operator (`P(x)P(y) = P(xP(y)) + P(P(x)y) +
//! L P(xy)`):
//!
//! * [`freediff`]: free differential algebras on a variable set,
//!   commutative and noncommutative;
//! * [`hurwitz`]: truncated weighted Hurwitz series, the cofree
//!   differential algebra over a base algebra, with its Rota-Baxter shift;
//! * [`shuffle`]: the mixable shuffle algebra, the free commutative
//!   Rota-Baxter algebra over a base, with its induced derivation;
//! * [`forests`]: planar rooted forests with the weighted Rota-Baxter
//!   product, grafting, and the forest derivation;
//! * [`decorated`]: angularly decorated planar forests, the free
//!   noncommutative Rota-Baxter algebra, with its induced derivation;
//! * [`axioms`]: seeded randomized checkers for the defining identities
//!   and the morphism equations, plus degenerate and deliberately broken
//!   instances the checkers must catch;
//! * [`text`]: the expression grammar, canonical printer, JSON forms and
//!   evaluation contexts behind the `drb` command-line tool.
//!
//! All arithmetic is exact; identity checks compare normal forms for
//! structural equality.

pub mod algebra;
pub mod axioms;
pub mod decorated;
pub mod forests;
pub mod freediff;
pub mod hurwitz;
pub mod lincomb;
pub mod scalar;
pub mod shuffle;
pub mod text;
