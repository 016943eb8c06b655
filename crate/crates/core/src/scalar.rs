//! The ground ring: univariate polynomials in the formal weight `L` with
//! exact rational coefficients.
//!
//! Every identity in this crate is checked over this ring, so a verified
//! identity holds for every numeric specialization of the weight at once.
//! [`Scalar::eval_at`] performs that specialization when a concrete weight
//! is wanted (e.g. weight 1 for difference-style operators).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Arbitrary-precision rational, always reduced, denominator positive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Builds `num/den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Rational(self.0.recip())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
    };
}

rational_binop!(Add, add, +);
rational_binop!(Sub, sub, -);
rational_binop!(Mul, mul, *);

impl Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::str::FromStr for Rational {
    type Err = String;

    /// Accepts `p` or `p/q` with optional leading sign.
    fn from_str(s: &str) -> Result<Self, String> {
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigInt = num.parse().map_err(|_| format!("bad numerator `{num}`"))?;
        let den: BigInt = den.parse().map_err(|_| format!("bad denominator `{den}`"))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rational::from_big(num, den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exact binomial coefficient as a [`Rational`].
pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    Rational::from_bigint(num::integer::binomial(BigInt::from(n), BigInt::from(k)))
}

/// Polynomial in the formal weight, sparse by degree.
///
/// Invariant: no stored coefficient is zero; the zero polynomial is the
/// empty map. Canonical text form is e.g. `3/2 + 2*L + L^2`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar {
    coeffs: BTreeMap<u32, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    /// The formal weight itself.
    pub fn lambda() -> Self {
        Scalar::term(1, Rational::one())
    }

    pub fn lambda_pow(k: u32) -> Self {
        Scalar::term(k, Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Rational::from_int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::term(0, r)
    }

    /// The single-term polynomial `r * L^deg`.
    pub fn term(deg: u32, r: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !r.is_zero() {
            coeffs.insert(deg, r);
        }
        Scalar { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
            && self.coeffs.get(&0).map(Rational::is_one).unwrap_or(false)
    }

    /// Degree of the polynomial, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, deg: u32) -> Rational {
        self.coeffs.get(&deg).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(d, r)| (*d, r))
    }

    fn add_term(&mut self, deg: u32, r: &Rational) {
        if r.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(deg).or_insert_with(Rational::zero);
        *entry = &*entry + r;
        if entry.is_zero() {
            self.coeffs.remove(&deg);
        }
    }

    /// Substitutes a concrete rational for the weight.
    pub fn eval_at(&self, weight: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (deg, r) in &self.coeffs {
            acc = &acc + &(r * &weight.pow(*deg));
        }
        acc
    }

    /// True when the polynomial is a single term; used by the printer to
    /// decide whether a coefficient needs parentheses.
    pub fn is_single_term(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Sign of the single-term polynomial, for `a - b` style printing.
    pub fn single_term_negative(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.values().next().unwrap().is_negative()
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (deg, r) in &rhs.coeffs {
            out.add_term(*deg, r);
        }
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &-rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            coeffs: self.coeffs.iter().map(|(d, r)| (*d, -r)).collect(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (da, ra) in &self.coeffs {
            for (db, rb) in &rhs.coeffs {
                out.add_term(da + db, &(ra * rb));
            }
        }
        out
    }
}

impl Scalar {
    /// Canonical text with a caller-chosen name for the indeterminate.
    pub fn to_string_with_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (deg, r)) in self.coeffs.iter().enumerate() {
            if i == 0 {
                out.push_str(&render_term(*deg, r, var));
            } else if r.is_negative() {
                out.push_str(" - ");
                out.push_str(&render_term(*deg, &r.abs(), var));
            } else {
                out.push_str(" + ");
                out.push_str(&render_term(*deg, r, var));
            }
        }
        out
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with_var("L"))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn render_term(deg: u32, r: &Rational, var: &str) -> String {
    let power = match deg {
        0 => return r.to_string(),
        1 => var.to_string(),
        d => format!("{var}^{d}"),
    };
    if r.is_one() {
        power
    } else if (&Rational::zero() - r).is_one() {
        format!("-{power}")
    } else {
        format!("{r}*{power}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(terms: &[(u32, i64, i64)]) -> Scalar {
        let mut acc = Scalar::zero();
        for &(deg, n, d) in terms {
            acc = &acc + &Scalar::term(deg, Rational::new(n, d));
        }
        acc
    }

    #[test]
    fn add_examples() {
        // (1 + L) + 2L = 1 + 3L
        let a = s(&[(0, 1, 1), (1, 1, 1)]);
        let b = s(&[(1, 2, 1)]);
        assert_eq!(&a + &b, s(&[(0, 1, 1), (1, 3, 1)]));
        // p + 0 = p
        assert_eq!(&a + &Scalar::zero(), a);
        // L + (-L) = 0 with an empty map
        let l = Scalar::lambda();
        let sum = &l + &-&l;
        assert!(sum.is_zero());
        assert_eq!(sum.coeffs.len(), 0);
    }

    #[test]
    fn mul_examples() {
        let l = Scalar::lambda();
        assert_eq!(&l * &l, Scalar::lambda_pow(2));
        // (1+L)(1-L) = 1 - L^2
        let a = s(&[(0, 1, 1), (1, 1, 1)]);
        let b = s(&[(0, 1, 1), (1, -1, 1)]);
        assert_eq!(&a * &b, s(&[(0, 1, 1), (2, -1, 1)]));
        assert!((&a * &Scalar::zero()).is_zero());
    }

    #[test]
    fn eval_examples() {
        let p = s(&[(0, 1, 1), (1, 3, 1)]);
        assert_eq!(p.eval_at(&Rational::from_int(2)), Rational::from_int(7));
        assert_eq!(Scalar::zero().eval_at(&Rational::new(5, 3)), Rational::zero());
        assert_eq!(
            Scalar::lambda_pow(2).eval_at(&Rational::new(1, 2)),
            Rational::new(1, 4)
        );
    }

    #[test]
    fn display_form() {
        assert_eq!(s(&[(0, 3, 2), (1, 2, 1), (2, 1, 1)]).to_string(), "3/2 + 2*L + L^2");
        assert_eq!(s(&[(0, 1, 1), (1, -2, 1)]).to_string(), "1 - 2*L");
        assert_eq!(Scalar::zero().to_string(), "0");
        assert_eq!(s(&[(2, -1, 1)]).to_string(), "-L^2");
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(6, 3), Rational::from_int(20));
        assert_eq!(binomial(4, 0), Rational::one());
        assert_eq!(binomial(3, 5), Rational::zero());
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-30i64..30, 1i64..10).prop_map(|(n, d)| Rational::new(n, d))
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        proptest::collection::vec((0u32..4, arb_rational()), 0..4).prop_map(|ts| {
            let mut acc = Scalar::zero();
            for (deg, r) in ts {
                acc = &acc + &Scalar::term(deg, r);
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &Scalar::one(), a.clone());
            prop_assert_eq!(&a + &Scalar::zero(), a.clone());
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn eval_is_ring_hom(a in arb_scalar(), b in arb_scalar(), q in arb_rational()) {
            prop_assert_eq!((&a * &b).eval_at(&q), &a.eval_at(&q) * &b.eval_at(&q));
            prop_assert_eq!((&a + &b).eval_at(&q), &a.eval_at(&q) + &b.eval_at(&q));
        }
    }
}
