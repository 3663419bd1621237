//! Sparse polynomials in `g2`, `g3` with exact rational coefficients.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent pair `(e2, e3)` of the monomial `g2^e2 g3^e3`.
pub type Monomial = (u32, u32);

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Always canonical: no zero coefficients stored, and `BigRational` keeps
/// fractions reduced with positive denominators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivariatePoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: BigRational, e2: u32, e3: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((e2, e3), c);
        p
    }

    pub fn g2() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn g3() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value if this polynomial has degree 0.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn coefficient(&self, e2: u32, e3: u32) -> BigRational {
        self.terms.get(&(e2, e3)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &BigRational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Multiplies by `g2^e2 g3^e3`.
    pub fn shift(&self, e2: u32, e3: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), v)| ((a + e2, b + e3), v.clone()))
                .collect(),
        }
    }

    pub fn d_g2(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), v) in &self.terms {
            if a > 0 {
                out.add_term((a - 1, b), v * BigInt::from(a));
            }
        }
        out
    }

    pub fn d_g3(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), v) in &self.terms {
            if b > 0 {
                out.add_term((a, b - 1), v * BigInt::from(b));
            }
        }
        out
    }

    /// Substitutes rational values for `g2`, `g3`.
    pub fn evaluate(&self, g2: &BigRational, g3: &BigRational) -> BigRational {
        self.terms
            .iter()
            .map(|(&(a, b), v)| v * num_traits::pow(g2.clone(), a as usize) * num_traits::pow(g3.clone(), b as usize))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&BivariatePoly> for BivariatePoly {
    fn add_assign(&mut self, rhs: &BivariatePoly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        BivariatePoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

/// Graded-lex order, highest total degree first, ties by larger `g2` power.
/// Coefficients print as `p/q` (or `p`), e.g. `-1/240*g2 + 1/3*g2^2*g3`.
impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(&(a, b), _)| Reverse((a + b, a)));
        for (n, (&(a, b), c)) in terms.into_iter().enumerate() {
            let mag = c.abs();
            match (n, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{mag}")?;
            for (name, e) in [("g2", a), ("g3", b)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    e => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}
