//! Truncated Laurent series in `z` with `BivariatePoly` coefficients.
//!
//! A series knows every coefficient below its `order`; powers at or above it
//! are unknown and never reported. `order == None` marks an exact series
//! (a Laurent polynomial, including the zero series).

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::BivariatePoly;

/// `None` is +infinity.
fn min_order(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_order(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    lowest_power: i64,
    coeffs: Vec<BivariatePoly>,
    order: Option<i64>,
}

impl PartialEq for TruncatedSeries {
    /// Same precision and the same coefficient at every known power.
    fn eq(&self, other: &Self) -> bool {
        if self.order != other.order {
            return false;
        }
        let lo = self.lowest_power.min(other.lowest_power);
        let hi = self.stored_end().max(other.stored_end());
        (lo..hi).all(|k| self.poly_at(k) == other.poly_at(k))
    }
}

impl TruncatedSeries {
    /// Builds a series from consecutive coefficients starting at `lowest_power`.
    /// Coefficients at or beyond `order` are dropped.
    pub fn new(lowest_power: i64, coeffs: Vec<BivariatePoly>, order: Option<i64>) -> Self {
        let mut s = Self {
            lowest_power,
            coeffs,
            order,
        };
        s.normalize();
        s
    }

    /// Builds a series from sparse `(power, coefficient)` pairs.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (i64, BivariatePoly)>,
        order: Option<i64>,
    ) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|(k, _)| *k).min() else {
            return Self::zero_to(order);
        };
        let hi = terms.iter().map(|(k, _)| *k).max().unwrap_or(lo);
        let mut coeffs = vec![BivariatePoly::zero(); (hi - lo + 1) as usize];
        for (k, p) in terms {
            coeffs[(k - lo) as usize] += &p;
        }
        Self::new(lo, coeffs, order)
    }

    /// The exact zero series.
    pub fn zero() -> Self {
        Self::zero_to(None)
    }

    /// Zero through `order`.
    pub fn zero_to(order: Option<i64>) -> Self {
        Self {
            lowest_power: 0,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn one() -> Self {
        Self::monomial(BivariatePoly::one(), 0)
    }

    /// Exact `c * z^k`.
    pub fn monomial(c: BivariatePoly, k: i64) -> Self {
        Self::new(k, vec![c], None)
    }

    /// Exact `z`.
    pub fn z() -> Self {
        Self::monomial(BivariatePoly::one(), 1)
    }

    fn normalize(&mut self) {
        if let Some(order) = self.order {
            let keep = (order - self.lowest_power).clamp(0, self.coeffs.len() as i64);
            self.coeffs.truncate(keep as usize);
        }
        if self.order.is_none() {
            while self.coeffs.last().is_some_and(BivariatePoly::is_zero) {
                self.coeffs.pop();
            }
            let lead = self.coeffs.iter().take_while(|p| p.is_zero()).count();
            if lead > 0 {
                self.coeffs.drain(..lead);
                self.lowest_power += lead as i64;
            }
        }
        if self.coeffs.is_empty() && self.order.is_none() {
            self.lowest_power = 0;
        }
    }

    fn stored_end(&self) -> i64 {
        self.lowest_power + self.coeffs.len() as i64
    }

    /// Stored coefficient, zero outside the stored window (ignores `order`).
    fn poly_at(&self, k: i64) -> BivariatePoly {
        if k < self.lowest_power || k >= self.stored_end() {
            BivariatePoly::zero()
        } else {
            self.coeffs[(k - self.lowest_power) as usize].clone()
        }
    }

    fn poly_ref(&self, k: i64) -> Option<&BivariatePoly> {
        if k < self.lowest_power || k >= self.stored_end() {
            None
        } else {
            Some(&self.coeffs[(k - self.lowest_power) as usize])
        }
    }

    /// Precision: every power below it is exact. `None` means exact series.
    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn lowest_power(&self) -> i64 {
        self.lowest_power
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// Coefficient of `z^k`, or `None` if `k` is at or beyond the precision.
    pub fn coefficient(&self, k: i64) -> Option<BivariatePoly> {
        match self.order {
            Some(o) if k >= o => None,
            _ => Some(self.poly_at(k)),
        }
    }

    /// Known nonzero terms in increasing power.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BivariatePoly)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(move |(n, p)| (self.lowest_power + n as i64, p))
    }

    /// Power of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms().next().map(|(k, _)| k)
    }

    /// Power below which the series is known to vanish.
    fn effective_valuation(&self) -> Option<i64> {
        self.valuation().or(self.order)
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(BivariatePoly::is_zero)
    }

    /// Lowers the precision to `order` (never raises it).
    pub fn truncate(&self, order: i64) -> Self {
        Self::new(
            self.lowest_power,
            self.coeffs.clone(),
            min_order(self.order, Some(order)),
        )
    }

    pub fn map_coeffs(&self, f: impl Fn(&BivariatePoly) -> BivariatePoly) -> Self {
        Self::new(
            self.lowest_power,
            self.coeffs.iter().map(f).collect(),
            self.order,
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map_coeffs(|p| p.scale(c))
    }

    /// Multiplies every coefficient by a polynomial in `g2`, `g3`.
    pub fn scale_poly(&self, c: &BivariatePoly) -> Self {
        self.map_coeffs(|p| p * c)
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(
            self.lowest_power + k,
            self.coeffs.clone(),
            self.order.map(|o| o + k),
        )
    }

    /// `d/dz`; precision drops by one.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, p)| p.scale(&BigRational::from_integer(BigInt::from(self.lowest_power + n as i64))))
            .collect();
        Self::new(self.lowest_power - 1, coeffs, self.order.map(|o| o - 1))
    }

    /// Antiderivative with zero constant term; precision rises by one.
    pub fn integral(&self) -> Result<Self> {
        if self.poly_ref(-1).is_some_and(|p| !p.is_zero()) {
            return Err(Error::Series("cannot integrate a z^-1 term".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let k = self.lowest_power + n as i64;
                if k == -1 {
                    BivariatePoly::zero()
                } else {
                    p.scale(&BigRational::new(BigInt::one(), BigInt::from(k + 1)))
                }
            })
            .collect();
        Ok(Self::new(self.lowest_power + 1, coeffs, self.order.map(|o| o + 1)))
    }

    /// Dense known coefficients `c_0 .. c_{order-1}` of a power series with no
    /// negative-power terms.
    fn power_series_window(&self, op: &str) -> Result<(Vec<BivariatePoly>, i64)> {
        let order = self
            .order
            .ok_or_else(|| Error::InsufficientPrecision(format!("{op} needs a finite precision")))?;
        if self.terms().any(|(k, _)| k < 0) {
            return Err(Error::Series(format!("{op} of a series with negative powers")));
        }
        let len = order.max(0);
        Ok(((0..len).map(|k| self.poly_at(k)).collect(), len))
    }

    /// `exp(f)` for `f` with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        let (f, len) = self.power_series_window("exp")?;
        if f.first().is_some_and(|c| !c.is_zero()) {
            return Err(Error::Series("exp needs a zero constant term".into()));
        }
        // n E_n = sum_{k=1..n} k f_k E_{n-k}
        let mut e: Vec<BivariatePoly> = Vec::with_capacity(len as usize);
        for n in 0..len as usize {
            if n == 0 {
                e.push(BivariatePoly::one());
                continue;
            }
            let mut acc = BivariatePoly::zero();
            for k in 1..=n {
                if f[k].is_zero() || e[n - k].is_zero() {
                    continue;
                }
                acc += &(&f[k] * &e[n - k]).scale(&BigRational::from_integer(BigInt::from(k)));
            }
            e.push(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(n))));
        }
        Ok(Self::new(0, e, self.order))
    }

    /// `log(1 + f)` for `f` with zero constant term.
    pub fn log1p(&self) -> Result<Self> {
        let (f, len) = self.power_series_window("log1p")?;
        if f.first().is_some_and(|c| !c.is_zero()) {
            return Err(Error::Series("log1p needs a zero constant term".into()));
        }
        // n L_n = n f_n - sum_{k=1..n-1} k L_k f_{n-k}
        let mut l: Vec<BivariatePoly> = vec![BivariatePoly::zero(); len as usize];
        for n in 1..len as usize {
            let mut acc = f[n].scale(&BigRational::from_integer(BigInt::from(n)));
            for k in 1..n {
                if l[k].is_zero() || f[n - k].is_zero() {
                    continue;
                }
                acc = &acc - &(&l[k] * &f[n - k]).scale(&BigRational::from_integer(BigInt::from(k)));
            }
            l[n] = acc.scale(&BigRational::new(BigInt::one(), BigInt::from(n)));
        }
        Ok(Self::new(0, l, self.order))
    }

    /// `1/f`, for `f` whose leading coefficient is a nonzero rational constant.
    pub fn recip(&self) -> Result<Self> {
        let order = self
            .order
            .ok_or_else(|| Error::InsufficientPrecision("recip needs a finite precision".into()))?;
        let v = self
            .valuation()
            .ok_or_else(|| Error::Series("reciprocal of zero".into()))?;
        let lead = self
            .poly_at(v)
            .as_constant()
            .ok_or_else(|| Error::Series("leading coefficient is not a rational constant".into()))?;
        let inv_lead = lead.recip();
        let len = (order - v) as usize;
        let u: Vec<BivariatePoly> = (0..len as i64).map(|k| self.poly_at(v + k)).collect();
        // r_0 = 1/c, r_n = -(1/c) sum_{k=1..n} u_k r_{n-k}
        let mut r: Vec<BivariatePoly> = Vec::with_capacity(len);
        for n in 0..len {
            if n == 0 {
                r.push(BivariatePoly::constant(inv_lead.clone()));
                continue;
            }
            let mut acc = BivariatePoly::zero();
            for k in 1..=n {
                if !u[k].is_zero() && !r[n - k].is_zero() {
                    acc += &(&u[k] * &r[n - k]);
                }
            }
            r.push(acc.scale(&-inv_lead.clone()));
        }
        Ok(Self::new(-v, r, Some(order - 2 * v)))
    }

    /// One line per power from the lowest stored power up to the precision:
    /// `z^<k>: <polynomial>`.
    pub fn dump(&self) -> String {
        let end = self.order.unwrap_or_else(|| self.stored_end());
        let mut out = String::new();
        for k in self.lowest_power..end {
            let _ = writeln!(out, "z^{k}: {}", self.poly_at(k));
        }
        out
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = min_order(self.order, rhs.order);
        let lo = self.lowest_power.min(rhs.lowest_power);
        let hi = self.stored_end().max(rhs.stored_end());
        let coeffs = (lo..hi).map(|k| &self.poly_at(k) + &rhs.poly_at(k)).collect();
        TruncatedSeries::new(lo, coeffs, order)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.map_coeffs(|p| -p)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    /// Precision of `f g` is `min(ord f + val g, ord g + val f)`.
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = min_order(
            add_order(self.order, rhs.effective_valuation()),
            add_order(rhs.order, self.effective_valuation()),
        );
        // Both exact and one of them zero gives (None + None) -> exact zero.
        let (Some(_), Some(_)) = (self.valuation(), rhs.valuation()) else {
            return TruncatedSeries::zero_to(order);
        };
        let lo = self.lowest_power + rhs.lowest_power;
        let mut hi = self.stored_end() + rhs.stored_end() - 1;
        if let Some(o) = order {
            hi = hi.min(o);
        }
        let mut coeffs = vec![BivariatePoly::zero(); (hi - lo).max(0) as usize];
        for (a, pa) in self.terms() {
            for (b, pb) in rhs.terms() {
                let k = a + b;
                if k >= hi {
                    break;
                }
                coeffs[(k - lo) as usize] += &(pa * pb);
            }
        }
        TruncatedSeries::new(lo, coeffs, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;
    use proptest::prelude::*;

    fn c(n: i64, d: i64) -> BivariatePoly {
        BivariatePoly::constant(rational(n, d))
    }

    #[test]
    fn precision_rules() {
        // (z + O(z^5)) * (z^-2 + O(z^3)): min(5 - 2, 3 + 1) = 3
        let f = TruncatedSeries::new(1, vec![c(1, 1)], Some(5));
        let g = TruncatedSeries::new(-2, vec![c(1, 1)], Some(3));
        let h = &f * &g;
        assert_eq!(h.order(), Some(3));
        assert_eq!(h.coefficient(-1), Some(c(1, 1)));
        assert_eq!(h.coefficient(3), None);
        assert_eq!((&f + &g).order(), Some(3));
        assert_eq!(f.derivative().order(), Some(4));
        assert_eq!(f.integral().unwrap().order(), Some(6));
    }

    #[test]
    fn zero_series_conventions() {
        let zero = TruncatedSeries::zero();
        assert!(zero.is_exact());
        let f = TruncatedSeries::new(0, vec![c(1, 1), c(2, 1)], Some(4));
        let p = &zero * &f;
        assert!(p.is_exact() && p.is_zero());
        // Zero known through z^3 times z: known zero through z^4.
        let z4 = TruncatedSeries::zero_to(Some(4));
        assert_eq!((&z4 * &TruncatedSeries::z()).order(), Some(5));
        assert_eq!((&z4 + &zero).order(), Some(4));
    }

    #[test]
    fn exp_of_z() {
        let e = TruncatedSeries::z().truncate(6).exp().unwrap();
        let expected = TruncatedSeries::new(
            0,
            vec![c(1, 1), c(1, 1), c(1, 2), c(1, 6), c(1, 24), c(1, 120)],
            Some(6),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn exp_rejects_bad_input() {
        assert!(matches!(TruncatedSeries::z().exp(), Err(Error::InsufficientPrecision(_))));
        assert!(TruncatedSeries::one().truncate(4).exp().is_err());
        let laurent = TruncatedSeries::monomial(BivariatePoly::one(), -1).truncate(3);
        assert!(laurent.exp().is_err());
    }

    #[test]
    fn integral_rejects_residue() {
        let f = TruncatedSeries::monomial(BivariatePoly::g2(), -1);
        assert!(f.integral().is_err());
        let g = TruncatedSeries::monomial(BivariatePoly::g2(), -2);
        assert_eq!(
            g.integral().unwrap(),
            TruncatedSeries::monomial(-&BivariatePoly::g2(), -1)
        );
    }

    #[test]
    fn derivative_integral_roundtrip() {
        let f = TruncatedSeries::new(-3, vec![c(1, 1), c(5, 7), c(0, 1), BivariatePoly::g3()], Some(9));
        assert_eq!(f.integral().unwrap().derivative(), f);
    }

    #[test]
    fn reciprocal() {
        let f = TruncatedSeries::new(
            1,
            vec![c(2, 1), BivariatePoly::g2(), BivariatePoly::g3()],
            Some(10),
        );
        let r = f.recip().unwrap();
        assert_eq!(r.order(), Some(8));
        let prod = &f * &r;
        assert_eq!(prod.order(), Some(9));
        assert_eq!(prod, TruncatedSeries::one().truncate(9));
    }

    #[test]
    fn dump_format() {
        let f = TruncatedSeries::new(
            -1,
            vec![c(1, 1), BivariatePoly::zero(), BivariatePoly::monomial(rational(-1, 3), 1, 0)],
            Some(3),
        );
        assert_eq!(f.dump(), "z^-1: 1\nz^0: 0\nz^1: -1/3*g2\nz^2: 0\n");
    }

    fn arb_series() -> impl Strategy<Value = TruncatedSeries> {
        let coeff = prop::collection::vec(((0u32..3, 0u32..3), -9i64..9, 1i64..5), 0..3).prop_map(|ts| {
            let mut p = BivariatePoly::zero();
            for ((a, b), n, d) in ts {
                p += &BivariatePoly::monomial(rational(n, d), a, b);
            }
            p
        });
        (prop::collection::vec(coeff, 1..6), 3i64..8)
            .prop_map(|(cs, order)| TruncatedSeries::new(1, cs, Some(order)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exp_inverts_log1p(f in arb_series()) {
            let back = f.log1p().unwrap().exp().unwrap();
            let one_plus_f = &TruncatedSeries::one() + &f;
            prop_assert_eq!(back, one_plus_f);
        }

        #[test]
        fn exp_is_multiplicative(f in arb_series(), g in arb_series()) {
            let lhs = (&f + &g).exp().unwrap();
            let rhs = &f.exp().unwrap() * &g.exp().unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn product_rule(f in arb_series(), g in arb_series()) {
            let lhs = (&f * &g).derivative();
            let rhs = &(&f.derivative() * &g) + &(&f * &g.derivative());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
