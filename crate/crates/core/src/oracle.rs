//! Independent checks of the coefficient table through exact series
//! arithmetic.
//!
//! Two constructions of `sigma(z)` are compared: one assembled from the
//! coefficient table, one reconstructed from the Laurent expansion of `P(z)`
//! (Weierstrass p) via `sigma = z exp(-double antiderivative of (P - z^-2))`.
//! The second path never touches the recursion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::engine::{compute_rectangle, CoeffTable};
use crate::error::{Error, Result};
use crate::poly::{rational, BivariatePoly};
use crate::series::TruncatedSeries;

fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Rectangle whose closure holds every `a[i,j]` with `4i + 6j + 1 < order`.
pub fn required_bounds(order: i64) -> (u32, u32) {
    let top = (order - 2).max(0) as u32;
    (top / 4, top / 6)
}

/// `sigma(z)` through `z^(order-1)` from the table:
/// the `z^(4i+6j+1)` coefficient is `a[i,j] 2^(j-i) / (4i+6j+1)! g2^i g3^j`.
pub fn sigma_from_table(table: &CoeffTable, order: i64) -> Result<TruncatedSeries> {
    let mut terms = Vec::new();
    for j in 0.. {
        if 6 * j + 1 >= order {
            break;
        }
        for i in 0.. {
            let z_power = 4 * i + 6 * j + 1;
            if z_power >= order {
                break;
            }
            let a = table.coefficient(i, j)?;
            let scale = BigRational::new(
                BigInt::one() << j as usize,
                (BigInt::one() << i as usize) * factorial(z_power as u32),
            );
            let c = BigRational::from_integer(a) * scale;
            terms.push((z_power, BivariatePoly::monomial(c, i as u32, j as u32)));
        }
    }
    Ok(TruncatedSeries::from_terms(terms, Some(order)))
}

/// `Q0 = 4 g2 d/dg2 + 6 g3 d/dg3 - z d/dz + 1`.
pub fn apply_q0(f: &TruncatedSeries) -> TruncatedSeries {
    let grading = f.map_coeffs(|p| {
        let a = (&BivariatePoly::g2() * &p.d_g2()).scale(&rational(4, 1));
        let b = (&BivariatePoly::g3() * &p.d_g3()).scale(&rational(6, 1));
        &a + &b
    });
    let euler = f.derivative().shift(1);
    &(&grading - &euler) + f
}

/// `Q2 = 6 g3 d/dg2 + (1/3) g2^2 d/dg3 - (1/2) d^2/dz^2 - (1/24) g2 z^2`.
///
/// The result is two orders less precise than `f`.
pub fn apply_q2(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if let Some(order) = f.order() {
        if order < 3 {
            return Err(Error::InsufficientPrecision(format!(
                "Q2 needs order >= 3, got {order}"
            )));
        }
    }
    let g2 = BivariatePoly::g2();
    let g2_sq = &g2 * &g2;
    let coefficient_part = f.map_coeffs(|p| {
        let a = (&BivariatePoly::g3() * &p.d_g2()).scale(&rational(6, 1));
        let b = (&g2_sq * &p.d_g3()).scale(&rational(1, 3));
        &a + &b
    });
    let second = f.derivative().derivative().scale(&rational(1, 2));
    let potential = f.shift(2).scale_poly(&g2.scale(&rational(1, 24)));
    Ok(&(&coefficient_part - &second) - &potential)
}

/// `c_2, ..., c_n` with `P(z) = z^-2 + sum_{k>=2} c_k z^(2k-2)`.
///
/// `c_2 = g2/20`, `c_3 = g3/28`, and for `k >= 4`
/// `c_k = 3 / ((2k+1)(k-3)) * sum_{m=2}^{k-2} c_m c_{k-m}`.
pub fn pe_coefficients(n: usize) -> Vec<BivariatePoly> {
    let mut c: Vec<BivariatePoly> = vec![BivariatePoly::zero(); n.max(1) + 1];
    for k in 2..=n {
        c[k] = match k {
            2 => BivariatePoly::monomial(rational(1, 20), 1, 0),
            3 => BivariatePoly::monomial(rational(1, 28), 0, 1),
            _ => {
                let mut acc = BivariatePoly::zero();
                for m in 2..=k - 2 {
                    acc += &(&c[m] * &c[k - m]);
                }
                let k = k as i64;
                acc.scale(&rational(3, (2 * k + 1) * (k - 3)))
            }
        };
    }
    c.drain(..2.min(c.len()));
    c
}

/// Laurent expansion of `P(z)` known through `z^(order-1)`.
pub fn pe_laurent(order: i64) -> Result<TruncatedSeries> {
    if order < -2 {
        return Err(Error::InsufficientPrecision(format!(
            "P(z) starts at z^-2, order {order} is meaningless"
        )));
    }
    // 2k - 2 < order
    let kmax = ((order + 1) / 2).max(1) as usize;
    let mut terms = vec![(-2, BivariatePoly::one())];
    terms.extend(
        pe_coefficients(kmax)
            .into_iter()
            .enumerate()
            .map(|(n, c)| (2 * (n as i64 + 2) - 2, c)),
    );
    Ok(TruncatedSeries::from_terms(terms, Some(order)))
}

/// `sigma(z)` through `z^(order-1)` from `P(z)` alone.
///
/// `zeta = 1/z - antiderivative(P - z^-2)`, `log(sigma/z) = antiderivative(zeta - 1/z)`,
/// integration constants fixed by `sigma(0) = 0`, `sigma'(0) = 1`.
pub fn sigma_from_pe(order: i64) -> Result<TruncatedSeries> {
    if order < 1 {
        return Err(Error::InsufficientPrecision(format!(
            "sigma_from_pe needs a positive order, got {order}"
        )));
    }
    let pe = pe_laurent(order - 3)?;
    let regular = &pe - &TruncatedSeries::monomial(BivariatePoly::one(), -2);
    let zeta_regular = -&regular.integral()?;
    let log_sigma_over_z = zeta_regular.integral()?;
    Ok(log_sigma_over_z.exp()?.shift(1))
}

/// `P'^2 - 4 P^3 + g2 P + g3`, known through `z^(order-1)`.
pub fn weierstrass_residual(order: i64) -> Result<TruncatedSeries> {
    let pe = pe_laurent(order + 4)?;
    let dpe = pe.derivative();
    let pe_cubed = &(&pe * &pe) * &pe;
    let lhs = &dpe * &dpe;
    let rhs = &(&pe_cubed.scale(&rational(4, 1)) - &pe.scale_poly(&BivariatePoly::g2()))
        - &TruncatedSeries::monomial(BivariatePoly::g3(), 0);
    Ok(&lhs - &rhs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
}

/// All series oracles at a given precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub order: i64,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs Q0 and Q2 annihilation, the cubic identity, and the
/// table-versus-P(z) equivalence at `order`.
pub fn run_oracle_suite(order: i64, workers: usize) -> Result<OracleReport> {
    if order < 3 {
        return Err(Error::Config(format!("oracle order must be at least 3, got {order}")));
    }
    let (mi, mj) = required_bounds(order);
    let table = compute_rectangle(mi, mj, workers, None)?;
    let sigma = sigma_from_table(&table, order)?;
    let q2 = apply_q2(&sigma)?;
    let checks = vec![
        OracleCheck {
            name: "q0_annihilation".into(),
            passed: apply_q0(&sigma).is_zero(),
        },
        OracleCheck {
            name: "q2_annihilation".into(),
            passed: q2.order() == Some(order - 2) && q2.is_zero(),
        },
        OracleCheck {
            name: "weierstrass_identity".into(),
            passed: weierstrass_residual(order)?.is_zero(),
        },
        OracleCheck {
            name: "pe_reconstruction_equivalence".into(),
            passed: sigma_from_pe(order)? == sigma,
        },
    ];
    Ok(OracleReport { order, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(n: i64, d: i64, e2: u32, e3: u32) -> BivariatePoly {
        BivariatePoly::monomial(rational(n, d), e2, e3)
    }

    fn table_for(order: i64) -> CoeffTable {
        let (mi, mj) = required_bounds(order);
        compute_rectangle(mi, mj, 1, None).unwrap()
    }

    #[test]
    fn required_bounds_cover_order() {
        for order in 1..80 {
            let (mi, mj) = required_bounds(order);
            let bound = 2 * mi + 3 * mj;
            for j in 0..=order / 6 {
                for i in 0..=order / 4 {
                    if 4 * i + 6 * j + 1 < order {
                        assert!(2 * i as u32 + 3 * j as u32 <= bound, "order {order}");
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_head_from_table() {
        let t = table_for(8);
        let s6 = sigma_from_table(&t, 6).unwrap();
        let expected6 = TruncatedSeries::from_terms(
            [(1, BivariatePoly::one()), (5, mono(-1, 240, 1, 0))],
            Some(6),
        );
        assert_eq!(s6, expected6);

        let s2 = sigma_from_table(&t, 2).unwrap();
        assert_eq!(s2, TruncatedSeries::z().truncate(2));

        let s8 = sigma_from_table(&t, 8).unwrap();
        assert_eq!(s8.coefficient(7), Some(mono(-1, 840, 0, 1)));
        assert_eq!(s8.truncate(6), expected6);
    }

    #[test]
    fn sigma_from_table_needs_entries() {
        let t = compute_rectangle(0, 0, 1, None).unwrap();
        assert!(matches!(
            sigma_from_table(&t, 20),
            Err(Error::NotComputed { .. })
        ));
    }

    #[test]
    fn q0_examples() {
        assert!(apply_q0(&TruncatedSeries::z()).is_zero());
        let g2z = TruncatedSeries::monomial(BivariatePoly::g2(), 1);
        assert_eq!(
            apply_q0(&g2z),
            TruncatedSeries::monomial(mono(4, 1, 1, 0), 1)
        );
        let s = sigma_from_table(&table_for(12), 12).unwrap();
        let r = apply_q0(&s);
        assert!(r.is_zero());
        assert_eq!(r.order(), Some(12));
    }

    #[test]
    fn q2_examples() {
        let r = apply_q2(&TruncatedSeries::z()).unwrap();
        assert_eq!(r, TruncatedSeries::monomial(mono(-1, 24, 1, 0), 3));

        let s8 = sigma_from_table(&table_for(8), 8).unwrap();
        let r = apply_q2(&s8).unwrap();
        assert_eq!(r.order(), Some(6));
        assert!(r.is_zero());

        let s30 = sigma_from_table(&table_for(30), 30).unwrap();
        let r = apply_q2(&s30).unwrap();
        assert_eq!(r.order(), Some(28));
        assert!(r.is_zero());

        assert!(matches!(
            apply_q2(&TruncatedSeries::z().truncate(2)),
            Err(Error::InsufficientPrecision(_))
        ));
    }

    #[test]
    fn pe_head() {
        let c = pe_coefficients(4);
        assert_eq!(c[0], mono(1, 20, 1, 0));
        assert_eq!(c[1], mono(1, 28, 0, 1));
        assert_eq!(c[2], mono(1, 1200, 2, 0));
        let pe = pe_laurent(7).unwrap();
        assert_eq!(pe.coefficient(-2), Some(BivariatePoly::one()));
        assert_eq!(pe.coefficient(0), Some(BivariatePoly::zero()));
        assert_eq!(pe.coefficient(2), Some(mono(1, 20, 1, 0)));
        assert_eq!(pe.coefficient(4), Some(mono(1, 28, 0, 1)));
        assert_eq!(pe.coefficient(6), Some(mono(1, 1200, 2, 0)));
        assert_eq!(pe.coefficient(7), None);
        assert!(pe_laurent(-3).is_err());
        assert!(pe_laurent(-2).unwrap().is_zero());
    }

    #[test]
    fn weierstrass_residual_vanishes() {
        let r = weierstrass_residual(21).unwrap();
        assert_eq!(r.order(), Some(21));
        assert_eq!(r.coefficient(-6), Some(BivariatePoly::zero()));
        assert_eq!(r.coefficient(0), Some(BivariatePoly::zero()));
        assert!(r.is_zero());
    }

    #[test]
    fn corrupted_pe_leaves_residual() {
        // Replacing c_3 with g3/27 must break the z^0 coefficient.
        let pe = pe_laurent(12).unwrap();
        let bumped = &pe + &TruncatedSeries::monomial(
            &mono(1, 27, 0, 1) - &mono(1, 28, 0, 1),
            4,
        );
        let dpe = bumped.derivative();
        let r = &(&(&dpe * &dpe) - &(&(&bumped * &bumped) * &bumped).scale(&rational(4, 1)))
            + &(&bumped.scale_poly(&BivariatePoly::g2())
                + &TruncatedSeries::monomial(BivariatePoly::g3(), 0));
        assert!(!r.coefficient(0).unwrap().is_zero());
    }

    #[test]
    fn sigma_from_pe_head() {
        let s = sigma_from_pe(12).unwrap();
        assert_eq!(s.order(), Some(12));
        assert_eq!(s.coefficient(1), Some(BivariatePoly::one()));
        assert_eq!(s.coefficient(5), Some(mono(-1, 240, 1, 0)));
        assert_eq!(s.coefficient(7), Some(mono(-1, 840, 0, 1)));
        assert!(sigma_from_pe(0).is_err());
        assert_eq!(sigma_from_pe(1).unwrap().order(), Some(1));
    }

    #[test]
    fn oracle_equivalence_small() {
        for order in [2, 5, 9, 16, 23] {
            assert_eq!(
                sigma_from_pe(order).unwrap(),
                sigma_from_table(&table_for(order), order).unwrap(),
                "order {order}"
            );
        }
    }

    #[test]
    fn suite_passes() {
        let report = run_oracle_suite(16, 2).unwrap();
        assert_eq!(report.checks.len(), 4);
        assert!(report.passed(), "{report:?}");
        assert!(run_oracle_suite(2, 1).is_err());
    }
}
