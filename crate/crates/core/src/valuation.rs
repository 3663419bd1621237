//! p-adic valuations of the coefficients and of the normalizing integers
//!
//! ```text
//! b[i,j] = (4i+6j+1)! / (2^(3i+4j) 3^(i+2j) i! j!)
//! ```
//!
//! together with the conjectured relations
//! `v2(a[i,j]) = v2(b[i,j])` and `v3(a[i,j]) = j + v3(b[i,j])`.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{CoeffTable, Index};
use crate::error::{Error, Result};

/// Deterministic trial division; `p` is always small here.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `v_p(n!)` by Legendre's formula.
pub fn nu_factorial(n: u64, p: u64) -> Result<u64> {
    require_prime(p)?;
    let mut total = 0;
    let mut q = n;
    while q > 0 {
        q /= p;
        total += q;
    }
    Ok(total)
}

/// Largest `k` with `p^k | x`.
pub fn nu(x: &BigInt, p: u64) -> Result<u64> {
    require_prime(p)?;
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if p == 2 {
        return Ok(x.trailing_zeros().unwrap_or(0));
    }
    let mut m = x.magnitude().clone();
    let mut count = 0;
    // Strip the largest power of p fitting in a u64 first, then single factors.
    let (chunk, chunk_exp) = {
        let (mut c, mut e) = (p, 1u64);
        while let Some(next) = c.checked_mul(p) {
            c = next;
            e += 1;
        }
        (BigUint::from(c), e)
    };
    loop {
        let (q, r) = m.div_rem(&chunk);
        if !r.is_zero() {
            break;
        }
        m = q;
        count += chunk_exp;
    }
    let p_big = BigUint::from(p);
    loop {
        let (q, r) = m.div_rem(&p_big);
        if !r.is_zero() {
            break;
        }
        m = q;
        count += 1;
    }
    Ok(count)
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `b[i,j]` materialized; fails if the division is inexact.
pub fn b_value(i: u32, j: u32) -> Result<BigInt> {
    let (i64_, j64) = (u64::from(i), u64::from(j));
    let numerator = factorial(4 * i64_ + 6 * j64 + 1);
    let denominator = (BigUint::one() << (3 * i64_ + 4 * j64))
        * BigUint::from(3u32).pow(i + 2 * j)
        * factorial(i64_)
        * factorial(j64);
    let (q, r) = numerator.div_rem(&denominator);
    if !r.is_zero() {
        return Err(Error::IntegralityViolation { i, j });
    }
    Ok(BigInt::from(q))
}

/// `v_p(b[i,j])` from Legendre sums, without building `b[i,j]`.
pub fn nu_b(i: u32, j: u32, p: u64) -> Result<i64> {
    let (iu, ju) = (u64::from(i), u64::from(j));
    let top = nu_factorial(4 * iu + 6 * ju + 1, p)? as i64;
    let mut v = top - nu_factorial(iu, p)? as i64 - nu_factorial(ju, p)? as i64;
    match p {
        2 => v -= (3 * iu + 4 * ju) as i64,
        3 => v -= (iu + 2 * ju) as i64,
        _ => {}
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Match,
    Mismatch2,
    Mismatch3,
    MismatchBoth,
    ZeroCoefficient,
}

/// Actual versus predicted 2- and 3-adic valuations at one index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationReport {
    pub i: u32,
    pub j: u32,
    /// `None` when the coefficient is zero.
    pub nu2_actual: Option<u64>,
    pub nu2_predicted: i64,
    pub nu3_actual: Option<u64>,
    pub nu3_predicted: i64,
    pub status: Status,
}

impl ValuationReport {
    pub fn index(&self) -> Index {
        Index::new(self.i, self.j)
    }
}

pub fn hypothesis_check(table: &CoeffTable, idx: Index) -> Result<ValuationReport> {
    let a = table.coefficient(idx.i.into(), idx.j.into())?;
    let nu2_predicted = nu_b(idx.i, idx.j, 2)?;
    let nu3_predicted = i64::from(idx.j) + nu_b(idx.i, idx.j, 3)?;
    let (nu2_actual, nu3_actual, status) = if a.is_zero() {
        (None, None, Status::ZeroCoefficient)
    } else {
        let n2 = nu(&a, 2)?;
        let n3 = nu(&a, 3)?;
        let ok2 = n2 as i64 == nu2_predicted;
        let ok3 = n3 as i64 == nu3_predicted;
        let status = match (ok2, ok3) {
            (true, true) => Status::Match,
            (false, true) => Status::Mismatch2,
            (true, false) => Status::Mismatch3,
            (false, false) => Status::MismatchBoth,
        };
        (Some(n2), Some(n3), status)
    };
    Ok(ValuationReport {
        i: idx.i,
        j: idx.j,
        nu2_actual,
        nu2_predicted,
        nu3_actual,
        nu3_predicted,
        status,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_i: u32,
    pub max_j: u32,
}

/// Result of checking every index of a rectangle. Serializes to the JSON
/// verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub bounds: Bounds,
    pub total: usize,
    pub matches: usize,
    pub mismatches: Vec<ValuationReport>,
    pub elapsed_seconds: f64,
}

impl VerificationSummary {
    pub fn all_match(&self) -> bool {
        self.mismatches.is_empty() && self.matches == self.total
    }

    pub fn count(&self, status: Status) -> usize {
        match status {
            Status::Match => self.matches,
            s => self.mismatches.iter().filter(|r| r.status == s).count(),
        }
    }
}

pub fn verify_range(table: &CoeffTable, max_i: u32, max_j: u32) -> Result<VerificationSummary> {
    let started = Instant::now();
    let indices: Vec<Index> = (0..=max_j)
        .flat_map(|j| (0..=max_i).map(move |i| Index::new(i, j)))
        .collect();
    let reports = indices
        .par_iter()
        .map(|&idx| hypothesis_check(table, idx))
        .collect::<Result<Vec<_>>>()?;
    let total = reports.len();
    let mismatches: Vec<_> = reports
        .into_iter()
        .filter(|r| r.status != Status::Match)
        .collect();
    Ok(VerificationSummary {
        bounds: Bounds { max_i, max_j },
        total,
        matches: total - mismatches.len(),
        mismatches,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

/// `v_p(a[i,j]) - v_p(b[i,j])` for `j` in rows, `i` in columns. Zero
/// coefficients give `Err(ZeroValuation)` in their cell.
pub fn residual_report(
    table: &CoeffTable,
    p: u64,
    max_i: u32,
    max_j: u32,
) -> Result<Vec<Vec<Result<i64>>>> {
    require_prime(p)?;
    (0..=max_j)
        .map(|j| {
            (0..=max_i)
                .map(|i| {
                    let a = table.coefficient(i.into(), j.into())?;
                    let b = nu_b(i, j, p)?;
                    Ok(match nu(&a, p) {
                        Ok(v) => Ok(v as i64 - b),
                        Err(e) => Err(e),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}
