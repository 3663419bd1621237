//! Exact computation of the sigma-function coefficients `a[i,j]`.
//!
//! The coefficients satisfy
//!
//! ```text
//! 3 a[i,j] = 9 (i+1) a[i+1,j-1] + 16 (j+1) a[i-2,j+1]
//!          - (4i+6j-1)(2i+3j-1) a[i-1,j]
//! ```
//!
//! with `a[0,0] = 1` and `a[i,j] = 0` outside the quadrant. Every right-hand
//! index has weight `2i+3j` one or two less than the left-hand one, so the
//! table is filled one weight diagonal at a time. Entries of a diagonal only
//! read the two previous diagonals and can be computed in parallel.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};

/// Position `(i, j)` of a coefficient: exponent `i` of `g2 z^4 / 2` and
/// exponent `j` of `2 g3 z^6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index {
    pub i: u32,
    pub j: u32,
}

impl Index {
    pub const fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }

    /// `2i + 3j`, the evaluation order of the recursion.
    pub const fn weight(self) -> u32 {
        weight(self)
    }

    /// Power of `z` carrying this coefficient in `sigma(z)`: `4i + 6j + 1`.
    pub const fn z_degree(self) -> u32 {
        4 * self.i + 6 * self.j + 1
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

pub const fn weight(idx: Index) -> u32 {
    2 * idx.i + 3 * idx.j
}

/// All in-quadrant indices of weight `s`, ordered by increasing `i`.
pub fn diagonal(s: u32) -> impl Iterator<Item = Index> {
    (0..=s / 3)
        .rev()
        .filter(move |j| (s - 3 * j).is_multiple_of(2))
        .map(move |j| Index::new((s - 3 * j) / 2, j))
}

/// Exact coefficients over the dependency closure `2i + 3j <= 2 max_i + 3 max_j`
/// of the requested rectangle.
///
/// Storage is dense over the closure; absent entries are kept distinct from
/// zero values.
#[derive(Clone, PartialEq, Eq)]
pub struct CoeffTable {
    max_i: u32,
    max_j: u32,
    weight_bound: u32,
    /// Offset of row `j` in `entries`; row `j` holds `i = 0..=(S - 3j)/2`.
    row_offsets: Vec<usize>,
    entries: Vec<Option<BigInt>>,
}

impl fmt::Debug for CoeffTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoeffTable")
            .field("max_i", &self.max_i)
            .field("max_j", &self.max_j)
            .field("weight_bound", &self.weight_bound)
            .field("present", &self.entries.iter().filter(|e| e.is_some()).count())
            .field("completed_weight", &self.completed_weight())
            .finish()
    }
}

impl CoeffTable {
    /// An empty table for the rectangle `0..=max_i` x `0..=max_j`.
    pub fn empty(max_i: u32, max_j: u32) -> Self {
        let weight_bound = 2 * max_i + 3 * max_j;
        let rows = weight_bound / 3 + 1;
        let mut row_offsets = Vec::with_capacity(rows as usize + 1);
        let mut total = 0usize;
        for j in 0..rows {
            row_offsets.push(total);
            total += ((weight_bound - 3 * j) / 2 + 1) as usize;
        }
        row_offsets.push(total);
        Self {
            max_i,
            max_j,
            weight_bound,
            row_offsets,
            entries: vec![None; total],
        }
    }

    pub fn max_i(&self) -> u32 {
        self.max_i
    }

    pub fn max_j(&self) -> u32 {
        self.max_j
    }

    /// Largest weight stored: `2 max_i + 3 max_j`.
    pub fn weight_bound(&self) -> u32 {
        self.weight_bound
    }

    /// Number of slots in the dependency closure.
    pub fn closure_len(&self) -> usize {
        self.entries.len()
    }

    pub fn in_closure(&self, idx: Index) -> bool {
        idx.weight() <= self.weight_bound
    }

    pub fn in_rectangle(&self, idx: Index) -> bool {
        idx.i <= self.max_i && idx.j <= self.max_j
    }

    fn slot(&self, idx: Index) -> Option<usize> {
        self.in_closure(idx)
            .then(|| self.row_offsets[idx.j as usize] + idx.i as usize)
    }

    /// Stored value, `None` if absent or outside the closure.
    pub fn get(&self, idx: Index) -> Option<&BigInt> {
        self.slot(idx).and_then(|s| self.entries[s].as_ref())
    }

    /// Overwrites a single entry. Performs no consistency check; intended for
    /// loading data and for building deliberately corrupted fixtures.
    pub fn insert(&mut self, idx: Index, value: BigInt) -> Result<()> {
        let slot = self.slot(idx).ok_or(Error::NotComputed {
            i: idx.i.into(),
            j: idx.j.into(),
        })?;
        self.entries[slot] = Some(value);
        Ok(())
    }

    /// `a[i,j]` with the convention that negative indices give 0.
    pub fn coefficient(&self, i: i64, j: i64) -> Result<BigInt> {
        if i < 0 || j < 0 {
            return Ok(BigInt::zero());
        }
        u32::try_from(i)
            .ok()
            .zip(u32::try_from(j).ok())
            .and_then(|(i, j)| self.get(Index::new(i, j)))
            .cloned()
            .ok_or(Error::NotComputed { i, j })
    }

    /// Largest `s` such that every closure index of weight `<= s` is present.
    pub fn completed_weight(&self) -> Option<u32> {
        let mut done = None;
        for s in 0..=self.weight_bound {
            if diagonal(s).all(|idx| self.get(idx).is_some()) {
                done = Some(s);
            } else {
                break;
            }
        }
        done
    }

    /// Present entries in `(weight, i)` order.
    pub fn iter(&self) -> impl Iterator<Item = (Index, &BigInt)> + '_ {
        (0..=self.weight_bound)
            .flat_map(diagonal)
            .filter_map(move |idx| self.get(idx).map(|v| (idx, v)))
    }

    /// Indices of the requested rectangle, row by row (`j` outer, `i` inner).
    pub fn rectangle(&self) -> impl Iterator<Item = Index> {
        let (mi, mj) = (self.max_i, self.max_j);
        (0..=mj).flat_map(move |j| (0..=mi).map(move |i| Index::new(i, j)))
    }

    /// Reads a dependency during computation; out-of-quadrant indices are 0.
    fn dependency(&self, i: i64, j: i64) -> &BigInt {
        static ZERO: BigInt = BigInt::ZERO;
        if i < 0 || j < 0 {
            return &ZERO;
        }
        self.get(Index::new(i as u32, j as u32))
            .expect("dependency read before its diagonal was published")
    }

    /// The right-hand side of the recursion scaled by 3.
    fn scaled_rhs(&self, idx: Index) -> BigInt {
        let (i, j) = (i64::from(idx.i), i64::from(idx.j));
        let mut r = self.dependency(i + 1, j - 1) * (9 * (i + 1));
        r += self.dependency(i - 2, j + 1) * (16 * (j + 1));
        r -= self.dependency(i - 1, j) * ((4 * i + 6 * j - 1) * (2 * i + 3 * j - 1));
        r
    }

    fn compute_entry(&self, idx: Index) -> Result<BigInt> {
        if idx == Index::new(0, 0) {
            return Ok(BigInt::one());
        }
        let three = BigInt::from(3);
        let (q, rem) = self.scaled_rhs(idx).div_rem(&three);
        if !rem.is_zero() {
            return Err(Error::DivisibilityViolation { i: idx.i, j: idx.j });
        }
        Ok(q)
    }

    /// Checks `3 a[i,j] == R(i,j)` for a stored entry; `a[0,0]` must be 1.
    pub fn satisfies_recursion(&self, idx: Index) -> bool {
        let Some(value) = self.get(idx) else {
            return false;
        };
        if idx == Index::new(0, 0) {
            return value.is_one();
        }
        value * 3 == self.scaled_rhs(idx)
    }

    fn fill_diagonal(&mut self, s: u32, pool: Option<&rayon::ThreadPool>) -> Result<()> {
        let indices: Vec<Index> = diagonal(s).collect();
        let this = &*self;
        let values: Vec<Result<BigInt>> = match pool {
            Some(pool) => pool.install(|| {
                indices.par_iter().map(|&idx| this.compute_entry(idx)).collect()
            }),
            None => indices.iter().map(|&idx| this.compute_entry(idx)).collect(),
        };
        // Publish only once the whole diagonal succeeded.
        let values = values.into_iter().collect::<Result<Vec<_>>>()?;
        for (idx, value) in indices.into_iter().zip(values) {
            let slot = self.row_offsets[idx.j as usize] + idx.i as usize;
            self.entries[slot] = Some(value);
        }
        Ok(())
    }
}

/// Computes `a[i,j]` for the rectangle `0..=max_i` x `0..=max_j` (and its
/// dependency closure) using `workers` threads per diagonal.
///
/// With `resume_from`, the checkpoint's complete diagonals are validated
/// against the recursion and reused; computation continues from the first
/// incomplete diagonal.
pub fn compute_rectangle(
    max_i: u32,
    max_j: u32,
    workers: usize,
    resume_from: Option<&Checkpoint>,
) -> Result<CoeffTable> {
    if workers == 0 {
        return Err(Error::Config("workers must be positive".into()));
    }
    let mut table = CoeffTable::empty(max_i, max_j);
    let mut start = 0;
    if let Some(checkpoint) = resume_from {
        start = seed_from_checkpoint(&mut table, checkpoint)?;
    }
    let pool = if workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?,
        )
    } else {
        None
    };
    for s in start..=table.weight_bound {
        table.fill_diagonal(s, pool.as_ref())?;
    }
    Ok(table)
}

/// Copies the complete diagonals of `checkpoint` that fit into `table` and
/// returns the first weight still to compute.
fn seed_from_checkpoint(table: &mut CoeffTable, checkpoint: &Checkpoint) -> Result<u32> {
    let loaded = checkpoint.to_table()?;
    let Some(done) = loaded.completed_weight() else {
        return Ok(0);
    };
    let done = done.min(table.weight_bound);
    for s in 0..=done {
        for idx in diagonal(s) {
            let value = loaded.get(idx).cloned().expect("diagonal is complete");
            table.insert(idx, value)?;
        }
    }
    for s in 0..=done {
        if let Some(bad) = diagonal(s).find(|&idx| !table.satisfies_recursion(idx)) {
            return Err(Error::CheckpointMismatch { i: bad.i, j: bad.j });
        }
    }
    Ok(done + 1)
}
