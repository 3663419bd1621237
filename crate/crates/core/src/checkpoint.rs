//! Plain-text checkpoint of a (possibly partial) coefficient table.
//!
//! ```text
//! sigma-coeffs-v1 <max_i> <max_j>
//! <i>\t<j>\t<signed decimal>
//! ...
//! ```
//!
//! Rows are sorted by `(2i + 3j, i)` with no duplicates, LF line endings and
//! no trailing whitespace.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::engine::{CoeffTable, Index};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "sigma-coeffs-v";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub format_version: u32,
    pub bounds: (u32, u32),
    pub rows: Vec<(u32, u32, BigInt)>,
}

fn order_key(i: u32, j: u32) -> (u32, u32) {
    (2 * i + 3 * j, i)
}

impl Checkpoint {
    pub fn from_table(table: &CoeffTable) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            bounds: (table.max_i(), table.max_j()),
            rows: table
                .iter()
                .map(|(idx, v)| (idx.i, idx.j, v.clone()))
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<CoeffTable> {
        let mut table = CoeffTable::empty(self.bounds.0, self.bounds.1);
        for (i, j, v) in &self.rows {
            table.insert(Index::new(*i, *j), v.clone())?;
        }
        Ok(table)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "{MAGIC}{} {} {}",
            self.format_version, self.bounds.0, self.bounds.1
        )?;
        for (i, j, v) in &self.rows {
            writeln!(out, "{i}\t{j}\t{v}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn parse<R: BufRead>(input: R) -> Result<Self> {
        // Split on LF only so that a stray CR stays visible to the field parser.
        let mut lines = input.split(b'\n').enumerate().map(|(n, l)| {
            String::from_utf8(l?).map_err(|_| Error::Parse {
                line: n + 1,
                message: "not UTF-8".into(),
            })
        });
        let header = lines.next().transpose()?.ok_or(Error::Parse {
            line: 1,
            message: "empty checkpoint".into(),
        })?;
        let (format_version, bounds) = parse_header(&header)?;
        let closure_bound = 2 * bounds.0 + 3 * bounds.1;

        let mut rows: Vec<(u32, u32, BigInt)> = Vec::new();
        for (n, line) in lines.enumerate() {
            let line_no = n + 2;
            let line = line?;
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let [i, j, v] = fields[..] else {
                return Err(err(format!("expected 3 tab-separated fields, got {}", fields.len())));
            };
            let i: u32 = i.parse().map_err(|_| err(format!("bad index i {i:?}")))?;
            let j: u32 = j.parse().map_err(|_| err(format!("bad index j {j:?}")))?;
            if v.starts_with('+') {
                return Err(err(format!("bad coefficient {v:?}")));
            }
            let v = BigInt::from_str(v).map_err(|_| err(format!("bad coefficient {v:?}")))?;
            if 2 * u64::from(i) + 3 * u64::from(j) > u64::from(closure_bound) {
                return Err(err(format!("index ({i}, {j}) outside the dependency closure")));
            }
            if let Some(&(pi, pj, _)) = rows.last() {
                let (prev, cur) = (order_key(pi, pj), order_key(i, j));
                if cur == prev {
                    return Err(err(format!("duplicate index ({i}, {j})")));
                }
                if cur < prev {
                    return Err(err(format!("index ({i}, {j}) out of (weight, i) order")));
                }
            }
            rows.push((i, j, v));
        }
        Ok(Self {
            format_version,
            bounds,
            rows,
        })
    }
}

fn parse_header(header: &str) -> Result<(u32, (u32, u32))> {
    let err = |message: &str| Error::Parse {
        line: 1,
        message: message.to_string(),
    };
    let mut parts = header.split(' ');
    let tag = parts.next().unwrap_or_default();
    let version = tag
        .strip_prefix(MAGIC)
        .ok_or_else(|| err("missing sigma-coeffs header"))?;
    if version != FORMAT_VERSION.to_string() {
        return Err(Error::Version(version.to_string()));
    }
    let mut bound = || -> Result<u32> {
        parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err("header needs two non-negative bounds"))
    };
    let bounds = (bound()?, bound()?);
    if parts.next().is_some() {
        return Err(err("trailing data in header"));
    }
    Ok((FORMAT_VERSION, bounds))
}

pub fn save_checkpoint(table: &CoeffTable, destination: impl AsRef<Path>) -> Result<()> {
    let file = File::create(destination)?;
    Checkpoint::from_table(table).write_to(BufWriter::new(file))
}

pub fn load_checkpoint(source: impl AsRef<Path>) -> Result<Checkpoint> {
    Checkpoint::parse(BufReader::new(File::open(source)?))
}

pub fn load_table(source: impl AsRef<Path>) -> Result<CoeffTable> {
    load_checkpoint(source)?.to_table()
}
