//! Valuation matrices rendered with rows indexed by `j` and columns by `i`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::json;

use crate::engine::CoeffTable;
use crate::error::{Error, Result};
use crate::valuation::{is_prime, nu};

/// Printed in place of the valuation of a zero coefficient.
pub const INFINITY: &str = "∞";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableMode {
    /// `v_p(a[i,j])`
    Nu,
    /// `v_p(a[i,j]) - j`
    NuMinusJ,
}

impl FromStr for TableMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nu" => Ok(Self::Nu),
            "nu-minus-j" | "nu_minus_j" => Ok(Self::NuMinusJ),
            other => Err(Error::Config(format!("unknown table mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Plain,
    Csv,
    Markdown,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Self::Plain),
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

/// `None` marks a zero coefficient.
pub fn valuation_matrix(
    table: &CoeffTable,
    p: u64,
    max_i: u32,
    max_j: u32,
    mode: TableMode,
) -> Result<Vec<Vec<Option<i64>>>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    (0..=max_j)
        .map(|j| {
            (0..=max_i)
                .map(|i| {
                    let a = table.coefficient(i.into(), j.into())?;
                    Ok(match nu(&a, p) {
                        Ok(v) => Some(match mode {
                            TableMode::Nu => v as i64,
                            TableMode::NuMinusJ => v as i64 - i64::from(j),
                        }),
                        Err(Error::ZeroValuation) => None,
                        Err(e) => return Err(e),
                    })
                })
                .collect()
        })
        .collect()
}

fn cell(v: &Option<i64>) -> String {
    v.map_or_else(|| INFINITY.to_string(), |v| v.to_string())
}

/// Renders the matrix. `Plain` is one row per line, cells separated by a
/// single space.
pub fn emit_table(
    table: &CoeffTable,
    p: u64,
    max_i: u32,
    max_j: u32,
    mode: TableMode,
    format: OutputFormat,
) -> Result<String> {
    let rows = valuation_matrix(table, p, max_i, max_j, mode)?;
    let mut out = String::new();
    match format {
        OutputFormat::Plain => {
            for row in &rows {
                let cells: Vec<_> = row.iter().map(cell).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
        }
        OutputFormat::Csv => {
            let header: Vec<_> = (0..=max_i).map(|i| i.to_string()).collect();
            let _ = writeln!(out, "j,{}", header.join(","));
            for (j, row) in rows.iter().enumerate() {
                let cells: Vec<_> = row.iter().map(cell).collect();
                let _ = writeln!(out, "{j},{}", cells.join(","));
            }
        }
        OutputFormat::Markdown => {
            let header: Vec<_> = (0..=max_i).map(|i| i.to_string()).collect();
            let _ = writeln!(out, "| j \\ i | {} |", header.join(" | "));
            let _ = writeln!(out, "|---|{}", "---|".repeat(header.len()));
            for (j, row) in rows.iter().enumerate() {
                let cells: Vec<_> = row.iter().map(cell).collect();
                let _ = writeln!(out, "| {j} | {} |", cells.join(" | "));
            }
        }
        OutputFormat::Json => {
            let mode = match mode {
                TableMode::Nu => "nu",
                TableMode::NuMinusJ => "nu-minus-j",
            };
            let doc = json!({
                "prime": p,
                "mode": mode,
                "max_i": max_i,
                "max_j": max_j,
                "rows": rows,
            });
            out = serde_json::to_string_pretty(&doc).expect("table serializes");
            out.push('\n');
        }
    }
    Ok(out)
}
