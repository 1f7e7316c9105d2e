//! Minor operators (A;B): strictly increasing row and column deletion lists
//! applied to every member of a banded Toeplitz family, kept in fully
//! composed original-index form.  (0;0) is the identity.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::symbols::SymbolTable;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MinorOp {
    rows: Vec<u32>,
    cols: Vec<u32>,
}

fn validate(list: &[u32], which: &str) -> Result<()> {
    for pair in list.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidOperator(format!(
                "{which} indices must be strictly increasing"
            )));
        }
    }
    if list.first().is_some_and(|x| *x == 0) {
        return Err(Error::InvalidOperator(format!(
            "{which} indices are 1-based"
        )));
    }
    Ok(())
}

impl MinorOp {
    pub fn identity() -> Self {
        MinorOp {
            rows: Vec::new(),
            cols: Vec::new(),
        }
    }

    pub fn new(rows: Vec<u32>, cols: Vec<u32>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::InvalidOperator(
                "row and column lists differ in length".into(),
            ));
        }
        validate(&rows, "row")?;
        validate(&cols, "column")?;
        Ok(MinorOp { rows, cols })
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    /// Number of deleted rows (equals deleted columns).
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_identity(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn max_index(&self) -> u32 {
        self.rows
            .last()
            .copied()
            .max(self.cols.last().copied())
            .unwrap_or(0)
    }

    /// Reducible exactly when both lists start at 1.
    pub fn is_reducible(&self) -> bool {
        self.rows.first() == Some(&1) && self.cols.first() == Some(&1)
    }

    /// Strips the maximal prefix with A_i = i = B_i and shifts the remaining
    /// indices down by its length.  The target is never reducible again.
    pub fn reduce(&self) -> Reduction {
        let mut s = 0usize;
        while s < self.len() && self.rows[s] == (s + 1) as u32 && self.cols[s] == (s + 1) as u32 {
            s += 1;
        }
        let shift = s as u32;
        let target = MinorOp {
            rows: self.rows[s..].iter().map(|x| x - shift).collect(),
            cols: self.cols[s..].iter().map(|x| x - shift).collect(),
        };
        Reduction { target, shift }
    }
}

/// Result of reducing an operator: the equivalent operator together with
/// the number of leading row/column pairs removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub target: MinorOp,
    pub shift: u32,
}

/// The i-th (1-based) positive integer not contained in the sorted list.
fn survivor(deleted: &[u32], i: u32) -> u32 {
    let mut r = i;
    for d in deleted {
        if *d <= r {
            r += 1;
        } else {
            break;
        }
    }
    r
}

/// outer ∘ inner: `inner` acts on the original family, `outer` on the minor
/// it produces.  The result is the merged operator in original indices.
pub fn compose(outer: &MinorOp, inner: &MinorOp) -> MinorOp {
    let mut rows = inner.rows.clone();
    rows.extend(outer.rows.iter().map(|o| survivor(&inner.rows, *o)));
    rows.sort_unstable();
    let mut cols = inner.cols.clone();
    cols.extend(outer.cols.iter().map(|o| survivor(&inner.cols, *o)));
    cols.sort_unstable();
    debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(cols.windows(2).all(|w| w[0] < w[1]));
    MinorOp { rows, cols }
}

/// Symbolic entry at (i, j) of the minor produced by `op`: t_{jj-ii} where
/// ii and jj are the i-th surviving row and j-th surviving column, or zero
/// outside the band.
pub fn minor_entry(op: &MinorOp, i: u32, j: u32, table: &SymbolTable) -> MultiPoly {
    assert!(i >= 1 && j >= 1, "minor positions are 1-based");
    let ii = survivor(&op.rows, i);
    let jj = survivor(&op.cols, j);
    let offset = i64::from(jj) - i64::from(ii);
    if table.in_band(offset) {
        MultiPoly::symbol(table, offset as i32).expect("offset in band")
    } else {
        MultiPoly::zero(table.var_count())
    }
}

/// For an operator of the final-round shape (A = (1,..,R-1), B_1 >= 2):
/// the (1,1) entry of its minor and whether every first-column entry below
/// row 1 is zero.  Both facts are computed, not assumed.
pub fn first_column_structure(op: &MinorOp, table: &SymbolTable) -> Result<(MultiPoly, bool)> {
    let r = table.order();
    let expected: Vec<u32> = (1..r).collect();
    if op.rows != expected {
        return Err(Error::StructureViolation(format!(
            "{op} does not delete rows 1..{}",
            r - 1
        )));
    }
    if op.cols.first() == Some(&1) {
        return Err(Error::StructureViolation(format!(
            "{op} deletes column 1"
        )));
    }
    let entry = minor_entry(op, 1, 1, table);
    let below_all_zero = (2..=r + 2).all(|i| minor_entry(op, i, 1, table).is_zero());
    Ok((entry, below_all_zero))
}

fn fmt_list(list: &[u32]) -> String {
    list.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for MinorOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "(0;0)")
        } else {
            write!(f, "({};{})", fmt_list(&self.rows), fmt_list(&self.cols))
        }
    }
}

impl FromStr for MinorOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected parenthesized operator, got {s}")))?;
        let (rows, cols) = inner
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected ';' in operator {s}")))?;
        let parse_side = |side: &str| -> Result<Vec<u32>> {
            let side = side.trim();
            if side == "0" {
                return Ok(Vec::new());
            }
            side.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad index {x}")))
                })
                .collect()
        };
        MinorOp::new(parse_side(rows)?, parse_side(cols)?)
    }
}
