//! Expansion engine: repeatedly expands first-row (and, in the final round,
//! first-column) minors of a banded Toeplitz family of order R until the set
//! of minor operators closes, producing one linear equation per operator.
//!
//! Round t <= R-1 expands every operator introduced in the previous round
//! along the first row of its minor; the R-th round expands along the first
//! column, where exactly one entry survives.  Every child operator is
//! reduced to canonical form; reductions in the final round must land on
//! operators that were already seen, which is what closes the system.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::operator::{compose, first_column_structure, minor_entry, MinorOp};
use crate::poly::MultiPoly;
use crate::shift::coefficient_display;
use crate::symbols::SymbolTable;

/// One summand `coeff * y * D[op]` on the right-hand side of an equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationTerm {
    pub coeff: MultiPoly,
    pub op: MinorOp,
}

/// `D[lhs] = sum of terms`, every term carrying one factor of y
/// (a size-one drop of the minor).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: MinorOp,
    pub terms: Vec<EquationTerm>,
}

impl Equation {
    pub fn render(&self, table: &SymbolTable) -> String {
        let mut out = format!("{} =", self.lhs);
        for (pos, term) in self.terms.iter().enumerate() {
            let (neg, body) = coefficient_display(&term.coeff, table, false);
            out.push_str(if neg {
                " - "
            } else if pos == 0 {
                " "
            } else {
                " + "
            });
            if body != "1" {
                out.push_str(&body);
                out.push(' ');
            }
            out.push_str(&format!("y {}", term.op));
        }
        out
    }
}

/// A single expansion step before and after canonical reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    /// 1-based position along the expanded row (or column).
    pub position: u32,
    /// Signed symbolic entry at that position.
    pub coeff: MultiPoly,
    pub raw: MinorOp,
    pub reduced: MinorOp,
    pub shift: u32,
}

/// A reduction applied during the run, for tracing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionRecord {
    pub round: u32,
    pub from: MinorOp,
    pub to: MinorOp,
    pub shift: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundKind {
    Row,
    Column,
}

#[derive(Clone, Debug)]
pub struct RoundLog {
    pub round: u32,
    pub kind: RoundKind,
    pub expanded: Vec<MinorOp>,
    pub introduced: Vec<MinorOp>,
}

/// Everything the run produced: the closed operator set (index 0 is the
/// identity), one equation per operator in the same order, the column-tuple
/// families grouped by operator level, and per-round logs.
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub r: u32,
    pub operators: Vec<MinorOp>,
    pub equations: Vec<Equation>,
    pub e_sets: Vec<Vec<Vec<u32>>>,
    pub rounds: Vec<RoundLog>,
    pub reductions: Vec<ReductionRecord>,
}

impl ExpansionResult {
    pub fn operator_index(&self, op: &MinorOp) -> Option<usize> {
        self.operators.iter().position(|o| o == op)
    }
}

/// Expands the minor family of `op` along its first row.  Entries at
/// positions 1..=R are taken symbolically; positions just past the window
/// are asserted to be zero so nothing leaks out of the band.
pub fn expand_row(op: &MinorOp, table: &SymbolTable) -> Result<Vec<RawTerm>> {
    let r = table.order();
    let mut terms = Vec::with_capacity(r as usize);
    for m in 1..=r {
        let mut coeff = minor_entry(op, 1, m, table);
        if m % 2 == 0 {
            coeff = coeff.neg();
        }
        if coeff.is_zero() {
            return Err(Error::BandLeak(format!(
                "entry ({op}, 1, {m}) vanished inside the expansion window"
            )));
        }
        let raw = compose(&MinorOp::new(vec![1], vec![m])?, op);
        let red = raw.reduce();
        terms.push(RawTerm {
            position: m,
            coeff,
            raw,
            reduced: red.target,
            shift: red.shift,
        });
    }
    for m in r + 1..=r + op.len() as u32 + 1 {
        let entry = minor_entry(op, 1, m, table);
        if !entry.is_zero() {
            return Err(Error::BandLeak(format!(
                "entry ({op}, 1, {m}) is nonzero outside the expansion window"
            )));
        }
    }
    Ok(terms)
}

/// Expands the minor family of `op` along its first column.  Valid only for
/// operators of the final-round shape, whose first column has a single
/// nonzero entry in row 1.
pub fn expand_column(op: &MinorOp, table: &SymbolTable) -> Result<RawTerm> {
    let (coeff, below_zero) = first_column_structure(op, table)?;
    if coeff.is_zero() || !below_zero {
        return Err(Error::StructureViolation(format!(
            "first column of {op} is not concentrated in row 1"
        )));
    }
    let raw = compose(&MinorOp::new(vec![1], vec![1])?, op);
    let red = raw.reduce();
    Ok(RawTerm {
        position: 1,
        coeff,
        raw,
        reduced: red.target,
        shift: red.shift,
    })
}

/// Runs the full expansion for Toeplitz order `r` and returns the closed
/// system.  Errors if the closure invariants fail rather than looping.
pub fn run(r: u32) -> Result<ExpansionResult> {
    let table = SymbolTable::new(r)?;
    let mut operators = vec![MinorOp::identity()];
    let mut index: HashMap<MinorOp, usize> = HashMap::new();
    index.insert(MinorOp::identity(), 0);
    let mut equations: Vec<Equation> = Vec::new();
    let mut rounds: Vec<RoundLog> = Vec::new();
    let mut reductions: Vec<ReductionRecord> = Vec::new();
    let mut pending: Vec<usize> = vec![0];

    for round in 1..=r {
        let kind = if round < r {
            RoundKind::Row
        } else {
            RoundKind::Column
        };
        let mut introduced: Vec<MinorOp> = Vec::new();
        let mut next_pending: Vec<usize> = Vec::new();
        let expanded: Vec<MinorOp> = pending.iter().map(|i| operators[*i].clone()).collect();

        for &op_idx in &pending {
            let lhs = operators[op_idx].clone();
            let raw_terms = match kind {
                RoundKind::Row => expand_row(&lhs, &table)?,
                RoundKind::Column => vec![expand_column(&lhs, &table)?],
            };
            let mut terms = Vec::with_capacity(raw_terms.len());
            for rt in raw_terms {
                if rt.shift > 0 {
                    reductions.push(ReductionRecord {
                        round,
                        from: rt.raw.clone(),
                        to: rt.reduced.clone(),
                        shift: rt.shift,
                    });
                    if !index.contains_key(&rt.reduced) {
                        return Err(Error::UnsuccessfulReduction(format!(
                            "round {round}: {} reduced to unseen operator {}",
                            rt.raw, rt.reduced
                        )));
                    }
                } else if !index.contains_key(&rt.reduced) {
                    if kind == RoundKind::Column {
                        return Err(Error::UnsuccessfulReduction(format!(
                            "round {round}: column expansion of {lhs} left unseen operator {}",
                            rt.reduced
                        )));
                    }
                    if rt.reduced.len() >= r as usize {
                        return Err(Error::NonTermination(format!(
                            "operator {} has more deletions than the order allows",
                            rt.reduced
                        )));
                    }
                    index.insert(rt.reduced.clone(), operators.len());
                    next_pending.push(operators.len());
                    operators.push(rt.reduced.clone());
                    introduced.push(rt.reduced.clone());
                }
                terms.push(EquationTerm {
                    coeff: rt.coeff,
                    op: rt.reduced,
                });
            }
            equations.push(Equation { lhs, terms });
        }
        rounds.push(RoundLog {
            round,
            kind,
            expanded,
            introduced,
        });
        pending = next_pending;
    }

    if !pending.is_empty() {
        return Err(Error::NonTermination(format!(
            "{} operators were introduced in the final round",
            pending.len()
        )));
    }
    if equations.len() != operators.len() {
        return Err(Error::NonTermination(format!(
            "{} equations for {} operators",
            equations.len(),
            operators.len()
        )));
    }
    for (i, eq) in equations.iter().enumerate() {
        debug_assert_eq!(eq.lhs, operators[i]);
    }

    let mut e_sets: Vec<Vec<Vec<u32>>> = vec![Vec::new(); r as usize - 1];
    for op in operators.iter().skip(1) {
        let k = op.len();
        let expected: Vec<u32> = (1..=k as u32).collect();
        if op.rows() != expected || k >= r as usize {
            return Err(Error::StructureViolation(format!(
                "closed set contains unexpected operator {op}"
            )));
        }
        e_sets[k - 1].push(op.cols().to_vec());
    }
    for level in &mut e_sets {
        level.sort();
    }

    Ok(ExpansionResult {
        r,
        operators,
        equations,
        e_sets,
        rounds,
        reductions,
    })
}
