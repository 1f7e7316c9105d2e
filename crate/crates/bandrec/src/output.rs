//! Rendering of derivation artifacts: the recursion in G_n form (text and
//! LaTeX), the round-by-round trace, and the JSON document emitted by the
//! command line tool.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::engine::{ExpansionResult, RoundKind};
use crate::oracle::CheckReport;
use crate::shift::coefficient_display;
use crate::solver::RecursionPoly;
use crate::symbols::{Rational, SymbolTable};

fn g_term(k: usize, latex: bool) -> String {
    if k == 0 {
        "G_n".into()
    } else if latex {
        format!("G_{{n-{k}}}")
    } else {
        format!("G_(n-{k})")
    }
}

fn assemble_line(parts: Vec<(bool, String, usize)>, latex: bool) -> String {
    let mut out = String::new();
    for (i, (neg, body, k)) in parts.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push('-');
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        if body != "1" {
            out.push_str(body);
            out.push(' ');
        }
        out.push_str(&g_term(*k, latex));
    }
    out.push_str(" = 0");
    out
}

/// "G_n - a G_(n-1) + (bd - ce) G_(n-2) + ... = 0"
pub fn recursion_text(rec: &RecursionPoly, table: &SymbolTable) -> String {
    recursion_line(rec, table, false)
}

/// Same shape with LaTeX subscripts: "G_n - a G_{n-1} + ... = 0"
pub fn recursion_latex(rec: &RecursionPoly, table: &SymbolTable) -> String {
    recursion_line(rec, table, true)
}

fn recursion_line(rec: &RecursionPoly, table: &SymbolTable, latex: bool) -> String {
    let mut parts = Vec::new();
    for (k, c) in rec.poly().coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (neg, body) = coefficient_display(c, table, latex);
        parts.push((neg, body, k));
    }
    assemble_line(parts, latex)
}

fn rational_display(c: &Rational) -> (bool, String) {
    if c.is_negative() {
        (true, (-c).to_string())
    } else {
        (false, c.to_string())
    }
}

/// G_n form of a recursion whose coefficients are already numbers.
pub fn numeric_recursion_text(coeffs: &[Rational]) -> String {
    numeric_recursion_line(coeffs, false)
}

pub fn numeric_recursion_latex(coeffs: &[Rational]) -> String {
    numeric_recursion_line(coeffs, true)
}

fn numeric_recursion_line(coeffs: &[Rational], latex: bool) -> String {
    let mut parts = Vec::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (neg, body) = rational_display(c);
        let body = if body == "1" { "1".to_string() } else if latex && body.contains('/') {
            let (n, d) = body.split_once('/').expect("checked");
            format!("\\frac{{{n}}}{{{d}}}")
        } else {
            body
        };
        parts.push((neg, body, k));
    }
    if parts.is_empty() {
        return "0 = 0".into();
    }
    assemble_line(parts, latex)
}

/// All degree+1 coefficient strings, zeros included.
pub fn coefficient_strings(rec: &RecursionPoly, table: &SymbolTable) -> Vec<String> {
    (0..=rec.degree()).map(|k| rec.coeff(k).render(table)).collect()
}

pub fn numeric_coefficient_strings(coeffs: &[Rational]) -> Vec<String> {
    coeffs.iter().map(|c| c.to_string()).collect()
}

fn tuple_text(t: &[u32]) -> String {
    let inner = t
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("({inner})")
}

/// Round-by-round account of the expansion: each equation as it is found,
/// the reductions applied, the operators introduced, and the final level
/// sets.
pub fn trace_text(res: &ExpansionResult, table: &SymbolTable) -> String {
    let mut out = String::new();
    let mut eq_cursor = 0usize;
    for round in &res.rounds {
        let kind = match round.kind {
            RoundKind::Row => "first row",
            RoundKind::Column => "first column",
        };
        out.push_str(&format!("round {}: expand along the {kind}\n", round.round));
        for _ in &round.expanded {
            out.push_str(&format!("  {}\n", res.equations[eq_cursor].render(table)));
            eq_cursor += 1;
        }
        for red in res.reductions.iter().filter(|x| x.round == round.round) {
            out.push_str(&format!(
                "  reduced {} -> {} [shift {}]\n",
                red.from, red.to, red.shift
            ));
        }
        if !round.introduced.is_empty() {
            let names = round
                .introduced
                .iter()
                .map(|op| op.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!("  new operators: {names}\n"));
        }
    }
    for (ki, level) in res.e_sets.iter().enumerate() {
        let body = level
            .iter()
            .map(|t| tuple_text(t))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("E_{{{},{}}} = {{ {body} }}\n", res.r, ki + 1));
    }
    out
}

#[derive(Serialize)]
pub struct TermJson {
    pub coeff: String,
    pub op: String,
}

#[derive(Serialize)]
pub struct EquationJson {
    pub lhs: String,
    pub terms: Vec<TermJson>,
    pub text: String,
}

#[derive(Serialize)]
pub struct RecursionJson {
    pub degree: usize,
    pub coefficients: Vec<String>,
    pub text: String,
    pub latex: String,
}

#[derive(Serialize)]
pub struct VerificationJson {
    pub seed: u64,
    pub trials: u32,
    pub n_max: usize,
    pub equation_checks: Vec<CheckReport>,
    pub reduction_checks: Vec<CheckReport>,
    pub annihilation_checks: Vec<CheckReport>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct MinimalOrderJson {
    pub observed: usize,
    pub degree: usize,
    pub trials: u32,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct ArtifactJson {
    pub schema_version: u32,
    pub order: u32,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<String>,
    pub operators: Vec<String>,
    pub equations: Vec<EquationJson>,
    pub e_sets: Vec<Vec<Vec<u32>>>,
    pub recursion: RecursionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal_order: Option<MinimalOrderJson>,
}

pub fn equations_json(res: &ExpansionResult, table: &SymbolTable) -> Vec<EquationJson> {
    res.equations
        .iter()
        .map(|eq| EquationJson {
            lhs: eq.lhs.to_string(),
            terms: eq
                .terms
                .iter()
                .map(|t| TermJson {
                    coeff: t.coeff.render(table),
                    op: t.op.to_string(),
                })
                .collect(),
            text: eq.render(table),
        })
        .collect()
}
