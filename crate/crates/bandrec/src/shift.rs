//! Polynomials in the backward shift operator y with multivariate
//! coefficients.  Applied to a sequence {G_n}, the term c_k y^k contributes
//! c_k * G_{n-k}.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::symbols::{BandValues, Rational, SymbolTable};

/// coeffs[k] multiplies y^k; the trailing coefficient is kept nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftPoly {
    nvars: usize,
    coeffs: Vec<MultiPoly>,
}

impl ShiftPoly {
    pub fn zero(nvars: usize) -> Self {
        ShiftPoly {
            nvars,
            coeffs: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(MultiPoly::one(nvars))
    }

    pub fn constant(c: MultiPoly) -> Self {
        Self::term(c, 0)
    }

    /// c * y^k.
    pub fn term(c: MultiPoly, k: usize) -> Self {
        let nvars = c.nvars();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        let mut coeffs = vec![MultiPoly::zero(nvars); k + 1];
        coeffs[k] = c;
        ShiftPoly { nvars, coeffs }
    }

    pub fn from_coeffs(nvars: usize, coeffs: Vec<MultiPoly>) -> Self {
        for c in &coeffs {
            assert_eq!(c.nvars(), nvars, "variable arity mismatch");
        }
        let mut p = ShiftPoly { nvars, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> MultiPoly {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.nvars))
    }

    pub fn constant_term(&self) -> MultiPoly {
        self.coeff(0)
    }

    pub fn neg(&self) -> Self {
        ShiftPoly {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable arity mismatch");
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let a = self
                .coeffs
                .get(k)
                .cloned()
                .unwrap_or_else(|| MultiPoly::zero(self.nvars));
            let b = other.coeffs.get(k);
            coeffs.push(match b {
                Some(b) => a.add(b),
                None => a,
            });
        }
        Self::from_coeffs(self.nvars, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable arity mismatch");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars);
        }
        let deg = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![MultiPoly::zero(self.nvars); deg];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(self.nvars, coeffs)
    }

    pub fn mul_poly(&self, c: &MultiPoly) -> Self {
        self.mul(&Self::constant(c.clone()))
    }

    /// Multiplies by y^k.
    pub fn mul_y(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![MultiPoly::zero(self.nvars); k];
        coeffs.extend(self.coeffs.iter().cloned());
        ShiftPoly {
            nvars: self.nvars,
            coeffs,
        }
    }

    /// Coefficient-wise evaluation at a value assignment.
    pub fn substitute(&self, values: &BandValues) -> Result<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.substitute(values)).collect()
    }

    /// Sum_k c_k(values) * G_{n-k} where seq[i] holds G_{i+1} and n is a
    /// 1-based family index.
    pub fn apply_at(&self, values: &BandValues, seq: &[Rational], n: usize) -> Result<Rational> {
        let deg = self
            .degree()
            .ok_or_else(|| Error::IndexOutOfRange("applying zero shift polynomial".into()))?;
        if n <= deg || n > seq.len() {
            return Err(Error::IndexOutOfRange(format!(
                "index {n} outside [{}, {}]",
                deg + 1,
                seq.len()
            )));
        }
        let mut acc = Rational::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc += c.substitute(values)? * &seq[n - k - 1];
        }
        Ok(acc)
    }

    /// Text form such as "1 - a y + (bd - ce) y^2".
    pub fn render(&self, table: &SymbolTable) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign_neg, body) = coefficient_display(c, table, false);
            if first {
                if sign_neg {
                    out.push('-');
                }
                first = false;
            } else {
                out.push_str(if sign_neg { " - " } else { " + " });
            }
            let y = match k {
                0 => String::new(),
                1 => "y".to_string(),
                _ => format!("y^{k}"),
            };
            match (body.as_str(), y.is_empty()) {
                ("1", false) => out.push_str(&y),
                (_, false) => {
                    out.push_str(&body);
                    out.push(' ');
                    out.push_str(&y);
                }
                (_, true) => out.push_str(&body),
            }
        }
        out
    }
}

/// Splits a coefficient into a leading sign and an unsigned body, wrapping
/// multi-term polynomials in parentheses.
pub(crate) fn coefficient_display(
    c: &MultiPoly,
    table: &SymbolTable,
    latex: bool,
) -> (bool, String) {
    let text = if latex {
        c.render_latex(table)
    } else {
        c.render(table)
    };
    if c.term_count() > 1 {
        (false, format!("({text})"))
    } else if let Some(stripped) = text.strip_prefix('-') {
        (true, stripped.to_string())
    } else {
        (false, text)
    }
}
