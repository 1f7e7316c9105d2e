//! Sparse multivariate polynomials with exact integer coefficients.
//!
//! Terms live in a BTreeMap keyed by exponent vector, so every polynomial
//! has one canonical form and equal polynomials serialize identically.
//! Rendering iterates monomials in descending lexicographic order, which
//! with the slot order of [`SymbolTable`] reproduces displays such as
//! `bd - ce` and `2ace - b^2e - cd^2`.

use std::collections::BTreeMap;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::symbols::{BandValues, Integer, Rational, SymbolTable};

/// Exponent vector over the variable slots of one context.  The derived
/// `Ord` is lexicographic on the exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, slot: usize) -> Self {
        let mut e = vec![0; nvars];
        e[slot] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    fn try_div(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u16>>>()
            .map(Monomial)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Integer>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Integer::one())
    }

    pub fn constant(nvars: usize, c: Integer) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::unit(nvars), c);
        p
    }

    pub fn constant_i64(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Integer::from(c))
    }

    /// The band symbol t_offset as a polynomial.
    pub fn symbol(table: &SymbolTable, offset: i32) -> Result<Self> {
        let slot = table.slot(offset)?;
        let mut p = Self::zero(table.var_count());
        p.add_term(Monomial::var(p.nvars, slot), Integer::one());
        Ok(p)
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u16>, Integer)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars, "exponent vector arity mismatch");
            p.add_term(Monomial(exps), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.term_count() == 1 && self.constant_coefficient().is_one()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Integer)> {
        self.terms.iter()
    }

    /// Coefficient of the unit monomial.
    pub fn constant_coefficient(&self) -> Integer {
        self.terms
            .get(&Monomial::unit(self.nvars))
            .cloned()
            .unwrap_or_else(Integer::zero)
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.0.iter().map(|e| *e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Integer) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.0.len(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable arity mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable arity mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable arity mismatch");
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Multiplies by a single term.
    pub fn mul_term(&self, m: &Monomial, c: &Integer) -> Self {
        let mut out = Self::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            out.add_term(ma.mul(m), ca * c);
        }
        out
    }

    pub fn scale(&self, c: &Integer) -> Self {
        self.mul_term(&Monomial::unit(self.nvars), c)
    }

    fn leading(&self) -> Option<(&Monomial, &Integer)> {
        self.terms.iter().next_back()
    }

    /// Exact polynomial division; fails with `NonExactDivision` when the
    /// divisor does not divide `self` in the integer polynomial ring.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        assert_eq!(self.nvars, divisor.nvars, "variable arity mismatch");
        let (dm, dc) = divisor
            .leading()
            .ok_or_else(|| Error::NonExactDivision("division by zero polynomial".into()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.try_div(dm).ok_or_else(|| {
                Error::NonExactDivision("leading monomial not divisible".into())
            })?;
            let (q, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return Err(Error::NonExactDivision(
                    "leading coefficient not divisible".into(),
                ));
            }
            rem = rem.sub(&divisor.mul_term(&qm, &q));
            quot.add_term(qm, q);
        }
        Ok(quot)
    }

    /// Greatest common single-term divisor: gcd of the integer coefficients
    /// together with the slot-wise minimum exponent vector.  None for zero.
    pub fn content(&self) -> Option<(Integer, Monomial)> {
        if self.is_zero() {
            return None;
        }
        let mut g = Integer::zero();
        let mut min = vec![u16::MAX; self.nvars];
        for (m, c) in &self.terms {
            g = g.gcd(c);
            for (slot, e) in m.0.iter().enumerate() {
                min[slot] = min[slot].min(*e);
            }
        }
        Some((g, Monomial(min)))
    }

    /// Evaluates at a complete band value assignment.
    pub fn substitute(&self, values: &BandValues) -> Result<Rational> {
        let expected = 2 * values.order() as usize - 1;
        if self.nvars != expected {
            return Err(Error::MissingSymbol(format!(
                "value set of order {} does not cover {} variables",
                values.order(),
                self.nvars
            )));
        }
        let table = SymbolTable::new(values.order())?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut prod = Rational::from_integer(c.clone());
            for (slot, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    let v = values.get(table.offset(slot))?;
                    for _ in 0..*e {
                        prod *= v;
                    }
                }
            }
            acc += prod;
        }
        Ok(acc)
    }

    fn body(&self, table: &SymbolTable, m: &Monomial, latex: bool) -> String {
        let mut out = String::new();
        for (slot, e) in m.0.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            if latex && !out.is_empty() {
                out.push(' ');
            }
            let offset = table.offset(slot);
            out.push_str(&if latex {
                table.latex_name(offset)
            } else {
                table.name(offset)
            });
            if *e > 1 {
                if latex {
                    out.push_str(&format!("^{{{e}}}"));
                } else {
                    out.push_str(&format!("^{e}"));
                }
            }
        }
        out
    }

    fn render_with(&self, table: &SymbolTable, latex: bool) -> String {
        assert_eq!(self.nvars, table.var_count(), "table arity mismatch");
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let abs = c.abs();
            let body = self.body(table, m, latex);
            if body.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    if latex {
                        out.push(' ');
                    }
                }
                out.push_str(&body);
            }
        }
        out
    }

    /// Canonical text form; `parse` is its inverse.
    pub fn render(&self, table: &SymbolTable) -> String {
        self.render_with(table, false)
    }

    pub fn render_latex(&self, table: &SymbolTable) -> String {
        self.render_with(table, true)
    }

    /// Parses the canonical text form (signs, integer coefficients,
    /// juxtaposed symbol powers, optional `*` separators).
    pub fn parse(input: &str, table: &SymbolTable) -> Result<Self> {
        Parser {
            bytes: input.as_bytes(),
            pos: 0,
            table,
        }
        .parse_poly()
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    table: &'a SymbolTable,
}

impl<'a> Parser<'a> {
    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at byte {}", self.pos)))
    }

    fn skip_filler(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() || b == b'*' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<Integer> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.fail("expected digits");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        text.parse()
            .map_err(|_| Error::Parse(format!("bad integer {text}")))
    }

    fn symbol(&mut self) -> Result<Option<usize>> {
        match self.peek() {
            Some(b't') if self.bytes.get(self.pos + 1) == Some(&b'{') => {
                self.pos += 2;
                let neg = self.peek() == Some(b'-');
                if neg {
                    self.pos += 1;
                }
                let n = self.integer()?;
                if self.peek() != Some(b'}') {
                    return self.fail("expected '}'");
                }
                self.pos += 1;
                let mag: i32 = n
                    .try_into()
                    .map_err(|_| Error::Parse("offset too large".into()))?;
                let offset = if neg { -mag } else { mag };
                Ok(Some(self.table.slot(offset)?))
            }
            Some(b) if b.is_ascii_lowercase() && self.table.order() <= 3 => {
                let name = (b as char).to_string();
                match self.table.offset_by_name(&name) {
                    Some(offset) => {
                        self.pos += 1;
                        Ok(Some(self.table.slot(offset)?))
                    }
                    None => Ok(None),
                }
            }
            _ => Ok(None),
        }
    }

    fn term(&mut self) -> Result<(Monomial, Integer)> {
        let nvars = self.table.var_count();
        let mut coeff = Integer::one();
        let mut saw_any = false;
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            coeff = self.integer()?;
            saw_any = true;
        }
        let mut exps = vec![0u16; nvars];
        loop {
            self.skip_filler();
            let Some(slot) = self.symbol()? else { break };
            saw_any = true;
            let mut e: u16 = 1;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let n = self.integer()?;
                e = n
                    .try_into()
                    .map_err(|_| Error::Parse("exponent too large".into()))?;
            }
            exps[slot] += e;
        }
        if !saw_any {
            return self.fail("expected term");
        }
        Ok((Monomial(exps), coeff))
    }

    fn parse_poly(&mut self) -> Result<MultiPoly> {
        let mut poly = MultiPoly::zero(self.table.var_count());
        self.skip_filler();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            self.skip_filler();
            let (m, c) = self.term()?;
            poly.add_term(m, c * Integer::from(sign));
            self.skip_filler();
            sign = match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                _ => return self.fail("expected '+' or '-'"),
            };
        }
        Ok(poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t3() -> SymbolTable {
        SymbolTable::new(3).unwrap()
    }

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(s, &t3()).unwrap()
    }

    #[test]
    fn product_of_symbols() {
        let table = t3();
        let b = MultiPoly::symbol(&table, 1).unwrap();
        let d = MultiPoly::symbol(&table, -1).unwrap();
        let c = MultiPoly::symbol(&table, 2).unwrap();
        let e = MultiPoly::symbol(&table, -2).unwrap();
        let bd_ce = b.mul(&d).sub(&c.mul(&e));
        assert_eq!(bd_ce.render(&table), "bd - ce");
        assert_eq!(bd_ce, p("bd - ce"));
    }

    #[test]
    fn additive_identity_and_binomial_product() {
        let table = t3();
        let q = p("2ace - b^2e - cd^2");
        assert_eq!(q.add(&MultiPoly::zero(table.var_count())), q);
        let a = MultiPoly::symbol(&table, 0).unwrap();
        let b = MultiPoly::symbol(&table, 1).unwrap();
        let lhs = a.add(&b).mul(&a.sub(&b));
        assert_eq!(lhs, p("a^2 - b^2"));
    }

    #[test]
    fn rendering_matches_expected_order() {
        let table = t3();
        assert_eq!(p("2ace - b^2e - cd^2").render(&table), "2ace - b^2e - cd^2");
        assert_eq!(p("bcde - c^2e^2").render(&table), "bcde - c^2e^2");
        assert_eq!(p("-ac^2e^2").render(&table), "-ac^2e^2");
        assert_eq!(p("0").render(&table), "0");
        assert_eq!(p("-7").render(&table), "-7");
        assert_eq!(
            MultiPoly::one(table.var_count()).render(&table),
            "1"
        );
    }

    #[test]
    fn render_latex_uses_braced_exponents() {
        let table = t3();
        assert_eq!(p("2ace - b^2e").render_latex(&table), "2 a c e - b^{2} e");
        let t4 = SymbolTable::new(4).unwrap();
        let q = MultiPoly::symbol(&t4, -3).unwrap();
        assert_eq!(q.render(&t4), "t{-3}");
        assert_eq!(q.render_latex(&t4), "t_{-3}");
        assert_eq!(MultiPoly::parse("t{-3}", &t4).unwrap(), q);
    }

    #[test]
    fn exact_division_round_trip() {
        let _table = t3();
        let num = p("c^3e^3");
        let den = p("ce");
        let q = num.exact_div(&den).unwrap();
        assert_eq!(q, p("c^2e^2"));
        assert_eq!(q.mul(&den), num);
        assert!(matches!(
            p("a + b").exact_div(&p("c")),
            Err(Error::NonExactDivision(_))
        ));
        assert!(matches!(
            p("2a").exact_div(&p("3a")),
            Err(Error::NonExactDivision(_))
        ));
    }

    #[test]
    fn substitution_evaluates_exactly() {
        let values =
            BandValues::from_integers(3, &[(0, 1), (1, 2), (2, 3), (-1, 4), (-2, 5)]).unwrap();
        let got = p("bd - ce").substitute(&values).unwrap();
        assert_eq!(got, Rational::from_integer(Integer::from(-7)));
    }

    #[test]
    fn content_extracts_common_term() {
        let q = p("2c^2e^2 + 4c^3e^2");
        let (g, m) = q.content().unwrap();
        assert_eq!(g, Integer::from(2));
        assert_eq!(m.exponents(), &[0, 0, 2, 0, 2]);
        assert!(p("0").content().is_none());
    }
}
