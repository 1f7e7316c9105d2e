//! From the closed equation system to a single scalar recursion.
//!
//! Two independent routes produce the same answer and are tested against
//! each other: `char_recursion` computes det(I - yC) of the transfer matrix
//! by fraction-free elimination over the polynomial ring, while
//! `eliminate_by_substitution` eliminates the minor families from the equations
//! by direct substitution, the way one would by hand.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::ExpansionResult;
use crate::error::{Error, Result};
use crate::operator::MinorOp;
use crate::oracle::det_sequence;
use crate::poly::MultiPoly;
use crate::shift::ShiftPoly;
use crate::symbols::{BandValues, Integer, Rational};

/// Coefficient matrix C of the closed system D_i = sum_j C[i][j] * y * D_j.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    r: u32,
    entries: Vec<Vec<MultiPoly>>,
}

impl TransferMatrix {
    pub fn order(&self) -> u32 {
        self.r
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i][j]
    }
}

/// Builds the transfer matrix from the expansion result.
pub fn assemble(res: &ExpansionResult) -> Result<TransferMatrix> {
    let n = res.operators.len();
    let nv = 2 * res.r as usize - 1;
    let index: HashMap<&MinorOp, usize> = res
        .operators
        .iter()
        .enumerate()
        .map(|(i, op)| (op, i))
        .collect();
    let mut entries = vec![vec![MultiPoly::zero(nv); n]; n];
    for (i, eq) in res.equations.iter().enumerate() {
        for term in &eq.terms {
            let j = *index
                .get(&term.op)
                .ok_or_else(|| Error::UnknownOperator(format!("{} in equation {i}", term.op)))?;
            entries[i][j] = entries[i][j].add(&term.coeff);
        }
    }
    Ok(TransferMatrix { r: res.r, entries })
}

/// A recursion polynomial p(y) with p(0) = 1; p annihilates the determinant
/// sequence in the sense sum_k p_k * G(n-k) = 0 for n past the degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionPoly {
    poly: ShiftPoly,
}

impl RecursionPoly {
    pub fn new(poly: ShiftPoly) -> Result<Self> {
        if !poly.constant_term().is_one() {
            return Err(Error::StructureViolation(
                "recursion polynomial must have constant term 1".into(),
            ));
        }
        Ok(RecursionPoly { poly })
    }

    pub fn poly(&self) -> &ShiftPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().expect("nonzero by construction")
    }

    pub fn coeff(&self, k: usize) -> MultiPoly {
        self.poly.coeff(k)
    }
}

fn lift(p: &MultiPoly, y_exp: u16) -> MultiPoly {
    MultiPoly::from_terms(
        p.nvars() + 1,
        p.terms().map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            e.push(y_exp);
            (e, c.clone())
        }),
    )
}

fn unlift(det: &MultiPoly, nv: usize) -> ShiftPoly {
    let mut buckets: BTreeMap<usize, Vec<(Vec<u16>, Integer)>> = BTreeMap::new();
    for (m, c) in det.terms() {
        let e = m.exponents();
        buckets
            .entry(e[nv] as usize)
            .or_default()
            .push((e[..nv].to_vec(), c.clone()));
    }
    let top = buckets.keys().next_back().copied().unwrap_or(0);
    let coeffs = (0..=top)
        .map(|k| MultiPoly::from_terms(nv, buckets.remove(&k).unwrap_or_default()))
        .collect();
    ShiftPoly::from_coeffs(nv, coeffs)
}

/// Determinant of a polynomial matrix by fraction-free elimination.  Both
/// rows and columns are swapped so that the sparsest nonzero entry pivots,
/// which keeps the exact divisions cheap on the nearly triangular matrices
/// the expansion produces.
fn det_bareiss_poly(mut m: Vec<Vec<MultiPoly>>, nvars: usize) -> Result<MultiPoly> {
    let n = m.len();
    if n == 0 {
        return Ok(MultiPoly::one(nvars));
    }
    let mut sign = 1i32;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n - 1 {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, e) in row.iter().enumerate().skip(k) {
                let tc = e.term_count();
                if tc > 0 && best.is_none_or(|(bt, _, _)| tc < bt) {
                    best = Some((tc, i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else {
            return Ok(MultiPoly::zero(nvars));
        };
        if pi != k {
            m.swap(k, pi);
            sign = -sign;
        }
        if pj != k {
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            let lower = std::mem::replace(&mut m[i][k], MultiPoly::zero(nvars));
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&lower.mul(&m[k][j]));
                m[i][j] = if prev.is_one() {
                    num
                } else {
                    num.exact_div(&prev)?
                };
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign < 0 { det.neg() } else { det })
}

/// The recursion polynomial det(I - yC) for a transfer matrix C.
pub fn char_recursion(tm: &TransferMatrix) -> Result<RecursionPoly> {
    let n = tm.size();
    let nv = 2 * tm.r as usize - 1;
    let mut m = vec![vec![MultiPoly::zero(nv + 1); n]; n];
    for (i, row) in tm.entries.iter().enumerate() {
        m[i][i] = MultiPoly::one(nv + 1);
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                m[i][j] = m[i][j].sub(&lift(e, 1));
            }
        }
    }
    let det = det_bareiss_poly(m, nv + 1)?;
    let poly = unlift(&det, nv);
    if poly.degree().is_none() || poly.degree() > Some(n) {
        return Err(Error::StructureViolation(format!(
            "characteristic polynomial degree {:?} out of range",
            poly.degree()
        )));
    }
    RecursionPoly::new(poly)
}

/// One eliminated family: factor * D[op] = image * D[identity].
#[derive(Clone, Debug)]
pub struct Clearing {
    pub op: MinorOp,
    pub factor: ShiftPoly,
    pub image: ShiftPoly,
}

/// Outcome of the substitution route, with the intermediate state kept for
/// inspection: the working identity after all direct substitutions, and the
/// self-contained identities used to clear the remaining families.
#[derive(Clone, Debug)]
pub struct SubstitutionElimination {
    pub recursion: RecursionPoly,
    pub after_substitution: Vec<(MinorOp, ShiftPoly)>,
    pub clearings: Vec<Clearing>,
}

struct Eliminator<'a> {
    res: &'a ExpansionResult,
    nv: usize,
    /// rhs of each operator's equation as (operator index, coeff * y) pairs.
    rhs: Vec<Vec<(usize, ShiftPoly)>>,
}

impl<'a> Eliminator<'a> {
    fn new(res: &'a ExpansionResult) -> Result<Self> {
        let nv = 2 * res.r as usize - 1;
        let index: HashMap<&MinorOp, usize> = res
            .operators
            .iter()
            .enumerate()
            .map(|(i, op)| (op, i))
            .collect();
        let mut rhs = Vec::with_capacity(res.equations.len());
        for eq in &res.equations {
            let mut row = Vec::with_capacity(eq.terms.len());
            for t in &eq.terms {
                let j = *index
                    .get(&t.op)
                    .ok_or_else(|| Error::UnknownOperator(t.op.to_string()))?;
                row.push((j, ShiftPoly::term(t.coeff.clone(), 1)));
            }
            rhs.push(row);
        }
        Ok(Eliminator { res, nv, rhs })
    }

    fn level(&self, i: usize) -> usize {
        self.res.operators[i].len()
    }

    /// Replaces the D_i term of the identity using equation i.
    fn substitute(&self, u: &mut BTreeMap<usize, ShiftPoly>, i: usize) {
        let Some(ui) = u.remove(&i) else { return };
        if ui.is_zero() {
            return;
        }
        for (j, cy) in &self.rhs[i] {
            let delta = ui.mul(cy);
            match u.get_mut(j) {
                Some(existing) => {
                    let sum = existing.add(&delta);
                    if sum.is_zero() {
                        u.remove(j);
                    } else {
                        *existing = sum;
                    }
                }
                None => {
                    u.insert(*j, delta);
                }
            }
        }
    }

    /// Derives factor * D_s = image * D_0 from equation s by eliminating
    /// every other family, reusing identities already derived for cleared
    /// survivors.  Returns None if a family would need a second raw
    /// substitution, which would not terminate.
    fn derive_identity(
        &self,
        s: usize,
        cleared: &BTreeMap<usize, (ShiftPoly, ShiftPoly)>,
    ) -> Option<(ShiftPoly, ShiftPoly)> {
        let top_level = self.res.r as usize - 1;
        let mut v: BTreeMap<usize, ShiftPoly> = BTreeMap::new();
        v.insert(s, ShiftPoly::one(self.nv));
        for (j, cy) in &self.rhs[s] {
            let delta = cy.neg();
            match v.get_mut(j) {
                Some(e) => *e = e.add(&delta),
                None => {
                    v.insert(*j, delta);
                }
            }
        }
        let mut raw_used: HashSet<usize> = HashSet::new();
        let budget = 4 * self.rhs.len() * self.rhs.len() + 16;
        for _ in 0..budget {
            let Some(t) = v.keys().copied().find(|k| *k != 0 && *k != s) else {
                let q = v.remove(&s)?;
                if q.is_zero() {
                    return None;
                }
                let r = v.remove(&0).map(|x| x.neg()).unwrap_or_else(|| ShiftPoly::zero(self.nv));
                return Some((q, r));
            };
            if let Some((qt, rt)) = cleared.get(&t) {
                let vt = v.remove(&t).expect("key present");
                for e in v.values_mut() {
                    *e = e.mul(qt);
                }
                let fold = vt.mul(rt);
                match v.get_mut(&0) {
                    Some(e) => *e = e.add(&fold),
                    None => {
                        v.insert(0, fold);
                    }
                }
            } else if self.level(t) == top_level || raw_used.insert(t) {
                self.substitute(&mut v, t);
            } else {
                return None;
            }
        }
        None
    }
}

/// Eliminates the minor families from the closed system by substitution,
/// the way the derivation is carried out by hand: every family below the
/// top level is substituted once, top-level families are substituted until
/// they disappear, and each family still left is cleared through a derived
/// identity relating it directly to the full family.
pub fn eliminate_by_substitution(res: &ExpansionResult) -> Result<SubstitutionElimination> {
    let el = Eliminator::new(res)?;
    let nv = el.nv;
    let n = res.operators.len();
    let top_level = res.r as usize - 1;

    let mut u: BTreeMap<usize, ShiftPoly> = BTreeMap::new();
    u.insert(0, ShiftPoly::one(nv));
    for (j, cy) in &el.rhs[0] {
        let delta = cy.neg();
        match u.get_mut(j) {
            Some(e) => *e = e.add(&delta),
            None => {
                u.insert(*j, delta);
            }
        }
    }

    // direct pass over the lower levels, in the order the engine introduced
    // the operators
    for i in 1..n {
        if el.level(i) < top_level && u.contains_key(&i) {
            el.substitute(&mut u, i);
        }
    }
    // top-level families last: their equations only point backwards, so
    // repeated substitution drains them
    let budget = 4 * n * n + 16;
    let mut steps = 0usize;
    while let Some(&t) = u
        .keys()
        .rev()
        .find(|k| **k != 0 && el.level(**k) == top_level)
    {
        el.substitute(&mut u, t);
        steps += 1;
        if steps > budget {
            return Err(Error::NonTermination(
                "top-level substitution did not drain".into(),
            ));
        }
    }

    let after_substitution: Vec<(MinorOp, ShiftPoly)> = u
        .iter()
        .map(|(i, c)| (res.operators[*i].clone(), c.clone()))
        .collect();

    // clear the surviving families through derived identities
    let mut cleared: BTreeMap<usize, (ShiftPoly, ShiftPoly)> = BTreeMap::new();
    let mut clearings: Vec<Clearing> = Vec::new();
    loop {
        let survivors: Vec<usize> = u.keys().copied().filter(|k| *k != 0).collect();
        if survivors.is_empty() {
            break;
        }
        let mut progressed = false;
        for s in survivors {
            if let Some((q, r)) = el.derive_identity(s, &cleared) {
                let us = u.remove(&s).expect("survivor present");
                for e in u.values_mut() {
                    *e = e.mul(&q);
                }
                let fold = us.mul(&r);
                match u.get_mut(&0) {
                    Some(e) => *e = e.add(&fold),
                    None => {
                        u.insert(0, fold);
                    }
                }
                clearings.push(Clearing {
                    op: res.operators[s].clone(),
                    factor: q.clone(),
                    image: r.clone(),
                });
                cleared.insert(s, (q, r));
                progressed = true;
                break;
            }
        }
        if !progressed {
            return Err(Error::EliminationStuck(format!(
                "no identity derivable for the remaining {} families",
                u.len() - 1
            )));
        }
    }

    let p = u.remove(&0).ok_or_else(|| {
        Error::EliminationStuck("identity collapsed to 0 = 0".into())
    })?;
    let recursion = RecursionPoly::new(normalize(p)?)?;
    Ok(SubstitutionElimination {
        recursion,
        after_substitution,
        clearings,
    })
}

/// Removes the common integer-times-monomial content and fixes the constant
/// term to exactly 1.
fn normalize(p: ShiftPoly) -> Result<ShiftPoly> {
    let nv = p.nvars();
    let mut gcd: Option<Integer> = None;
    let mut min_exps: Option<Vec<u16>> = None;
    for c in p.coeffs() {
        for (m, coef) in c.terms() {
            gcd = Some(match gcd {
                Some(g) => g.gcd(coef),
                None => coef.abs(),
            });
            min_exps = Some(match min_exps {
                Some(mut acc) => {
                    for (a, e) in acc.iter_mut().zip(m.exponents()) {
                        *a = (*a).min(*e);
                    }
                    acc
                }
                None => m.exponents().to_vec(),
            });
        }
    }
    let (Some(g), Some(exps)) = (gcd, min_exps) else {
        return Err(Error::EliminationStuck("zero recursion polynomial".into()));
    };
    let content = MultiPoly::from_terms(nv, [(exps, g)]);
    let mut coeffs = Vec::with_capacity(p.coeffs().len());
    for c in p.coeffs() {
        coeffs.push(if c.is_zero() {
            c.clone()
        } else {
            c.exact_div(&content)?
        });
    }
    let mut out = ShiftPoly::from_coeffs(nv, coeffs);
    let c0 = out.constant_term();
    if c0.neg().is_one() {
        out = out.neg();
    } else if !c0.is_one() {
        return Err(Error::EliminationStuck(format!(
            "constant term {:?} is not a unit",
            c0.term_count()
        )));
    }
    Ok(out)
}

/// Recursion coefficients for one concrete band: the transfer matrix is
/// evaluated, denominators are cleared, and det(I - yC) is computed over
/// univariate integer polynomials; entry k of the result is p_k.
pub fn numeric_recursion(tm: &TransferMatrix, values: &BandValues) -> Result<Vec<Rational>> {
    let n = tm.size();
    let mut c = vec![vec![Rational::zero(); n]; n];
    let mut l = Integer::one();
    for (ci, ti) in c.iter_mut().zip(&tm.entries) {
        for (ce, te) in ci.iter_mut().zip(ti) {
            *ce = te.substitute(values)?;
            l = l.lcm(ce.denom());
        }
    }
    let mut m = vec![vec![MultiPoly::zero(1); n]; n];
    for i in 0..n {
        m[i][i] = MultiPoly::one(1);
        for j in 0..n {
            let scaled = &c[i][j] * Rational::from(l.clone());
            debug_assert!(scaled.is_integer());
            let ci = scaled.to_integer();
            if !ci.is_zero() {
                m[i][j] = m[i][j].add(&MultiPoly::from_terms(1, [(vec![1], -ci)]));
            }
        }
    }
    let det = det_bareiss_poly(m, 1)?;
    let deg = det.total_degree();
    let mut out = vec![Rational::zero(); deg + 1];
    for (mono, coef) in det.terms() {
        let k = mono.exponents()[0] as usize;
        let scale = num_traits::pow::pow(Rational::from(l.clone()), k);
        out[k] = Rational::from(coef.clone()) / scale;
    }
    if !out[0].is_one() {
        return Err(Error::StructureViolation(
            "numeric recursion must start at 1".into(),
        ));
    }
    Ok(out)
}

/// Length of the shortest linear recurrence generating the whole sequence.
pub fn berlekamp_massey(seq: &[Rational]) -> usize {
    let mut c = vec![Rational::one()];
    let mut b = vec![Rational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last_d = Rational::one();
    for i in 0..seq.len() {
        let mut d = seq[i].clone();
        for j in 1..=l.min(c.len() - 1) {
            d += &c[j] * &seq[i - j];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &last_d;
        if c.len() < b.len() + m {
            c.resize(b.len() + m, Rational::zero());
        }
        if 2 * l <= i {
            let keep = c.clone();
            for j in 0..b.len() {
                c[j + m] -= &coef * &b[j];
            }
            l = i + 1 - l;
            b = keep;
            last_d = d;
            m = 1;
        } else {
            for j in 0..b.len() {
                c[j + m] -= &coef * &b[j];
            }
            m += 1;
        }
    }
    l
}

/// Minimal recurrence order of the determinant sequence for one band.
pub fn minimal_order_for_values(values: &BandValues, n_terms: usize) -> usize {
    berlekamp_massey(&det_sequence(n_terms, values))
}

/// Maximal minimal recurrence order observed over seeded random bands; a
/// recursion of degree d is order-minimal when this returns d.
pub fn numeric_minimal_order(r: u32, degree: usize, trials: u32, seed: u64) -> Result<usize> {
    if trials == 0 {
        return Err(Error::IndexOutOfRange("at least one trial required".into()));
    }
    let mut best = 0usize;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(u64::from(t)));
        let values = BandValues::random_nonzero(r, &mut rng);
        best = best.max(minimal_order_for_values(&values, 2 * degree + 4));
    }
    Ok(best)
}
