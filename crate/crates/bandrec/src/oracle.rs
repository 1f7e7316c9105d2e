//! Exact brute-force verification.  Everything the symbolic pipeline claims
//! is replayed here against literal determinants computed over arbitrary
//! precision rationals: equations, reductions, and the final recursion.
//!
//! Size conventions: `family_det(op, m, values)` is the determinant of the
//! m x m minor, i.e. the member of size m + op.len() with the operator's
//! rows and columns deleted.  An equation `D[lhs] = sum c_i y D[op_i]`
//! therefore asserts `family_det(lhs, m) = sum c_i * family_det(op_i, m-1)`
//! for every m at which all minors exist.

use std::collections::HashMap;

use num_integer::Integer as _;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::engine::Equation;
use crate::error::{Error, Result};
use crate::operator::MinorOp;
use crate::shift::ShiftPoly;
use crate::symbols::{BandValues, Integer, Rational};

/// Dense matrix of exact rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl ExactMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ExactMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    fn delete(&self, rows: &[usize], cols: &[usize]) -> ExactMatrix {
        let keep = |dropped: &[usize]| -> Vec<usize> {
            (0..self.n).filter(|x| !dropped.contains(x)).collect()
        };
        let (ri, ci) = (keep(rows), keep(cols));
        ExactMatrix::from_fn(ri.len(), |i, j| self.entry(ri[i], ci[j]).clone())
    }
}

/// The n x n member of the Toeplitz family for the given band values.
pub fn toeplitz_member(n: usize, values: &BandValues) -> ExactMatrix {
    ExactMatrix::from_fn(n, |i, j| values.entry(j as i64 - i as i64))
}

/// The minor of the n x n member selected by `op`.
pub fn build_minor(op: &MinorOp, n: usize, values: &BandValues) -> Result<ExactMatrix> {
    if (op.max_index() as usize) > n {
        return Err(Error::IndexOutOfRange(format!(
            "{op} does not fit in a {n} x {n} member"
        )));
    }
    let full = toeplitz_member(n, values);
    let to0 = |list: &[u32]| -> Vec<usize> { list.iter().map(|x| *x as usize - 1).collect() };
    Ok(full.delete(&to0(op.rows()), &to0(op.cols())))
}

fn row_cleared(m: &ExactMatrix) -> (Vec<Vec<Integer>>, Rational) {
    let n = m.size();
    let mut rows = Vec::with_capacity(n);
    let mut scale = Rational::one();
    for i in 0..n {
        let mut l = Integer::one();
        for j in 0..n {
            l = l.lcm(m.entry(i, j).denom());
        }
        let row: Vec<Integer> = (0..n)
            .map(|j| {
                let v = m.entry(i, j) * Rational::from(l.clone());
                debug_assert!(v.is_integer());
                v.to_integer()
            })
            .collect();
        scale *= Rational::from(l);
        rows.push(row);
    }
    (rows, scale)
}

/// Determinant of an integer matrix by fraction-free elimination with row
/// pivoting.  The empty matrix has determinant one.
fn det_bareiss_int(mut m: Vec<Vec<Integer>>) -> Integer {
    let n = m.len();
    if n == 0 {
        return Integer::one();
    }
    let mut sign = 1i32;
    let mut prev = Integer::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|i| !m[*i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return Integer::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero());
                m[i][j] = q;
            }
            m[i][k] = Integer::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Exact determinant: denominators are cleared row by row, the integer part
/// is eliminated fraction-free, and the scale is divided back out.
pub fn det_exact(m: &ExactMatrix) -> Rational {
    let (rows, scale) = row_cleared(m);
    Rational::from(det_bareiss_int(rows)) / scale
}

/// Naive cofactor expansion along the first row, as an independent
/// cross-check for small sizes.
pub fn det_cofactor(m: &ExactMatrix) -> Rational {
    let n = m.size();
    if n == 0 {
        return Rational::one();
    }
    let mut acc = Rational::zero();
    for j in 0..n {
        let e = m.entry(0, j);
        if e.is_zero() {
            continue;
        }
        let sub = m.delete(&[0], &[j]);
        let term = e * det_cofactor(&sub);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Determinant of the m x m minor selected by `op`, i.e. of the family
/// member of size m + op.len() with the deletions applied.
pub fn family_det(op: &MinorOp, m: usize, values: &BandValues) -> Result<Rational> {
    Ok(det_exact(&build_minor(op, m + op.len(), values)?))
}

/// Determinants of all members of sizes 1..=n_max in one pass: the leading
/// principal minors of the largest member are accumulated as the pivots of
/// a banded LU factorization.  A zero pivot aborts the fast path and the
/// remaining sizes fall back to independent dense determinants.
#[allow(clippy::needless_range_loop)] // split row borrows, windowed
pub fn det_sequence(n_max: usize, values: &BandValues) -> Vec<Rational> {
    let half = values.order() as usize - 1;
    let full = toeplitz_member(n_max, values);
    let mut a: Vec<Vec<Rational>> = (0..n_max)
        .map(|i| (0..n_max).map(|j| full.entry(i, j).clone()).collect())
        .collect();
    let mut dets = Vec::with_capacity(n_max);
    let mut running = Rational::one();
    for k in 0..n_max {
        let pivot = a[k][k].clone();
        if pivot.is_zero() {
            for n in k + 1..=n_max {
                dets.push(det_exact(&toeplitz_member(n, values)));
            }
            return dets;
        }
        running *= &pivot;
        dets.push(running.clone());
        for i in k + 1..=(k + half).min(n_max - 1) {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &pivot;
            for j in k..=(k + half).min(n_max - 1) {
                let delta = &factor * &a[k][j];
                a[i][j] -= delta;
            }
        }
    }
    dets
}

/// Memoized family determinants for one fixed set of band values.
pub struct DetCache {
    values: BandValues,
    cache: HashMap<(MinorOp, usize), Rational>,
}

impl DetCache {
    pub fn new(values: BandValues) -> Self {
        DetCache {
            values,
            cache: HashMap::new(),
        }
    }

    pub fn values(&self) -> &BandValues {
        &self.values
    }

    pub fn family_det(&mut self, op: &MinorOp, m: usize) -> Result<Rational> {
        if let Some(v) = self.cache.get(&(op.clone(), m)) {
            return Ok(v.clone());
        }
        let v = family_det(op, m, &self.values)?;
        self.cache.insert((op.clone(), m), v.clone());
        Ok(v)
    }
}

/// Outcome of one oracle check.  `residuals` lists the places where the
/// claim failed; empty means every tested instance was exactly zero and is
/// serialized as the string "exact-zero".
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub start: usize,
    pub end: usize,
    pub pass: bool,
    #[serde(serialize_with = "residuals_or_exact_zero")]
    pub residuals: Vec<String>,
}

fn residuals_or_exact_zero<S: serde::Serializer>(
    residuals: &[String],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if residuals.is_empty() {
        s.serialize_str("exact-zero")
    } else {
        residuals.serialize(s)
    }
}

impl CheckReport {
    fn new(claim: String, start: usize, end: usize) -> Self {
        CheckReport {
            claim,
            seed: None,
            start,
            end,
            pass: true,
            residuals: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn record(&mut self, at: String, residual: &Rational) {
        if !residual.is_zero() {
            self.pass = false;
            self.residuals.push(format!("{at}: residual {residual}"));
        }
    }
}

fn min_minor_size(op: &MinorOp) -> usize {
    (op.max_index() as usize).saturating_sub(op.len())
}

/// Smallest left-hand minor size at which every determinant in the equation
/// exists.
pub fn equation_min_index(eq: &Equation) -> usize {
    let mut lo = min_minor_size(&eq.lhs).max(1);
    for t in &eq.terms {
        lo = lo.max(min_minor_size(&t.op) + 1);
    }
    lo
}

/// Checks one equation for `count` consecutive minor sizes starting at the
/// smallest admissible one (or at `from`, if larger).
pub fn check_equation_cached(
    eq: &Equation,
    cache: &mut DetCache,
    from: usize,
    count: usize,
) -> Result<CheckReport> {
    let start = equation_min_index(eq).max(from);
    let end = start + count.saturating_sub(1);
    let mut report = CheckReport::new(
        format!("equation for {} at {}", eq.lhs, cache.values().describe()),
        start,
        end,
    );
    for m in start..=end {
        let lhs = cache.family_det(&eq.lhs, m)?;
        let mut rhs = Rational::zero();
        for t in &eq.terms {
            let c = t.coeff.substitute(cache.values())?;
            rhs += c * cache.family_det(&t.op, m - 1)?;
        }
        report.record(format!("m={m}"), &(lhs - rhs));
    }
    Ok(report)
}

pub fn check_equation(
    eq: &Equation,
    values: &BandValues,
    from: usize,
    count: usize,
) -> Result<CheckReport> {
    let mut cache = DetCache::new(values.clone());
    check_equation_cached(eq, &mut cache, from, count)
}

/// Checks that a reduction preserves the whole determinant family:
/// the m x m minor of `from` equals the m x m minor of `to` for every m.
pub fn check_reduction(
    from_op: &MinorOp,
    to_op: &MinorOp,
    values: &BandValues,
    count: usize,
) -> Result<CheckReport> {
    let start = min_minor_size(from_op).max(min_minor_size(to_op)).max(1);
    let end = start + count.saturating_sub(1);
    let mut report = CheckReport::new(
        format!("reduction {from_op} -> {to_op} at {}", values.describe()),
        start,
        end,
    );
    for m in start..=end {
        let a = family_det(from_op, m, values)?;
        let b = family_det(to_op, m, values)?;
        report.record(format!("m={m}"), &(a - b));
    }
    Ok(report)
}

/// Checks that fixed rational coefficients annihilate the determinant
/// sequence: sum_k coeffs[k] * G(n-k) = 0 for n in n_from..=n_to, where
/// G(m) = det of the m x m member.
pub fn check_annihilates_coeffs(
    coeffs: &[Rational],
    values: &BandValues,
    n_from: usize,
    n_to: usize,
) -> CheckReport {
    let deg = coeffs.len().saturating_sub(1);
    let n_from = n_from.max(deg + 1);
    let mut report = CheckReport::new(
        format!("recursion annihilates dets at {}", values.describe()),
        n_from,
        n_to,
    );
    if n_to < n_from {
        return report;
    }
    let seq = det_sequence(n_to, values);
    for n in n_from..=n_to {
        let mut residual = Rational::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                residual += c * &seq[n - k - 1];
            }
        }
        report.record(format!("n={n}"), &residual);
    }
    report
}

/// Checks that the recursion annihilates the determinant sequence of the
/// full family, substituting the band values into its coefficients first.
pub fn check_annihilates(
    recursion: &ShiftPoly,
    values: &BandValues,
    n_from: usize,
    n_to: usize,
) -> Result<CheckReport> {
    let coeffs = recursion.substitute(values)?;
    Ok(check_annihilates_coeffs(&coeffs, values, n_from, n_to))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, Equation, EquationTerm};
    use crate::poly::MultiPoly;
    use crate::symbols::SymbolTable;

    fn vals(r: u32, list: &[(i32, i64)]) -> BandValues {
        BandValues::from_integers(r, list).unwrap()
    }

    fn r3_vals() -> BandValues {
        vals(3, &[(0, 2), (1, -1), (2, 3), (-1, 1), (-2, -2)])
    }

    #[test]
    fn member_matches_hand_built_matrix() {
        // order 3, band (a,b,c,d,e) = (2,-1,3,1,-2), size 4:
        //   [ 2 -1  3  0]
        //   [ 1  2 -1  3]
        //   [-2  1  2 -1]
        //   [ 0 -2  1  2]
        let m = toeplitz_member(4, &r3_vals());
        let expect = [
            [2, -1, 3, 0],
            [1, 2, -1, 3],
            [-2, 1, 2, -1],
            [0, -2, 1, 2],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(m.entry(i, j), &Rational::from(Integer::from(*v)));
            }
        }
    }

    #[test]
    fn determinants_agree_with_cofactor_expansion() {
        let values = r3_vals();
        for n in 0..=6usize {
            let m = toeplitz_member(n, &values);
            assert_eq!(det_exact(&m), det_cofactor(&m), "size {n}");
        }
        // a fraction-valued band as well
        let half = BandValues::new(
            2,
            [
                (0, Rational::new(Integer::from(1), Integer::from(2))),
                (1, Rational::new(Integer::from(3), Integer::from(4))),
                (-1, Rational::new(Integer::from(-2), Integer::from(5))),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        for n in 1..=5usize {
            let m = toeplitz_member(n, &half);
            assert_eq!(det_exact(&m), det_cofactor(&m), "size {n}");
        }
    }

    #[test]
    fn all_ones_band_vanishes_at_size_four() {
        let ones = vals(3, &[(0, 1), (1, 1), (2, 1), (-1, 1), (-2, 1)]);
        assert!(det_exact(&toeplitz_member(4, &ones)).is_zero());
        assert!(det_exact(&toeplitz_member(1, &ones)).is_one());
    }

    #[test]
    fn det_sequence_matches_dense_and_handles_zero_pivot() {
        let values = r3_vals();
        let seq = det_sequence(10, &values);
        for (i, d) in seq.iter().enumerate() {
            assert_eq!(d, &det_exact(&toeplitz_member(i + 1, &values)), "n={}", i + 1);
        }
        // t0 = 0 forces a zero pivot at the very first step
        let zero_start = vals(2, &[(0, 0), (1, 2), (-1, 3)]);
        let seq = det_sequence(6, &zero_start);
        for (i, d) in seq.iter().enumerate() {
            assert_eq!(
                d,
                &det_exact(&toeplitz_member(i + 1, &zero_start)),
                "n={}",
                i + 1
            );
        }
    }

    #[test]
    fn scalar_family_dets_are_powers() {
        let v = vals(1, &[(0, 5)]);
        let seq = det_sequence(3, &v);
        let expect: Vec<i64> = vec![5, 25, 125];
        for (d, e) in seq.iter().zip(expect) {
            assert_eq!(d, &Rational::from(Integer::from(e)));
        }
    }

    #[test]
    fn empty_minor_has_unit_determinant() {
        let values = r3_vals();
        assert_eq!(
            family_det(&MinorOp::identity(), 0, &values).unwrap(),
            Rational::one()
        );
        // a hand computation: member of size 3, rows 1,2 and cols 2,3
        // deleted leaves the single entry t_{1-3} = e
        let op: MinorOp = "(1,2;2,3)".parse().unwrap();
        assert_eq!(
            family_det(&op, 1, &values).unwrap(),
            Rational::from(Integer::from(-2))
        );
    }

    #[test]
    fn expansion_equations_hold_numerically() {
        let res = run(3).unwrap();
        let values = r3_vals();
        let mut cache = DetCache::new(values);
        for eq in &res.equations {
            let report = check_equation_cached(eq, &mut cache, 1, 5).unwrap();
            assert!(report.pass, "{:?}", report.residuals);
        }
    }

    #[test]
    fn corrupted_equation_is_rejected() {
        let res = run(3).unwrap();
        let t = SymbolTable::new(3).unwrap();
        let values = r3_vals();
        let mut eq = res.equations[1].clone();
        // flip the sign of one coefficient
        eq.terms[0].coeff = eq.terms[0].coeff.neg();
        let report = check_equation(&eq, &values, 1, 4).unwrap();
        assert!(!report.pass);
        // and an equation claiming the wrong operator entirely
        let bogus = Equation {
            lhs: MinorOp::identity(),
            terms: vec![EquationTerm {
                coeff: MultiPoly::symbol(&t, 2).unwrap(),
                op: MinorOp::identity(),
            }],
        };
        assert!(!check_equation(&bogus, &values, 1, 4).unwrap().pass);
    }

    #[test]
    fn reduction_checks_catch_mismatches() {
        let values = r3_vals();
        let from_op: MinorOp = "(1,2,3;1,2,3)".parse().unwrap();
        let report = check_reduction(&from_op, &MinorOp::identity(), &values, 5).unwrap();
        assert!(report.pass, "{:?}", report.residuals);
        let wrong: MinorOp = "(1;2)".parse().unwrap();
        assert!(!check_reduction(&from_op, &wrong, &values, 5).unwrap().pass);
    }

    #[test]
    fn known_recursion_annihilates_small_orders() {
        // order 1: G_n - a G_(n-1) = 0
        let v1 = vals(1, &[(0, 7)]);
        let t1 = SymbolTable::new(1).unwrap();
        let rec1 = ShiftPoly::from_coeffs(
            1,
            vec![
                MultiPoly::one(1),
                MultiPoly::symbol(&t1, 0).unwrap().neg(),
            ],
        );
        let report = check_annihilates(&rec1, &v1, 2, 12).unwrap();
        assert!(report.pass, "{:?}", report.residuals);

        // order 2: G_n - t0 G_(n-1) + t1 t-1 G_(n-2) = 0
        let v2 = vals(2, &[(0, 3), (1, 2), (-1, -4)]);
        let t2 = SymbolTable::new(2).unwrap();
        let prod = MultiPoly::symbol(&t2, 1)
            .unwrap()
            .mul(&MultiPoly::symbol(&t2, -1).unwrap());
        let rec2 = ShiftPoly::from_coeffs(
            3,
            vec![
                MultiPoly::one(3),
                MultiPoly::symbol(&t2, 0).unwrap().neg(),
                prod,
            ],
        );
        let report = check_annihilates(&rec2, &v2, 3, 15).unwrap();
        assert!(report.pass, "{:?}", report.residuals);

        // flipping a sign must fail
        let bad = ShiftPoly::from_coeffs(
            3,
            vec![
                MultiPoly::one(3),
                MultiPoly::symbol(&t2, 0).unwrap(),
                MultiPoly::symbol(&t2, 1)
                    .unwrap()
                    .mul(&MultiPoly::symbol(&t2, -1).unwrap()),
            ],
        );
        assert!(!check_annihilates(&bad, &v2, 3, 15).unwrap().pass);
    }

    #[test]
    fn minor_indices_must_fit_the_member() {
        let values = r3_vals();
        let op: MinorOp = "(1;3)".parse().unwrap();
        assert!(build_minor(&op, 2, &values).is_err());
        assert!(build_minor(&op, 3, &values).is_ok());
    }
}
