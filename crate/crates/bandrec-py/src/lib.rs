//! Python bindings for the banded Toeplitz determinant recursion toolkit.

// fires inside the #[pymethods] expansion on PyResult-returning methods
#![allow(clippy::useless_conversion)]

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bandrec::engine::{run, ExpansionResult};
use bandrec::error::Error;
use bandrec::oracle::check_annihilates_coeffs;
use bandrec::output::{coefficient_strings, recursion_latex, recursion_text};
use bandrec::solver::{assemble, char_recursion, numeric_recursion, RecursionPoly, TransferMatrix};
use bandrec::symbols::{BandValues, SymbolTable};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidOperator(_)
        | Error::Parse(_)
        | Error::IndexOutOfRange(_)
        | Error::MissingSymbol(_)
        | Error::UnknownOperator(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A minor operator: strictly increasing 1-based row and column deletion
/// lists of equal length.
#[pyclass(name = "MinorOp", frozen)]
#[derive(Clone)]
struct PyMinorOp {
    inner: bandrec::MinorOp,
}

#[pymethods]
impl PyMinorOp {
    #[new]
    fn new(rows: Vec<u32>, cols: Vec<u32>) -> PyResult<Self> {
        bandrec::MinorOp::new(rows, cols)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn identity() -> Self {
        Self {
            inner: bandrec::MinorOp::identity(),
        }
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse()
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn rows(&self) -> Vec<u32> {
        self.inner.rows().to_vec()
    }

    fn cols(&self) -> Vec<u32> {
        self.inner.cols().to_vec()
    }

    fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }

    fn is_reducible(&self) -> bool {
        self.inner.is_reducible()
    }

    /// Strip the maximal shared leading run; returns (target, shift).
    fn reduce(&self) -> (Self, u32) {
        let red = self.inner.reduce();
        (Self { inner: red.target }, red.shift)
    }

    /// Apply `self` to the minor already produced by `inner`.
    fn compose(&self, inner: &Self) -> Self {
        Self {
            inner: bandrec::compose(&self.inner, &inner.inner),
        }
    }

    fn max_index(&self) -> u32 {
        self.inner.max_index()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("MinorOp('{}')", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.inner.hash(&mut h);
        h.finish()
    }
}

/// The closed equation system for one Toeplitz order, with the recursion
/// solved symbolically for orders up to 4.
#[pyclass(frozen)]
struct Derivation {
    table: SymbolTable,
    res: ExpansionResult,
    tm: TransferMatrix,
    rec: Option<RecursionPoly>,
}

impl Derivation {
    fn rec_ref(&self) -> PyResult<&RecursionPoly> {
        self.rec.as_ref().ok_or_else(|| {
            PyValueError::new_err("symbolic recursion is only computed for orders up to 4")
        })
    }
}

#[pymethods]
impl Derivation {
    #[new]
    fn new(order: u32) -> PyResult<Self> {
        let table = SymbolTable::new(order).map_err(to_py)?;
        let res = run(order).map_err(to_py)?;
        let tm = assemble(&res).map_err(to_py)?;
        let rec = if order <= 4 {
            Some(char_recursion(&tm).map_err(to_py)?)
        } else {
            None
        };
        Ok(Self {
            table,
            res,
            tm,
            rec,
        })
    }

    fn order(&self) -> u32 {
        self.res.r
    }

    fn operators(&self) -> Vec<PyMinorOp> {
        self.res
            .operators
            .iter()
            .map(|op| PyMinorOp { inner: op.clone() })
            .collect()
    }

    fn equations(&self) -> Vec<String> {
        self.res
            .equations
            .iter()
            .map(|eq| eq.render(&self.table))
            .collect()
    }

    fn e_sets(&self) -> Vec<Vec<Vec<u32>>> {
        self.res.e_sets.clone()
    }

    fn symbols(&self) -> Vec<String> {
        self.table
            .offsets()
            .map(|k| self.table.name(k))
            .collect()
    }

    /// Recursion coefficients as polynomial strings, constant term first.
    fn recursion_coefficients(&self) -> PyResult<Vec<String>> {
        Ok(coefficient_strings(self.rec_ref()?, &self.table))
    }

    fn recursion_degree(&self) -> PyResult<usize> {
        Ok(self.rec_ref()?.degree())
    }

    fn recursion_text(&self) -> PyResult<String> {
        Ok(recursion_text(self.rec_ref()?, &self.table))
    }

    fn recursion_latex(&self) -> PyResult<String> {
        Ok(recursion_latex(self.rec_ref()?, &self.table))
    }

    /// Recursion coefficients at seeded random nonzero integer band values,
    /// as exact rational strings.
    fn numeric_coefficients(&self, seed: u64) -> PyResult<Vec<String>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = BandValues::random_nonzero(self.res.r, &mut rng);
        let coeffs = numeric_recursion(&self.tm, &values).map_err(to_py)?;
        Ok(coeffs.iter().map(|c| c.to_string()).collect())
    }

    /// Check that the recursion annihilates the determinant sequence on
    /// `trials` seeded substitutions, fifteen indices past the degree each.
    fn verify_annihilation(&self, seed: u64, trials: u32) -> PyResult<bool> {
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(u64::from(t)));
            let values = BandValues::random_nonzero(self.res.r, &mut rng);
            let coeffs = match &self.rec {
                Some(rec) => rec.poly().substitute(&values).map_err(to_py)?,
                None => numeric_recursion(&self.tm, &values).map_err(to_py)?,
            };
            let deg = coeffs.len() - 1;
            let report = check_annihilates_coeffs(&coeffs, &values, deg + 1, deg + 15);
            if !report.pass {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[pymodule]
fn bandrec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMinorOp>()?;
    m.add_class::<Derivation>()?;
    Ok(())
}
