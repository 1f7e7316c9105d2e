//! Band symbols t_k of a Toeplitz family and rational value assignments.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Integer = num_bigint::BigInt;
pub type Rational = num_rational::BigRational;

const LETTERS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// Naming, slot ordering and band bounds for the 2R-1 symbols of a family
/// of Toeplitz order R.
///
/// Slots are ordered t_0, t_1, .., t_{R-1}, t_{-1}, .., t_{-(R-1)}.  For
/// R <= 3 the slots are named a, b, c, d, e in slot order, which reproduces
/// the usual pentadiagonal letters at R = 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    r: u32,
}

impl SymbolTable {
    pub fn new(r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::IndexOutOfRange(
                "Toeplitz order must be at least 1".into(),
            ));
        }
        Ok(SymbolTable { r })
    }

    pub fn order(&self) -> u32 {
        self.r
    }

    pub fn var_count(&self) -> usize {
        2 * self.r as usize - 1
    }

    /// True when t_offset lies inside the band, i.e. |offset| <= R-1.
    pub fn in_band(&self, offset: i64) -> bool {
        offset.unsigned_abs() < u64::from(self.r)
    }

    /// Variable slot of t_offset.
    pub fn slot(&self, offset: i32) -> Result<usize> {
        if !self.in_band(i64::from(offset)) {
            return Err(Error::IndexOutOfRange(format!(
                "offset {} outside band of order {}",
                offset, self.r
            )));
        }
        Ok(if offset >= 0 {
            offset as usize
        } else {
            (self.r as usize - 1) + offset.unsigned_abs() as usize
        })
    }

    /// Band offset stored at a variable slot.
    pub fn offset(&self, slot: usize) -> i32 {
        debug_assert!(slot < self.var_count());
        if slot < self.r as usize {
            slot as i32
        } else {
            -((slot - (self.r as usize - 1)) as i32)
        }
    }

    fn uses_letters(&self) -> bool {
        self.r <= 3
    }

    pub fn name(&self, offset: i32) -> String {
        let slot = self.slot(offset).expect("offset in band");
        if self.uses_letters() {
            LETTERS[slot].to_string()
        } else {
            format!("t{{{offset}}}")
        }
    }

    pub fn latex_name(&self, offset: i32) -> String {
        if self.uses_letters() {
            self.name(offset)
        } else {
            format!("t_{{{offset}}}")
        }
    }

    /// Inverse of `name`; also accepts the t{k} form at every order.
    pub fn offset_by_name(&self, name: &str) -> Option<i32> {
        if self.uses_letters() {
            if let Some(slot) = LETTERS.iter().position(|l| *l == name) {
                if slot < self.var_count() {
                    return Some(self.offset(slot));
                }
            }
        }
        let inner = name.strip_prefix("t{")?.strip_suffix('}')?;
        let offset: i32 = inner.parse().ok()?;
        self.in_band(i64::from(offset)).then_some(offset)
    }

    /// Offsets in slot order.
    pub fn offsets(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.var_count()).map(|s| self.offset(s))
    }
}

/// A complete assignment of rational values to the band symbols of one
/// family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandValues {
    r: u32,
    values: BTreeMap<i32, Rational>,
}

impl BandValues {
    pub fn new(r: u32, values: BTreeMap<i32, Rational>) -> Result<Self> {
        let table = SymbolTable::new(r)?;
        for offset in values.keys() {
            if !table.in_band(i64::from(*offset)) {
                return Err(Error::IndexOutOfRange(format!(
                    "offset {offset} outside band of order {r}"
                )));
            }
        }
        for offset in table.offsets() {
            if !values.contains_key(&offset) {
                return Err(Error::MissingSymbol(table.name(offset)));
            }
        }
        Ok(BandValues { r, values })
    }

    pub fn from_integers(r: u32, pairs: &[(i32, i64)]) -> Result<Self> {
        let values = pairs
            .iter()
            .map(|(k, v)| (*k, Rational::from_integer(Integer::from(*v))))
            .collect();
        Self::new(r, values)
    }

    /// Draws a nonzero integer in [-9, 9] for every symbol, in ascending
    /// offset order.
    pub fn random_nonzero<R: Rng>(r: u32, rng: &mut R) -> Self {
        let hw = r as i32 - 1;
        let mut values = BTreeMap::new();
        for offset in -hw..=hw {
            let v = loop {
                let x: i64 = rng.gen_range(-9..=9);
                if x != 0 {
                    break x;
                }
            };
            values.insert(offset, Rational::from_integer(Integer::from(v)));
        }
        BandValues { r, values }
    }

    pub fn order(&self) -> u32 {
        self.r
    }

    pub fn get(&self, offset: i32) -> Result<&Rational> {
        self.values
            .get(&offset)
            .ok_or_else(|| Error::MissingSymbol(format!("t{{{offset}}}")))
    }

    /// Matrix entry at a given diagonal offset: the band value inside the
    /// band, zero outside.
    pub fn entry(&self, offset: i64) -> Rational {
        if offset.unsigned_abs() < u64::from(self.r) {
            self.values[&(offset as i32)].clone()
        } else {
            Rational::zero()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.values.iter().map(|(k, v)| (*k, v))
    }

    /// Human-readable listing such as "a=2, b=-1, ..".
    pub fn describe(&self) -> String {
        let table = SymbolTable::new(self.r).expect("valid order");
        table
            .offsets()
            .map(|k| format!("{}={}", table.name(k), self.values[&k]))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn is_all_nonzero(&self) -> bool {
        self.values.values().all(|v| !v.is_zero())
    }

    pub fn abs_max(&self) -> Rational {
        self.values
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}
