//! Exact sparse Gaussian elimination over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::Rational;

pub(crate) type SparseRow = BTreeMap<usize, Rational>;

/// Incrementally maintained reduced row-echelon basis of a row space.
#[derive(Default)]
pub(crate) struct Echelon {
    /// pivot column → row with a unit entry at the pivot and zeros at all other pivots
    rows: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub(crate) fn new() -> Self {
        Echelon::default()
    }

    #[cfg(test)]
    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; returns whether the rank grew.
    pub(crate) fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        for (&p, prow) in &self.rows {
            if let Some(f) = row.get(&p).cloned() {
                for (c, v) in prow {
                    let e = row.entry(*c).or_insert_with(Rational::zero);
                    *e -= &f * v;
                }
                row.retain(|_, v| !v.is_zero());
            }
        }
        let Some((&pivot, lead)) = row.iter().next() else {
            return false;
        };
        let inv = Rational::one() / lead.clone();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for prow in self.rows.values_mut() {
            if let Some(f) = prow.get(&pivot).cloned() {
                for (c, v) in &row {
                    let e = prow.entry(*c).or_insert_with(Rational::zero);
                    *e -= &f * v;
                }
                prow.retain(|_, v| !v.is_zero());
            }
        }
        self.rows.insert(pivot, row);
        true
    }

    /// Basis of `{v : row · v = 0 for every row}` in `ncols` unknowns, one
    /// vector per free column in increasing order.
    pub(crate) fn nullspace(&self, ncols: usize) -> Vec<SparseRow> {
        let mut out = Vec::new();
        for free in (0..ncols).filter(|c| !self.rows.contains_key(c)) {
            let mut v = SparseRow::new();
            v.insert(free, Rational::one());
            for (&p, row) in &self.rows {
                if let Some(f) = row.get(&free) {
                    v.insert(p, -f.clone());
                }
            }
            out.push(v);
        }
        out
    }
}
