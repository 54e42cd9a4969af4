//! Exact sparse linear algebra over the rationals.
//!
//! Rows are scaled to primitive integer vectors and eliminated fraction-free:
//! a row whose leading column already has a pivot becomes
//! `pivot_lead * row - row_lead * pivot_row`, then is divided by the gcd of
//! its entries. Rationals only reappear in back-substitution.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::Rational;

/// One equation `Σ coeffs[j] * x_j = rhs` with sorted, nonzero integer entries.
#[derive(Debug, Clone)]
struct IntRow {
    entries: Vec<(usize, BigInt)>,
    rhs: BigInt,
}

impl IntRow {
    fn from_rational(entries: &[(usize, Rational)], rhs: &Rational) -> IntRow {
        let lcm = entries
            .iter()
            .map(|(_, c)| c.denom())
            .chain(std::iter::once(rhs.denom()))
            .fold(BigInt::one(), |acc, d| acc.lcm(d));
        let scale = |r: &Rational| (r * BigRational::from_integer(lcm.clone())).to_integer();
        let mut entries: Vec<(usize, BigInt)> = entries
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (*j, scale(c)))
            .collect();
        entries.sort_by_key(|(j, _)| *j);
        let mut row = IntRow {
            entries,
            rhs: scale(rhs),
        };
        row.make_primitive();
        row
    }

    fn lead(&self) -> Option<(usize, &BigInt)> {
        self.entries.first().map(|(j, c)| (*j, c))
    }

    fn make_primitive(&mut self) {
        let g = self
            .entries
            .iter()
            .map(|(_, c)| c)
            .chain(std::iter::once(&self.rhs))
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g > BigInt::one() {
            for (_, c) in &mut self.entries {
                *c /= &g;
            }
            self.rhs /= &g;
        }
        if matches!(self.lead(), Some((_, c)) if c.is_negative()) {
            for (_, c) in &mut self.entries {
                *c = -&*c;
            }
            self.rhs = -&self.rhs;
        }
    }

    /// `self = a * self - b * other`
    fn combine(&mut self, a: &BigInt, b: &BigInt, other: &IntRow) {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut k) = (0, 0);
        let (xs, ys) = (&self.entries, &other.entries);
        while i < xs.len() || k < ys.len() {
            let take_x = k >= ys.len() || (i < xs.len() && xs[i].0 < ys[k].0);
            let take_y = i >= xs.len() || (k < ys.len() && ys[k].0 < xs[i].0);
            let (col, value) = if take_x {
                let v = a * &xs[i].1;
                i += 1;
                (xs[i - 1].0, v)
            } else if take_y {
                let v = -(b * &ys[k].1);
                k += 1;
                (ys[k - 1].0, v)
            } else {
                let v = a * &xs[i].1 - b * &ys[k].1;
                i += 1;
                k += 1;
                (xs[i - 1].0, v)
            };
            if !value.is_zero() {
                out.push((col, value));
            }
        }
        self.entries = out;
        self.rhs = a * &self.rhs - b * &other.rhs;
        self.make_primitive();
    }
}

/// Row-echelon form built incrementally, one equation at a time.
///
/// Pivots are keyed by column; a new row is reduced against existing pivots
/// in increasing column order until its leading column is free.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, IntRow>,
    inconsistent: bool,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an equation. Returns `true` when it raised the rank.
    pub fn insert(&mut self, entries: &[(usize, Rational)], rhs: &Rational) -> bool {
        let mut row = IntRow::from_rational(entries, rhs);
        loop {
            let Some((col, lead)) = row.lead() else {
                if !row.rhs.is_zero() {
                    self.inconsistent = true;
                }
                return false;
            };
            match self.pivots.get(&col) {
                Some(pivot) => {
                    let b = lead.clone();
                    let a = pivot.entries[0].1.clone();
                    let g = a.gcd(&b);
                    row.combine(&(&a / &g), &(&b / &g), pivot);
                }
                None => {
                    self.pivots.insert(col, row);
                    return true;
                }
            }
        }
    }

    /// Adds a homogeneous row and reports whether it was independent.
    pub fn insert_vector(&mut self, entries: &[(usize, Rational)]) -> bool {
        self.insert(entries, &Rational::zero())
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// A solution with every free variable set to zero, or `None` when the
    /// system is inconsistent.
    pub fn solve(&self, n_cols: usize) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Rational::zero(); n_cols];
        for (&col, row) in self.pivots.iter().rev() {
            let mut acc = BigRational::from_integer(row.rhs.clone());
            for (j, c) in &row.entries[1..] {
                if !x[*j].is_zero() {
                    acc -= &x[*j] * BigRational::from_integer(c.clone());
                }
            }
            x[col] = acc / BigRational::from_integer(row.entries[0].1.clone());
        }
        Some(x)
    }
}

/// Solves a sparse system given as `(entries, rhs)` rows.
pub fn solve(n_cols: usize, rows: &[(Vec<(usize, Rational)>, Rational)]) -> Option<Vec<Rational>> {
    let mut ech = Echelon::new();
    for (entries, rhs) in rows {
        ech.insert(entries, rhs);
        if !ech.is_consistent() {
            return None;
        }
    }
    ech.solve(n_cols)
}
