//! Rational linear span of polynomials, kept in echelon form over the
//! monomial basis.

use num_traits::Zero;

use crate::poly::PhasePolynomial;

/// Basis rows with pairwise distinct leading monomials.
#[derive(Debug, Clone, Default)]
pub struct LinearSpan {
    rows: Vec<PhasePolynomial>,
}

impl LinearSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// Removes every component along the span. Rows are applied from the
    /// largest leading monomial down, so each leading monomial is cleared
    /// after all rows that could reintroduce it.
    pub fn reduce(&self, f: &PhasePolynomial) -> PhasePolynomial {
        let mut rest = f.clone();
        for row in &self.rows {
            let (lead, lc) = row.leading().expect("span rows are nonzero");
            let c = rest.coefficient(lead);
            if !c.is_zero() {
                rest = &rest - &row.scale(&(c / lc));
            }
        }
        rest
    }

    pub fn contains(&self, f: &PhasePolynomial) -> bool {
        self.reduce(f).is_zero()
    }

    /// Adds `f` to the span; returns `false` if it was already inside.
    pub fn insert(&mut self, f: &PhasePolynomial) -> bool {
        let residual = self.reduce(f);
        let Some((lead, _)) = residual.leading() else {
            return false;
        };
        let lead = lead.clone();
        let at = self
            .rows
            .iter()
            .position(|r| r.leading().unwrap().0 < &lead)
            .unwrap_or(self.rows.len());
        self.rows.insert(at, residual.monic());
        true
    }
}

/// Rank over the rationals of a list of polynomials.
pub fn rank<'a>(polys: impl IntoIterator<Item = &'a PhasePolynomial>) -> usize {
    let mut span = LinearSpan::new();
    polys.into_iter().filter(|f| span.insert(f)).count()
}
