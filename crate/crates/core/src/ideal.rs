//! Bounded-degree membership in a polynomial ideal, with certificates.
//!
//! To decide whether `target = Σ_k f_k φ_k`, every coefficient `f_k` is
//! written with unknown rational coefficients on all monomials of degree
//! `≤ d`, the identity is expanded on the monomial basis, and the resulting
//! linear system is solved exactly. `d` is raised from 0 up to the bound, so
//! the first certificate found has the smallest possible coefficient degree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::linsolve::Echelon;
use crate::poly::{Monomial, PhasePolynomial, Rational};

/// Which coefficient class a decomposition may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientMode {
    /// Rational constants only.
    Constant,
    /// Polynomials (in variables and parameters) up to the degree bound.
    Polynomial,
}

impl fmt::Display for CoefficientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoefficientMode::Constant => "constant",
            CoefficientMode::Polynomial => "polynomial",
        })
    }
}

/// Certificate that `target = Σ_k coefficients[k] · generators[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealDecomposition {
    pub target: PhasePolynomial,
    pub generators: Vec<PhasePolynomial>,
    pub coefficients: Vec<PhasePolynomial>,
    /// Bound the search was allowed to use.
    pub degree_bound: u32,
    pub mode: CoefficientMode,
}

impl IdealDecomposition {
    fn zero(target: &PhasePolynomial, generators: &[PhasePolynomial], bound: u32, mode: CoefficientMode) -> Self {
        IdealDecomposition {
            target: target.clone(),
            generators: generators.to_vec(),
            coefficients: vec![PhasePolynomial::zero(target.space()); generators.len()],
            degree_bound: bound,
            mode,
        }
    }

    /// `Σ_k coefficients[k] · generators[k]`.
    pub fn expand(&self) -> PhasePolynomial {
        self.coefficients
            .iter()
            .zip(&self.generators)
            .fold(PhasePolynomial::zero(self.target.space()), |acc, (f, g)| {
                &acc + &(f * g)
            })
    }

    /// Re-expands the certificate and checks the coefficient degrees.
    pub fn verify(&self) -> bool {
        let degrees_ok = self.coefficients.iter().all(|f| match self.mode {
            CoefficientMode::Constant => f.as_constant().is_some(),
            CoefficientMode::Polynomial => f.degree() <= self.degree_bound,
        });
        degrees_ok && self.coefficients.len() == self.generators.len() && self.expand() == self.target
    }

    /// Largest coefficient degree actually used.
    pub fn coefficient_degree(&self) -> u32 {
        self.coefficients.iter().map(PhasePolynomial::degree).max().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.coefficients.iter().all(PhasePolynomial::is_zero)
    }

    /// Multiplies target and coefficients by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        IdealDecomposition {
            target: self.target.scale(factor),
            generators: self.generators.clone(),
            coefficients: self.coefficients.iter().map(|f| f.scale(factor)).collect(),
            degree_bound: self.degree_bound,
            mode: self.mode,
        }
    }
}

/// No decomposition exists within the searched coefficient class. This is
/// never a proof of non-membership in polynomial mode.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct NotFound {
    pub degree_bound: u32,
    pub mode: CoefficientMode,
}

impl fmt::Display for NotFound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            CoefficientMode::Constant => f.write_str("not in the rational span of the generators"),
            CoefficientMode::Polynomial => write!(
                f,
                "not representable within degree bound {}",
                self.degree_bound
            ),
        }
    }
}

/// `deg(target) + max_k deg(φ_k)`.
pub fn default_degree_bound(target: &PhasePolynomial, generators: &[PhasePolynomial]) -> u32 {
    target.degree() + generators.iter().map(PhasePolynomial::degree).max().unwrap_or(0)
}

/// All monomials of degree `≤ max_degree` in the given variables, ordered by
/// degree, then by the recursion over `vars`.
pub(crate) fn monomials_up_to(vars: &[usize], n_vars: usize, max_degree: u32) -> Vec<Monomial> {
    fn fill(vars: &[usize], remaining: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        match vars.split_first() {
            None => {
                if remaining == 0 {
                    out.push(Monomial::from_exponents(exps.clone()));
                }
            }
            Some((&v, rest)) => {
                for e in (0..=remaining).rev() {
                    exps[v] = e;
                    fill(rest, remaining - e, exps, out);
                }
                exps[v] = 0;
            }
        }
    }
    let mut out = Vec::new();
    let mut exps = vec![0; n_vars];
    for degree in 0..=max_degree {
        fill(vars, degree, &mut exps, &mut out);
    }
    out
}

fn try_degree(
    target: &PhasePolynomial,
    generators: &[PhasePolynomial],
    basis: &[Monomial],
) -> Option<Vec<PhasePolynomial>> {
    let space = target.space();
    // column = (basis monomial, generator); lower-degree multipliers first
    let columns: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|b| (0..generators.len()).map(move |k| (b, k)))
        .filter(|&(_, k)| !generators[k].is_zero())
        .collect();

    let mut rows: BTreeMap<Monomial, Vec<(usize, Rational)>> = BTreeMap::new();
    for (col, &(b, k)) in columns.iter().enumerate() {
        for (m, c) in generators[k].terms() {
            rows.entry(basis[b].mul(m)).or_default().push((col, c.clone()));
        }
    }
    if target.terms().any(|(m, _)| !rows.contains_key(m)) {
        return None;
    }

    let mut ech = Echelon::new();
    for (m, entries) in rows.iter().rev() {
        ech.insert(entries, &target.coefficient(m));
        if !ech.is_consistent() {
            return None;
        }
    }
    let x = ech.solve(columns.len())?;

    let mut coefficients = vec![PhasePolynomial::zero(space); generators.len()];
    let mut terms: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); generators.len()];
    for (value, &(b, k)) in x.into_iter().zip(&columns) {
        if !value.is_zero() {
            terms[k].push((basis[b].clone(), value));
        }
    }
    for (slot, t) in coefficients.iter_mut().zip(terms) {
        *slot = PhasePolynomial::from_terms(space, t);
    }
    Some(coefficients)
}

/// Searches for `target = Σ f_k φ_k` with coefficients of the given class.
///
/// In constant mode `degree_bound` is ignored. Every returned certificate has
/// been re-expanded against the target.
///
/// Panics if the polynomials do not share one phase space.
pub fn decompose(
    target: &PhasePolynomial,
    generators: &[PhasePolynomial],
    degree_bound: u32,
    mode: CoefficientMode,
) -> Result<IdealDecomposition, NotFound> {
    for g in generators {
        assert!(
            g.space() == target.space(),
            "ideal generators live on a different phase space"
        );
    }
    let bound = match mode {
        CoefficientMode::Constant => 0,
        CoefficientMode::Polynomial => degree_bound,
    };
    if target.is_zero() {
        return Ok(IdealDecomposition::zero(target, generators, bound, mode));
    }
    let not_found = NotFound {
        degree_bound: bound,
        mode,
    };
    if generators.iter().all(PhasePolynomial::is_zero) {
        return Err(not_found);
    }

    // Variables outside target and generators can be set to zero in any
    // certificate, so they never need to appear in the coefficients.
    let vars: Vec<usize> = generators
        .iter()
        .chain(std::iter::once(target))
        .flat_map(PhasePolynomial::variables)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n_vars = target.space().n_vars();

    for d in 0..=bound {
        let basis = monomials_up_to(&vars, n_vars, d);
        if let Some(coefficients) = try_degree(target, generators, &basis) {
            let cert = IdealDecomposition {
                target: target.clone(),
                generators: generators.to_vec(),
                coefficients,
                degree_bound: bound,
                mode,
            };
            assert!(cert.verify(), "internal error: certificate failed re-expansion");
            return Ok(cert);
        }
    }
    Err(not_found)
}

/// Decides `f ≈ g` modulo the ideal, returning the certificate for `f − g`.
pub fn weak_equals(
    f: &PhasePolynomial,
    g: &PhasePolynomial,
    ideal_generators: &[PhasePolynomial],
    degree_bound: u32,
) -> Result<IdealDecomposition, NotFound> {
    decompose(&(f - g), ideal_generators, degree_bound, CoefficientMode::Polynomial)
}
