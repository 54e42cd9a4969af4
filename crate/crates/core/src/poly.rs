//! Exact multivariate polynomials over the rationals on a canonical phase space.
//!
//! Every polynomial carries a shared [`PhaseSpace`] that fixes the variable
//! layout: `q1..qn`, then `p1..pn`, then the formal parameters in declaration
//! order. Parameters (the energy `E` and the multipliers of a total
//! Hamiltonian) are ordinary commuting symbols that have zero Poisson bracket
//! with everything.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::AlgebraError;

pub type Rational = BigRational;

/// Name of the energy parameter that every phase space declares.
pub const ENERGY: &str = "E";

/// Builds an exact rational from a numerator and a nonzero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Builds an exact integer-valued rational.
pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

/// Multiplier families of a total Hamiltonian, in level order.
pub(crate) const MULTIPLIER_PREFIXES: [char; 3] = ['v', 'u', 'w'];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseSpace {
    n_dof: usize,
    parameters: Vec<String>,
}

fn is_indexed(name: &str, prefixes: &[char]) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if prefixes.contains(&c) => {
            let rest = chars.as_str();
            !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())
        }
        _ => false,
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        _ => false,
    }
}

impl PhaseSpace {
    /// Declares `n_dof` canonical pairs and extra parameters. `E` is always
    /// present as the first parameter and must not be listed again.
    pub fn new<I, S>(n_dof: usize, parameters: I) -> Result<Arc<Self>, AlgebraError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if n_dof == 0 {
            return Err(AlgebraError::InvalidSpace(
                "a phase space needs at least one canonical pair".into(),
            ));
        }
        let mut names = vec![ENERGY.to_string()];
        for name in parameters {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(AlgebraError::InvalidSpace(format!(
                    "`{name}` is not a valid parameter identifier"
                )));
            }
            if is_indexed(&name, &['q', 'p']) {
                return Err(AlgebraError::InvalidSpace(format!(
                    "`{name}` clashes with a canonical variable name"
                )));
            }
            if is_indexed(&name, &MULTIPLIER_PREFIXES) {
                return Err(AlgebraError::InvalidSpace(format!(
                    "`{name}` is reserved for total-Hamiltonian multipliers"
                )));
            }
            if names.contains(&name) {
                return Err(AlgebraError::InvalidSpace(format!(
                    "parameter `{name}` declared twice"
                )));
            }
            names.push(name);
        }
        Ok(Arc::new(PhaseSpace {
            n_dof,
            parameters: names,
        }))
    }

    /// Extends the space with multiplier parameters `v1..`, `u1..`, `w1..`.
    pub fn with_multipliers(&self, counts: [usize; 3]) -> Arc<Self> {
        let mut parameters = self.parameters.clone();
        for (prefix, count) in MULTIPLIER_PREFIXES.iter().zip(counts) {
            parameters.extend((1..=count).map(|i| format!("{prefix}{i}")));
        }
        Arc::new(PhaseSpace {
            n_dof: self.n_dof,
            parameters,
        })
    }

    pub fn n_dof(&self) -> usize {
        self.n_dof
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    /// User-declared parameters, i.e. everything except `E` and multipliers.
    pub fn declared_parameters(&self) -> impl Iterator<Item = &str> {
        self.parameters[1..]
            .iter()
            .map(String::as_str)
            .filter(|name| !is_indexed(name, &MULTIPLIER_PREFIXES))
    }

    pub fn n_vars(&self) -> usize {
        2 * self.n_dof + self.parameters.len()
    }

    /// Index of `q_i` (1-based `i`).
    pub fn q_index(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.n_dof, "q{i} out of range");
        i - 1
    }

    /// Index of `p_i` (1-based `i`).
    pub fn p_index(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.n_dof, "p{i} out of range");
        self.n_dof + i - 1
    }

    pub fn is_parameter(&self, index: usize) -> bool {
        index >= 2 * self.n_dof
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        if is_indexed(name, &['q', 'p']) {
            let i: usize = name[1..].parse().ok()?;
            if i == 0 || i > self.n_dof {
                return None;
            }
            return Some(if name.starts_with('q') {
                i - 1
            } else {
                self.n_dof + i - 1
            });
        }
        self.parameters
            .iter()
            .position(|p| p == name)
            .map(|j| 2 * self.n_dof + j)
    }

    pub fn var_name(&self, index: usize) -> String {
        let n = self.n_dof;
        if index < n {
            format!("q{}", index + 1)
        } else if index < 2 * n {
            format!("p{}", index - n + 1)
        } else {
            self.parameters[index - 2 * n].clone()
        }
    }

    /// True when `self` has the same canonical pairs and its parameter list
    /// starts with all of `other`'s parameters.
    pub fn extends(&self, other: &PhaseSpace) -> bool {
        self.n_dof == other.n_dof && self.parameters.starts_with(&other.parameters)
    }
}

/// Exponent vector over a phase space's variables.
///
/// Ordered graded-lexicographically: total degree first, then the larger
/// exponent on the earliest variable wins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars])
    }

    pub fn var(n_vars: usize, index: usize) -> Self {
        let mut exps = vec![0; n_vars];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Indices with a nonzero exponent, paired with that exponent.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
    }

    fn padded(&self, n_vars: usize) -> Monomial {
        let mut exps = self.0.clone();
        exps.resize(n_vars, 0);
        Monomial(exps)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with exact rational coefficients in canonical form.
#[derive(Debug, Clone)]
pub struct PhasePolynomial {
    space: Arc<PhaseSpace>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for PhasePolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.terms == other.terms
    }
}

impl Eq for PhasePolynomial {}

fn same_space(a: &Arc<PhaseSpace>, b: &Arc<PhaseSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PhasePolynomial {
    pub fn zero(space: &Arc<PhaseSpace>) -> Self {
        PhasePolynomial {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &Arc<PhaseSpace>, value: Rational) -> Self {
        let mut poly = Self::zero(space);
        if !value.is_zero() {
            poly.terms.insert(Monomial::one(space.n_vars()), value);
        }
        poly
    }

    pub fn one(space: &Arc<PhaseSpace>) -> Self {
        Self::constant(space, Rational::one())
    }

    pub fn var(space: &Arc<PhaseSpace>, index: usize) -> Self {
        Self::monomial(space, Monomial::var(space.n_vars(), index), Rational::one())
    }

    pub fn q(space: &Arc<PhaseSpace>, i: usize) -> Self {
        Self::var(space, space.q_index(i))
    }

    pub fn p(space: &Arc<PhaseSpace>, i: usize) -> Self {
        Self::var(space, space.p_index(i))
    }

    /// The variable or parameter called `name`.
    pub fn symbol(space: &Arc<PhaseSpace>, name: &str) -> Result<Self, AlgebraError> {
        space
            .lookup(name)
            .map(|index| Self::var(space, index))
            .ok_or_else(|| AlgebraError::UndeclaredIdentifier(name.to_string()))
    }

    pub fn monomial(space: &Arc<PhaseSpace>, monomial: Monomial, coeff: Rational) -> Self {
        assert_eq!(monomial.0.len(), space.n_vars(), "monomial arity mismatch");
        let mut poly = Self::zero(space);
        if !coeff.is_zero() {
            poly.terms.insert(monomial, coeff);
        }
        poly
    }

    /// Collects `(monomial, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(space: &Arc<PhaseSpace>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut poly = Self::zero(space);
        for (m, c) in terms {
            assert_eq!(m.0.len(), space.n_vars(), "monomial arity mismatch");
            poly.add_term(m, c);
        }
        poly
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn space(&self) -> &Arc<PhaseSpace> {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the leading (largest) monomial down.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// The value when the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Indices of variables or parameters that occur in some term.
    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|m| m.support().map(|(i, _)| i))
            .collect()
    }

    /// True when no phase-space coordinate occurs (parameters may).
    pub fn is_phase_constant(&self) -> bool {
        self.variables()
            .into_iter()
            .all(|i| self.space.is_parameter(i))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(&self.space);
        }
        PhasePolynomial {
            space: self.space.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    /// Rescales so the leading coefficient is `+1`. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, lc)) => self.scale(&lc.recip()),
            None => self.clone(),
        }
    }

    fn check_space(&self, other: &Self) -> Result<(), AlgebraError> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(AlgebraError::MismatchedSpaces)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_space(other)?;
        let mut out = Self::zero(&self.space);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one(&self.space);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to the variable at `index`.
    pub fn partial_index(&self, index: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[index] -= 1;
            out.add_term(Monomial(exps), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Partial derivative with respect to a named variable or parameter.
    pub fn partial(&self, name: &str) -> Result<Self, AlgebraError> {
        let index = self
            .space
            .lookup(name)
            .ok_or_else(|| AlgebraError::UndeclaredIdentifier(name.to_string()))?;
        Ok(self.partial_index(index))
    }

    /// `{f, g} = Σ_i (∂f/∂q_i ∂g/∂p_i − ∂f/∂p_i ∂g/∂q_i)`.
    pub fn poisson(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_space(other)?;
        let space = &self.space;
        let mut out = Self::zero(space);
        let f_vars = self.variables();
        let g_vars = other.variables();
        for i in 1..=space.n_dof() {
            let (qi, pi) = (space.q_index(i), space.p_index(i));
            if f_vars.contains(&qi) && g_vars.contains(&pi) {
                let term = &self.partial_index(qi) * &other.partial_index(pi);
                out = &out + &term;
            }
            if f_vars.contains(&pi) && g_vars.contains(&qi) {
                let term = &self.partial_index(pi) * &other.partial_index(qi);
                out = &out - &term;
            }
        }
        Ok(out)
    }

    /// Re-expresses the polynomial on an extension of its phase space.
    pub fn lift(&self, space: &Arc<PhaseSpace>) -> Result<Self, AlgebraError> {
        if !space.extends(&self.space) {
            return Err(AlgebraError::MismatchedSpaces);
        }
        let n = space.n_vars();
        Ok(PhasePolynomial {
            space: space.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.padded(n), c.clone()))
                .collect(),
        })
    }
}

fn binop(
    a: &PhasePolynomial,
    b: &PhasePolynomial,
    op: fn(&PhasePolynomial, &PhasePolynomial) -> Result<PhasePolynomial, AlgebraError>,
) -> PhasePolynomial {
    op(a, b).expect("polynomials from different phase spaces")
}

// The operator forms panic on mismatched spaces; use the `checked_*` methods
// where the inputs are not already known to share a space.
impl Add for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn add(self, rhs: Self) -> PhasePolynomial {
        binop(self, rhs, PhasePolynomial::checked_add)
    }
}

impl Sub for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn sub(self, rhs: Self) -> PhasePolynomial {
        binop(self, rhs, PhasePolynomial::checked_sub)
    }
}

impl Mul for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn mul(self, rhs: Self) -> PhasePolynomial {
        binop(self, rhs, PhasePolynomial::checked_mul)
    }
}

impl Neg for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn neg(self) -> PhasePolynomial {
        self.scale(&-Rational::one())
    }
}

/// Formats a rational as `n` or `n/d` with the sign on the numerator.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a rational always as `n/d`, the form used in structured reports.
pub fn format_rational_fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `n`, `-n` or `n/d` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() || den.is_negative() {
        return None;
    }
    Some(BigRational::new(num, den))
}
