//! Symmetry verdicts for generator sets on a constrained system.
//!
//! A generator is checked for commutation with `H_d` (identically or only
//! weakly), for mapping each constraint level into itself, and for not
//! raising the number of constraints on any level. The set as a whole must
//! close under the bracket with constant structure constants.

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::chain::{Constraint, ConstraintChain, Level};
use crate::ideal::{decompose, default_degree_bound, CoefficientMode, IdealDecomposition, NotFound};
use crate::poly::{PhasePolynomial, Rational};
use crate::span::{rank, LinearSpan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorSetError {
    #[error("generator set is empty")]
    Empty,
    #[error("generator `{0}` is zero or linearly dependent on earlier generators")]
    Dependent(String),
    #[error("generator `{0}` lives on a different phase space")]
    MismatchedSpace(String),
}

/// Named, linearly independent generators `A_1..A_N`.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub name: String,
    generators: Vec<Constraint>,
}

impl GeneratorSet {
    pub fn new(name: impl Into<String>, generators: Vec<Constraint>) -> Result<Self, GeneratorSetError> {
        let first = generators.first().ok_or(GeneratorSetError::Empty)?;
        let space = first.poly.space().clone();
        let mut span = LinearSpan::new();
        for g in &generators {
            if g.poly.space() != &space {
                return Err(GeneratorSetError::MismatchedSpace(g.name.clone()));
            }
            if !span.insert(&g.poly) {
                return Err(GeneratorSetError::Dependent(g.name.clone()));
            }
        }
        Ok(GeneratorSet {
            name: name.into(),
            generators,
        })
    }

    pub fn generators(&self) -> &[Constraint] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Knobs shared by the symmetry checks.
#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// `None` means `deg(target) + max deg(generators)` per search.
    pub degree_bound: Option<u32>,
    /// Adjoin `H_d − E` to the weak ideal.
    pub include_energy: bool,
    /// Coefficient class accepted for level preservation.
    pub level_mode: CoefficientMode,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            degree_bound: None,
            include_energy: true,
            level_mode: CoefficientMode::Polynomial,
        }
    }
}

impl CheckOptions {
    fn bound(&self, target: &PhasePolynomial, gens: &[PhasePolynomial]) -> u32 {
        self.degree_bound
            .unwrap_or_else(|| default_degree_bound(target, gens))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommutationClass {
    /// `{A, H_d} = 0` identically.
    Strict,
    /// `{A, H_d}` is nonzero but vanishes weakly.
    OnShell,
    /// No weak decomposition within the degree bound.
    Fails,
}

impl fmt::Display for CommutationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommutationClass::Strict => "Strict",
            CommutationClass::OnShell => "OnShell",
            CommutationClass::Fails => "Fails",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Commutation {
    pub class: CommutationClass,
    pub bracket: PhasePolynomial,
    pub result: Result<IdealDecomposition, NotFound>,
}

/// Classifies `{A, H_d}` against the weak ideal of `chain`.
pub fn check_dynamical_symmetry(a: &PhasePolynomial, chain: &ConstraintChain, options: &CheckOptions) -> Commutation {
    let bracket = a.poisson(chain.hamiltonian()).expect("generator on the chain's phase space");
    let gens = chain.weak_generators(options.include_energy);
    let bound = options.bound(&bracket, &gens);
    let result = decompose(&bracket, &gens, bound, CoefficientMode::Polynomial);
    let class = match (&result, bracket.is_zero()) {
        (_, true) => CommutationClass::Strict,
        (Ok(_), false) => CommutationClass::OnShell,
        (Err(_), false) => CommutationClass::Fails,
    };
    Commutation { class, bracket, result }
}

/// Where `{A, φ}` lands for one constraint `φ`.
#[derive(Debug, Clone)]
pub enum LevelOutcome {
    /// Decomposes over `φ`'s own level.
    Preserved(IdealDecomposition),
    /// Needs constraints of other levels; `into` names them.
    Mixes {
        certificate: IdealDecomposition,
        into: Vec<(Level, String)>,
    },
    /// Not in the constraint module at all, within the bound.
    Outside(NotFound),
}

#[derive(Debug, Clone)]
pub struct LevelEntry {
    pub constraint: String,
    pub level: Level,
    pub bracket: PhasePolynomial,
    pub outcome: LevelOutcome,
}

#[derive(Debug, Clone)]
pub struct MixingPair {
    pub constraint: String,
    pub from: Level,
    pub into: Vec<(Level, String)>,
}

#[derive(Debug, Clone)]
pub struct LevelAction {
    pub entries: Vec<LevelEntry>,
    pub include_energy: bool,
    pub mode: CoefficientMode,
}

impl LevelAction {
    pub fn level_preserving(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.outcome, LevelOutcome::Preserved(_)))
    }

    pub fn mixing_found(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.outcome, LevelOutcome::Mixes { .. }))
    }

    pub fn outside_found(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.outcome, LevelOutcome::Outside(_)))
    }

    pub fn offending_pairs(&self) -> Vec<MixingPair> {
        self.entries
            .iter()
            .filter_map(|e| match &e.outcome {
                LevelOutcome::Mixes { into, .. } => Some(MixingPair {
                    constraint: e.constraint.clone(),
                    from: e.level,
                    into: into.clone(),
                }),
                _ => None,
            })
            .collect()
    }

    /// Coefficients of `{A, φ_i}` on the constraints `φ_j` of one level, row
    /// per source constraint. `None` unless every row of that level is
    /// preserved.
    pub fn matrix(&self, level: Level) -> Option<Vec<Vec<PhasePolynomial>>> {
        self.entries
            .iter()
            .filter(|e| e.level == level)
            .map(|e| match &e.outcome {
                LevelOutcome::Preserved(cert) => {
                    let n = cert.coefficients.len() - usize::from(self.include_energy);
                    Some(cert.coefficients[..n].to_vec())
                }
                _ => None,
            })
            .collect()
    }

    fn certificates(&self) -> impl Iterator<Item = &IdealDecomposition> {
        self.entries.iter().filter_map(|e| match &e.outcome {
            LevelOutcome::Preserved(c) => Some(c),
            LevelOutcome::Mixes { certificate, .. } => Some(certificate),
            LevelOutcome::Outside(_) => None,
        })
    }
}

/// Decomposes `{A, φ}` for every constraint, first over `φ`'s level only,
/// then over all constraints.
pub fn check_level_preservation(a: &PhasePolynomial, chain: &ConstraintChain, options: &CheckOptions) -> LevelAction {
    let energy = chain
        .weak_generators(true)
        .pop()
        .filter(|_| options.include_energy);
    let with_energy = |mut gens: Vec<PhasePolynomial>| {
        gens.extend(energy.clone());
        gens
    };
    let all_gens = with_energy(chain.constraint_polys());
    let labels: Vec<(Level, String)> = chain.constraints().map(|(l, c)| (l, c.name.clone())).collect();

    let mut entries = Vec::new();
    for (level, constraint) in chain.constraints() {
        let bracket = a.poisson(&constraint.poly).expect("generator on the chain's phase space");
        let level_gens = with_energy(chain.level(level).iter().map(|c| c.poly.clone()).collect());
        let bound = options.bound(&bracket, &all_gens);
        let outcome = match decompose(&bracket, &level_gens, bound, options.level_mode) {
            Ok(cert) => LevelOutcome::Preserved(cert),
            Err(_) => match decompose(&bracket, &all_gens, bound, options.level_mode) {
                Ok(cert) => {
                    let into = cert
                        .coefficients
                        .iter()
                        .zip(&labels)
                        .filter(|(coeff, (l, _))| !coeff.is_zero() && *l != level)
                        .map(|(_, label)| label.clone())
                        .collect();
                    LevelOutcome::Mixes {
                        certificate: cert,
                        into,
                    }
                }
                Err(nf) => LevelOutcome::Outside(nf),
            },
        };
        entries.push(LevelEntry {
            constraint: constraint.name.clone(),
            level,
            bracket,
            outcome,
        });
    }
    LevelAction {
        entries,
        include_energy: options.include_energy,
        mode: options.level_mode,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCount {
    pub level: Level,
    pub count: usize,
    pub image_rank: usize,
}

/// Per-level rank of the images `{A, φ}` against the level's size. `None`
/// when level preservation already failed, since counts are then moot.
pub fn check_counts(action: &LevelAction, chain: &ConstraintChain) -> Option<Vec<LevelCount>> {
    if !action.level_preserving() {
        return None;
    }
    Some(
        Level::ALL
            .into_iter()
            .map(|level| LevelCount {
                level,
                count: chain.level(level).len(),
                image_rank: rank(action.entries.iter().filter(|e| e.level == level).map(|e| &e.bracket)),
            })
            .collect(),
    )
}

/// `C[k][i][j]` with `{A_i, A_j} = Σ_k C[k][i][j] A_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub names: Vec<String>,
    c: Vec<Vec<Vec<Rational>>>,
}

impl StructureConstants {
    pub fn zeros(names: Vec<String>) -> Self {
        let n = names.len();
        StructureConstants {
            names,
            c: vec![vec![vec![Rational::zero(); n]; n]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.c[k][i][j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, value: Rational) {
        self.c[k][i][j] = value;
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().flatten().flatten().all(Zero::is_zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|k| (0..n).all(|i| (0..n).all(|j| self.c[k][i][j] == -&self.c[k][j][i])))
    }

    /// `Σ_m (C^m_ij C^l_mk + C^m_jk C^l_mi + C^m_ki C^l_mj) = 0` for all
    /// `i, j, k, l`.
    pub fn satisfies_jacobi(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut sum = Rational::zero();
                        for m in 0..n {
                            sum += &self.c[m][i][j] * &self.c[l][m][k];
                            sum += &self.c[m][j][k] * &self.c[l][m][i];
                            sum += &self.c[m][k][i] * &self.c[l][m][j];
                        }
                        if !sum.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Nonzero `(k, i, j, C^k_ij)` with `i < j`, in index order.
    pub fn nonzero_upper(&self) -> Vec<(usize, usize, usize, Rational)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if !self.c[k][i][j].is_zero() {
                        out.push((k, i, j, self.c[k][i][j].clone()));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub enum Closure {
    Closed(StructureConstants),
    NotClosed {
        left: String,
        right: String,
        bracket: PhasePolynomial,
        /// A decomposition with field-dependent coefficients, if one exists
        /// within the bound; its presence flags non-constant structure
        /// "constants" rather than a plain failure to close.
        field_dependent: Option<IdealDecomposition>,
    },
}

impl Closure {
    pub fn is_closed(&self) -> bool {
        matches!(self, Closure::Closed(_))
    }
}

/// Decomposes each `{A_i, A_j}` over the generators with constant
/// coefficients.
pub fn closure_and_structure_constants(set: &GeneratorSet, degree_bound: Option<u32>) -> Closure {
    let gens: Vec<PhasePolynomial> = set.generators().iter().map(|g| g.poly.clone()).collect();
    let names = set.generators().iter().map(|g| g.name.clone()).collect();
    let mut sc = StructureConstants::zeros(names);
    let n = gens.len();
    for i in 0..n {
        for j in i + 1..n {
            let bracket = gens[i].poisson(&gens[j]).expect("generators share a phase space");
            match decompose(&bracket, &gens, 0, CoefficientMode::Constant) {
                Ok(cert) => {
                    for (k, coeff) in cert.coefficients.iter().enumerate() {
                        let value = coeff.as_constant().expect("constant-mode coefficient");
                        sc.set(k, j, i, -&value);
                        sc.set(k, i, j, value);
                    }
                }
                Err(_) => {
                    let bound = degree_bound.unwrap_or_else(|| default_degree_bound(&bracket, &gens));
                    return Closure::NotClosed {
                        left: set.generators()[i].name.clone(),
                        right: set.generators()[j].name.clone(),
                        field_dependent: decompose(&bracket, &gens, bound, CoefficientMode::Polynomial).ok(),
                        bracket,
                    };
                }
            }
        }
    }
    assert!(
        sc.is_antisymmetric() && sc.satisfies_jacobi(),
        "internal error: structure constants violate antisymmetry or Jacobi"
    );
    Closure::Closed(sc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryClass {
    StrictSymmetry,
    DynamicalSymmetry,
    MixesConstraints,
    NotSymmetry,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::StrictSymmetry => "StrictSymmetry",
            SymmetryClass::DynamicalSymmetry => "DynamicalSymmetry",
            SymmetryClass::MixesConstraints => "MixesConstraints",
            SymmetryClass::NotSymmetry => "NotSymmetry",
        })
    }
}

impl SymmetryClass {
    fn severity(self) -> u8 {
        match self {
            SymmetryClass::StrictSymmetry => 0,
            SymmetryClass::DynamicalSymmetry => 1,
            SymmetryClass::NotSymmetry => 2,
            SymmetryClass::MixesConstraints => 3,
        }
    }

    /// The weaker of two verdicts; constraint mixing dominates.
    pub fn weakest(self, other: SymmetryClass) -> SymmetryClass {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }

    pub fn is_symmetry(self) -> bool {
        matches!(self, SymmetryClass::StrictSymmetry | SymmetryClass::DynamicalSymmetry)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorVerdict {
    pub name: String,
    pub generator: PhasePolynomial,
    pub commutation: Commutation,
    pub level_action: LevelAction,
    pub counts: Option<Vec<LevelCount>>,
}

impl GeneratorVerdict {
    pub fn counts_preserved(&self) -> Option<bool> {
        self.counts
            .as_ref()
            .map(|cs| cs.iter().all(|c| c.image_rank <= c.count))
    }

    pub fn class(&self) -> SymmetryClass {
        if self.level_action.mixing_found() {
            SymmetryClass::MixesConstraints
        } else if self.commutation.class == CommutationClass::Fails
            || self.level_action.outside_found()
            || self.counts_preserved() == Some(false)
        {
            SymmetryClass::NotSymmetry
        } else if self.commutation.class == CommutationClass::OnShell {
            SymmetryClass::DynamicalSymmetry
        } else {
            SymmetryClass::StrictSymmetry
        }
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryVerdict {
    pub set_name: String,
    pub generators: Vec<GeneratorVerdict>,
    pub closure: Closure,
    pub options: CheckOptions,
}

impl SymmetryVerdict {
    pub fn class(&self) -> SymmetryClass {
        let per_generator = self
            .generators
            .iter()
            .fold(SymmetryClass::StrictSymmetry, |acc, g| acc.weakest(g.class()));
        if self.closure.is_closed() {
            per_generator
        } else {
            per_generator.weakest(SymmetryClass::NotSymmetry)
        }
    }

    /// Re-expands every certificate carried by the verdict.
    pub fn certificates_hold(&self) -> bool {
        let closure_ok = match &self.closure {
            Closure::Closed(_) => true,
            Closure::NotClosed { field_dependent, .. } => field_dependent.as_ref().is_none_or(IdealDecomposition::verify),
        };
        closure_ok
            && self.generators.iter().all(|g| {
                g.commutation.result.as_ref().map_or(true, IdealDecomposition::verify)
                    && g.level_action.certificates().all(IdealDecomposition::verify)
            })
    }
}

pub fn classify_generator(name: &str, a: &PhasePolynomial, chain: &ConstraintChain, options: &CheckOptions) -> GeneratorVerdict {
    let commutation = check_dynamical_symmetry(a, chain, options);
    let level_action = check_level_preservation(a, chain, options);
    let counts = check_counts(&level_action, chain);
    GeneratorVerdict {
        name: name.to_string(),
        generator: a.clone(),
        commutation,
        level_action,
        counts,
    }
}

/// Runs every check for every generator and the closure test.
pub fn classify(set: &GeneratorSet, chain: &ConstraintChain, options: &CheckOptions) -> SymmetryVerdict {
    let generators = set
        .generators()
        .iter()
        .map(|g| classify_generator(&g.name, &g.poly, chain, options))
        .collect();
    SymmetryVerdict {
        set_name: set.name.clone(),
        generators,
        closure: closure_and_structure_constants(set, options.degree_bound),
        options: *options,
    }
}
