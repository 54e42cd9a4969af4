//! Primary → secondary → tertiary constraint chains.
//!
//! Brackets of each level with `H_d` are reduced modulo the rational span of
//! the constraints known so far; independent residuals, rescaled to a monic
//! leading term, form the next level. Brackets of tertiaries with `H_d` must
//! vanish weakly, i.e. lie in the ideal of all constraints and `H_d − E`.

use std::fmt;
use std::sync::Arc;

use crate::error::ChainError;
use crate::ideal::{decompose, default_degree_bound, weak_equals, CoefficientMode, IdealDecomposition, NotFound};
use crate::poly::{PhasePolynomial, PhaseSpace, ENERGY, MULTIPLIER_PREFIXES};
use crate::span::LinearSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Primary,
    Secondary,
    Tertiary,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Primary, Level::Secondary, Level::Tertiary];

    pub fn name(self) -> &'static str {
        match self {
            Level::Primary => "primary",
            Level::Secondary => "secondary",
            Level::Tertiary => "tertiary",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub poly: PhasePolynomial,
}

impl Constraint {
    pub fn new(name: impl Into<String>, poly: PhasePolynomial) -> Self {
        Constraint {
            name: name.into(),
            poly,
        }
    }
}

/// `H_d` together with its primary constraints.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    space: Arc<PhaseSpace>,
    hamiltonian: PhasePolynomial,
    primaries: Vec<Constraint>,
}

fn check_independent(
    constraints: &[Constraint],
    span: &mut LinearSpan,
    err: impl Fn(&Constraint) -> ChainError,
) -> Result<(), ChainError> {
    for c in constraints {
        if !span.insert(&c.poly) {
            return Err(err(c));
        }
    }
    Ok(())
}

impl ConstrainedSystem {
    pub fn new(hamiltonian: PhasePolynomial, primaries: Vec<Constraint>) -> Result<Self, ChainError> {
        let space = hamiltonian.space().clone();
        for c in &primaries {
            if c.poly.space() != &space {
                return Err(crate::AlgebraError::MismatchedSpaces.into());
            }
        }
        check_independent(&primaries, &mut LinearSpan::new(), |c| ChainError::DependentPrimaries {
            name: c.name.clone(),
        })?;
        Ok(ConstrainedSystem {
            space,
            hamiltonian,
            primaries,
        })
    }

    pub fn space(&self) -> &Arc<PhaseSpace> {
        &self.space
    }

    pub fn hamiltonian(&self) -> &PhasePolynomial {
        &self.hamiltonian
    }

    pub fn primaries(&self) -> &[Constraint] {
        &self.primaries
    }

    /// `H_d − E`.
    pub fn energy_shell(&self) -> PhasePolynomial {
        let e = PhasePolynomial::symbol(&self.space, ENERGY).expect("E is always declared");
        &self.hamiltonian - &e
    }
}

/// Bracket `{φ, H_d}` of one constraint and its decomposition.
///
/// For primaries and secondaries the decomposition uses constant
/// coefficients over all constraints; for tertiaries it is the weak-zero
/// certificate over all constraints followed by `H_d − E`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRelation {
    pub source: String,
    pub level: Level,
    pub bracket: PhasePolynomial,
    pub decomposition: IdealDecomposition,
}

#[derive(Debug, Clone)]
pub struct ConstraintChain {
    hamiltonian: PhasePolynomial,
    levels: [Vec<Constraint>; 3],
    relations: Vec<ChainRelation>,
    /// `a[i][l]`: coefficient of secondary `l` in `{p_i, H_d}`.
    pub coeff_a: Vec<Vec<PhasePolynomial>>,
    /// `b[i][m]`: coefficient of tertiary `m` in `{p_i, H_d}`.
    pub coeff_b: Vec<Vec<PhasePolynomial>>,
    /// `c[j][q]`: coefficient of tertiary `q` in `{s_j, H_d}`.
    pub coeff_c: Vec<Vec<PhasePolynomial>>,
    pub degree_bound: Option<u32>,
}

/// Settings for the weak-zero test that closes the chain.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChainOptions {
    /// Coefficient degree bound; `None` uses `deg(target) + max deg(φ)`.
    pub degree_bound: Option<u32>,
}

fn reduce_level(
    sources: &[Constraint],
    hamiltonian: &PhasePolynomial,
    span: &mut LinearSpan,
    prefix: &str,
) -> Result<Vec<Constraint>, ChainError> {
    let mut found = Vec::new();
    for source in sources {
        let bracket = source.poly.poisson(hamiltonian)?;
        let residual = span.reduce(&bracket);
        if residual.is_zero() {
            continue;
        }
        if residual.is_phase_constant() {
            return Err(ChainError::Inconsistent {
                source_name: source.name.clone(),
                residual,
            });
        }
        let constraint = residual.monic();
        span.insert(&constraint);
        found.push(Constraint::new(format!("{prefix}{}", found.len() + 1), constraint));
    }
    Ok(found)
}

fn bound_for(options: &ChainOptions, target: &PhasePolynomial, gens: &[PhasePolynomial]) -> u32 {
    options
        .degree_bound
        .unwrap_or_else(|| default_degree_bound(target, gens))
}

impl ConstraintChain {
    /// Runs the chain construction from `system`'s primaries.
    pub fn generate(system: &ConstrainedSystem, options: ChainOptions) -> Result<Self, ChainError> {
        let h = system.hamiltonian();
        let mut span = LinearSpan::new();
        for c in system.primaries() {
            span.insert(&c.poly);
        }
        let secondaries = reduce_level(system.primaries(), h, &mut span, "s")?;
        let tertiaries = reduce_level(&secondaries, h, &mut span, "t")?;
        Self::assemble(
            system,
            [system.primaries().to_vec(), secondaries, tertiaries],
            options,
        )
    }

    /// Builds a chain from explicitly given levels and checks that it closes:
    /// primary and secondary brackets must lie in the rational span of all
    /// constraints, tertiary brackets must vanish weakly.
    pub fn from_levels(
        system: &ConstrainedSystem,
        secondaries: Vec<Constraint>,
        tertiaries: Vec<Constraint>,
        options: ChainOptions,
    ) -> Result<Self, ChainError> {
        let mut span = LinearSpan::new();
        for c in system.primaries() {
            span.insert(&c.poly);
        }
        for (level, cs) in [(Level::Secondary, &secondaries), (Level::Tertiary, &tertiaries)] {
            for c in cs.iter() {
                if c.poly.space() != system.space() {
                    return Err(crate::AlgebraError::MismatchedSpaces.into());
                }
            }
            check_independent(cs, &mut span, |c| ChainError::DependentConstraints {
                level: level.name(),
                name: c.name.clone(),
            })?;
        }
        Self::assemble(
            system,
            [system.primaries().to_vec(), secondaries, tertiaries],
            options,
        )
    }

    fn assemble(
        system: &ConstrainedSystem,
        levels: [Vec<Constraint>; 3],
        options: ChainOptions,
    ) -> Result<Self, ChainError> {
        let h = system.hamiltonian();
        let all: Vec<PhasePolynomial> = levels.iter().flatten().map(|c| c.poly.clone()).collect();
        let mut weak_gens = all.clone();
        weak_gens.push(system.energy_shell());

        let mut relations = Vec::new();
        for level in Level::ALL {
            for c in &levels[level.index()] {
                let bracket = c.poly.poisson(h)?;
                let decomposition = match level {
                    Level::Primary | Level::Secondary => {
                        decompose(&bracket, &all, 0, CoefficientMode::Constant).map_err(|_| {
                            ChainError::NotClosed {
                                source_name: c.name.clone(),
                            }
                        })?
                    }
                    Level::Tertiary => {
                        let bound = bound_for(&options, &bracket, &weak_gens);
                        decompose(&bracket, &weak_gens, bound, CoefficientMode::Polynomial).map_err(
                            |_| {
                                let mut span = LinearSpan::new();
                                all.iter().for_each(|g| {
                                    span.insert(g);
                                });
                                ChainError::BeyondTertiary {
                                    source_name: c.name.clone(),
                                    residual: span.reduce(&bracket),
                                    degree_bound: bound,
                                }
                            },
                        )?
                    }
                };
                relations.push(ChainRelation {
                    source: c.name.clone(),
                    level,
                    bracket,
                    decomposition,
                });
            }
        }

        let (np, ns) = (levels[0].len(), levels[1].len());
        let table = |rel: &ChainRelation, offset: usize, count: usize| -> Vec<PhasePolynomial> {
            rel.decomposition.coefficients[offset..offset + count].to_vec()
        };
        let nt = levels[2].len();
        let coeff_a = relations[..np].iter().map(|r| table(r, np, ns)).collect();
        let coeff_b = relations[..np].iter().map(|r| table(r, np + ns, nt)).collect();
        let coeff_c = relations[np..np + ns]
            .iter()
            .map(|r| table(r, np + ns, nt))
            .collect();

        let chain = ConstraintChain {
            hamiltonian: h.clone(),
            levels,
            relations,
            coeff_a,
            coeff_b,
            coeff_c,
            degree_bound: options.degree_bound,
        };
        assert!(chain.relations_hold(), "internal error: chain relation failed re-expansion");
        Ok(chain)
    }

    pub fn hamiltonian(&self) -> &PhasePolynomial {
        &self.hamiltonian
    }

    pub fn space(&self) -> &Arc<PhaseSpace> {
        self.hamiltonian.space()
    }

    pub fn level(&self, level: Level) -> &[Constraint] {
        &self.levels[level.index()]
    }

    /// `(N_p, N_s, N_t)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.levels[0].len(), self.levels[1].len(), self.levels[2].len())
    }

    /// `N_p ≥ N_s ≥ N_t`. Reported as a warning only.
    pub fn ordering_ok(&self) -> bool {
        let (np, ns, nt) = self.counts();
        np >= ns && ns >= nt
    }

    /// All constraints, level by level.
    pub fn constraints(&self) -> impl Iterator<Item = (Level, &Constraint)> {
        Level::ALL
            .into_iter()
            .flat_map(move |l| self.levels[l.index()].iter().map(move |c| (l, c)))
    }

    pub fn constraint_polys(&self) -> Vec<PhasePolynomial> {
        self.constraints().map(|(_, c)| c.poly.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(Vec::is_empty)
    }

    /// Generators of the weak ideal: all constraints, then `H_d − E` when
    /// `include_energy` is set.
    pub fn weak_generators(&self, include_energy: bool) -> Vec<PhasePolynomial> {
        let mut gens = self.constraint_polys();
        if include_energy {
            let e = PhasePolynomial::symbol(self.space(), ENERGY).expect("E is always declared");
            gens.push(&self.hamiltonian - &e);
        }
        gens
    }

    pub fn relations(&self) -> &[ChainRelation] {
        &self.relations
    }

    /// Terms of a primary or secondary bracket that fall on its own or a
    /// lower level, outside the pattern `{p, H} = a·s + b·t`, `{s, H} = c·t`.
    pub fn off_pattern_terms(&self) -> Vec<(String, String, PhasePolynomial)> {
        let names: Vec<(Level, &str)> = self.constraints().map(|(l, c)| (l, c.name.as_str())).collect();
        let mut out = Vec::new();
        for rel in &self.relations {
            if rel.level == Level::Tertiary {
                continue;
            }
            for (coeff, (level, name)) in rel.decomposition.coefficients.iter().zip(&names) {
                if *level <= rel.level && !coeff.is_zero() {
                    out.push((rel.source.clone(), name.to_string(), coeff.clone()));
                }
            }
        }
        out
    }

    /// Re-expands every recorded relation and the coefficient tables.
    pub fn relations_hold(&self) -> bool {
        let polys = |l: Level| -> Vec<PhasePolynomial> {
            self.level(l).iter().map(|c| c.poly.clone()).collect()
        };
        let (sec, ter) = (polys(Level::Secondary), polys(Level::Tertiary));
        let combo = |coeffs: &[PhasePolynomial], gens: &[PhasePolynomial]| {
            coeffs
                .iter()
                .zip(gens)
                .fold(PhasePolynomial::zero(self.space()), |acc, (a, g)| &acc + &(a * g))
        };
        let off = self.off_pattern_terms();
        let tables_ok = self.relations.iter().all(|rel| {
            let (np, ns) = (self.levels[0].len(), self.levels[1].len());
            let idx = self
                .constraints()
                .position(|(_, c)| c.name == rel.source)
                .expect("relation source is a constraint");
            let lower = off
                .iter()
                .filter(|(src, _, _)| src == &rel.source)
                .count();
            match rel.level {
                Level::Primary if lower == 0 => {
                    let i = idx;
                    rel.bracket == &combo(&self.coeff_a[i], &sec) + &combo(&self.coeff_b[i], &ter)
                }
                Level::Secondary if lower == 0 => {
                    let j = idx - np;
                    debug_assert!(j < ns);
                    rel.bracket == combo(&self.coeff_c[j], &ter)
                }
                _ => true,
            }
        });
        tables_ok
            && self
                .relations
                .iter()
                .all(|rel| rel.decomposition.verify() && rel.decomposition.target == rel.bracket)
    }

    /// Pairwise first-class test of all constraints modulo the weak ideal.
    pub fn first_class_check(&self, degree_bound: Option<u32>, include_energy: bool) -> FirstClassReport {
        let gens = self.weak_generators(include_energy);
        let all: Vec<&Constraint> = self.constraints().map(|(_, c)| c).collect();
        let mut pairs = Vec::new();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                let bracket = a.poly.poisson(&b.poly).expect("chain constraints share a space");
                let bound = degree_bound.unwrap_or_else(|| default_degree_bound(&bracket, &gens));
                let result = decompose(&bracket, &gens, bound, CoefficientMode::Polynomial);
                pairs.push(PairCheck {
                    left: a.name.clone(),
                    right: b.name.clone(),
                    bracket,
                    result,
                });
            }
        }
        FirstClassReport {
            pairs,
            include_energy,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairCheck {
    pub left: String,
    pub right: String,
    pub bracket: PhasePolynomial,
    pub result: Result<IdealDecomposition, NotFound>,
}

#[derive(Debug, Clone)]
pub struct FirstClassReport {
    pub pairs: Vec<PairCheck>,
    pub include_energy: bool,
}

impl FirstClassReport {
    pub fn all_first_class(&self) -> bool {
        self.pairs.iter().all(|p| p.result.is_ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairCheck> {
        self.pairs.iter().filter(|p| p.result.is_err())
    }
}

/// `H_tot = H_d + Σ v_i p_i + Σ u_j s_j + Σ w_k t_k` on the space extended
/// by the multipliers.
#[derive(Debug, Clone)]
pub struct TotalHamiltonian {
    pub space: Arc<PhaseSpace>,
    pub hamiltonian: PhasePolynomial,
    pub total: PhasePolynomial,
    /// `(multiplier, constraint name)` in level order.
    pub multipliers: Vec<(String, String)>,
    /// `H_tot − H_d` decomposed over the constraints.
    pub weak_certificate: IdealDecomposition,
}

pub fn assemble_total_hamiltonian(chain: &ConstraintChain) -> TotalHamiltonian {
    let (np, ns, nt) = chain.counts();
    let space = chain.space().with_multipliers([np, ns, nt]);
    let lift = |f: &PhasePolynomial| f.lift(&space).expect("multiplier space extends the base");
    let hamiltonian = lift(chain.hamiltonian());
    let mut total = hamiltonian.clone();
    let mut multipliers = Vec::new();
    for level in Level::ALL {
        let prefix = MULTIPLIER_PREFIXES[level.index()];
        for (i, c) in chain.level(level).iter().enumerate() {
            let name = format!("{prefix}{}", i + 1);
            let m = PhasePolynomial::symbol(&space, &name).expect("multiplier declared");
            total = &total + &(&m * &lift(&c.poly));
            multipliers.push((name, c.name.clone()));
        }
    }
    let constraints: Vec<PhasePolynomial> = chain.constraint_polys().iter().map(lift).collect();
    let bound = default_degree_bound(&(&total - &hamiltonian), &constraints);
    let weak_certificate = weak_equals(&total, &hamiltonian, &constraints, bound)
        .expect("H_tot - H_d is a multiplier combination of the constraints");
    TotalHamiltonian {
        space,
        hamiltonian,
        total,
        multipliers,
        weak_certificate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::poly::int;

    fn system(n: usize, h: &str, primaries: &[&str]) -> ConstrainedSystem {
        let s = PhaseSpace::new(n, Vec::<String>::new()).unwrap();
        let h = parse(h, &s).unwrap();
        let ps = primaries
            .iter()
            .enumerate()
            .map(|(i, t)| Constraint::new(format!("phi{}", i + 1), parse(t, &s).unwrap()))
            .collect();
        ConstrainedSystem::new(h, ps).unwrap()
    }

    fn polys(chain: &ConstraintChain, level: Level) -> Vec<String> {
        chain.level(level).iter().map(|c| c.poly.to_string()).collect()
    }

    #[test]
    fn three_level_chain() {
        // {p1, q1p2 + q2p3} = -p2, {p2, .} = -p3, {p3, .} = 0
        let sys = system(3, "q1*p2 + q2*p3", &["p1"]);
        let chain = ConstraintChain::generate(&sys, ChainOptions::default()).unwrap();
        assert_eq!(chain.counts(), (1, 1, 1));
        assert_eq!(polys(&chain, Level::Secondary), ["p2"]);
        assert_eq!(polys(&chain, Level::Tertiary), ["p3"]);
        let s = chain.space().clone();
        assert_eq!(chain.coeff_a[0][0], PhasePolynomial::constant(&s, int(-1)));
        assert_eq!(chain.coeff_c[0][0], PhasePolynomial::constant(&s, int(-1)));
        assert!(chain.coeff_b[0][0].is_zero());
        assert!(chain.relations()[2].bracket.is_zero());
        assert!(chain.ordering_ok());
        assert!(chain.off_pattern_terms().is_empty());
    }

    #[test]
    fn cyclic_coordinate_has_no_secondaries() {
        let sys = system(2, "p1^2/2", &["p2"]);
        let chain = ConstraintChain::generate(&sys, ChainOptions::default()).unwrap();
        assert_eq!(chain.counts(), (1, 0, 0));
    }

    #[test]
    fn dependent_primaries_rejected() {
        let s = PhaseSpace::new(1, Vec::<String>::new()).unwrap();
        let q = PhasePolynomial::q(&s, 1);
        let err = ConstrainedSystem::new(
            PhasePolynomial::p(&s, 1),
            vec![Constraint::new("a", q.clone()), Constraint::new("b", q.scale(&int(2)))],
        )
        .unwrap_err();
        assert_eq!(err, ChainError::DependentPrimaries { name: "b".into() });
        let err = ConstrainedSystem::new(q.clone(), vec![Constraint::new("z", PhasePolynomial::zero(&s))])
            .unwrap_err();
        assert!(matches!(err, ChainError::DependentPrimaries { .. }));
    }

    #[test]
    fn constant_residual_is_inconsistent() {
        let sys = system(1, "q1", &["p1"]);
        match ConstraintChain::generate(&sys, ChainOptions::default()).unwrap_err() {
            ChainError::Inconsistent { source_name, residual } => {
                assert_eq!(source_name, "phi1");
                assert_eq!(residual.to_string(), "-1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn four_level_chain_is_beyond_tertiary() {
        let sys = system(4, "q1*p2 + q2*p3 + q3*p4", &["p1"]);
        match ConstraintChain::generate(&sys, ChainOptions::default()).unwrap_err() {
            ChainError::BeyondTertiary { source_name, residual, .. } => {
                assert_eq!(source_name, "t1");
                assert_eq!(residual.to_string(), "-p4");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn idempotent_on_full_constraint_set() {
        let sys = system(3, "q1*p2 + q2*p3", &["p1", "p2", "p3"]);
        let chain = ConstraintChain::generate(&sys, ChainOptions::default()).unwrap();
        assert_eq!(chain.counts(), (3, 0, 0));
    }

    #[test]
    fn mixed_residual_is_reduced_before_normalizing() {
        // {p1, H} = -(2 p1 + 3 p2): the p1 part is absorbed, secondary p2
        let sys = system(2, "2*q1*p1 + 3*q1*p2", &["p1"]);
        let chain = ConstraintChain::generate(&sys, ChainOptions::default()).unwrap();
        assert_eq!(polys(&chain, Level::Secondary), ["p2"]);
        assert_eq!(chain.off_pattern_terms().len(), 1);
        assert!(chain.relations_hold());
    }

    #[test]
    fn explicit_levels_are_validated() {
        let sys = system(3, "q1*p2 + q2*p3", &["p1"]);
        let s = sys.space().clone();
        let c = |n: &str, t: &str| Constraint::new(n, parse(t, &s).unwrap());
        let chain = ConstraintChain::from_levels(
            &sys,
            vec![c("s1", "-2*p2")],
            vec![c("t1", "p3/5")],
            ChainOptions::default(),
        )
        .unwrap();
        assert_eq!(chain.coeff_a[0][0], PhasePolynomial::constant(&s, crate::poly::rat(1, 2)));
        let missing = ConstraintChain::from_levels(&sys, vec![c("s1", "p2")], vec![], ChainOptions::default());
        assert_eq!(missing.unwrap_err(), ChainError::NotClosed { source_name: "s1".into() });
        let dup = ConstraintChain::from_levels(&sys, vec![c("s1", "p1")], vec![], ChainOptions::default());
        assert!(matches!(dup.unwrap_err(), ChainError::DependentConstraints { level: "secondary", .. }));
    }

    #[test]
    fn total_hamiltonian_for_three_levels() {
        let sys = system(3, "q1*p2 + q2*p3", &["p1"]);
        let chain = ConstraintChain::generate(&sys, ChainOptions::default()).unwrap();
        let tot = assemble_total_hamiltonian(&chain);
        let expected = parse("q1*p2 + q2*p3 + v1*p1 + u1*p2 + w1*p3", &tot.space).unwrap();
        assert_eq!(tot.total, expected);
        assert!(tot.weak_certificate.verify());
        let names: Vec<_> = tot.multipliers.iter().map(|(m, _)| m.as_str()).collect();
        assert_eq!(names, ["v1", "u1", "w1"]);
    }

    #[test]
    fn total_hamiltonian_without_constraints() {
        let sys = system(1, "p1^2/2 + q1^2/2", &[]);
        let chain = ConstraintChain::generate(&sys, ChainOptions::default()).unwrap();
        let tot = assemble_total_hamiltonian(&chain);
        assert_eq!(tot.total, tot.hamiltonian);
        assert!(tot.weak_certificate.is_trivial());
    }

    #[test]
    fn first_class_checks() {
        let sys = system(3, "q1*p2 + q2*p3", &["p1"]);
        let chain = ConstraintChain::generate(&sys, ChainOptions::default()).unwrap();
        let report = chain.first_class_check(None, true);
        assert_eq!(report.pairs.len(), 3);
        assert!(report.all_first_class());

        let sys = system(1, "p1^2/2 + q1^2/2", &["q1", "p1"]);
        let chain = ConstraintChain::generate(&sys, ChainOptions::default()).unwrap();
        let report = chain.first_class_check(None, true);
        let failures: Vec<_> = report.failures().map(|p| (p.left.as_str(), p.right.as_str())).collect();
        assert_eq!(failures, [("phi1", "phi2")]);
    }
}
