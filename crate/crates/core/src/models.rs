//! Ready-made constrained systems with their expected analysis results.

use crate::chain::{ConstrainedSystem, Constraint};
use crate::expr::parse;
use crate::modelfile::{Model, ModelOptions};
use crate::poly::{int, PhasePolynomial, PhaseSpace};
use crate::symmetry::{classify, GeneratorSet, SymmetryClass};

/// What the full pipeline must report for a shipped model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    /// `(N_p, N_s, N_t)`.
    pub counts: (usize, usize, usize),
    pub first_class: bool,
    /// Verdict per generator set, in set order.
    pub verdicts: Vec<(String, SymmetryClass)>,
}

#[derive(Debug, Clone)]
pub struct ModelDescriptor {
    pub name: String,
    pub model: Model,
    pub expected: Expected,
}

impl ModelDescriptor {
    /// Runs chain generation, the first-class test and every generator set,
    /// comparing against the expectations.
    pub fn self_test(&self) -> Result<(), String> {
        let chain = self.model.chain().map_err(|e| e.to_string())?;
        if chain.counts() != self.expected.counts {
            return Err(format!(
                "{}: counts {:?}, expected {:?}",
                self.name,
                chain.counts(),
                self.expected.counts
            ));
        }
        let opts = self.model.options;
        let fc = chain
            .first_class_check(opts.degree_bound, opts.on_shell_energy)
            .all_first_class();
        if fc != self.expected.first_class {
            return Err(format!("{}: first class = {fc}", self.name));
        }
        for (set, (name, want)) in self.model.generator_sets.iter().zip(&self.expected.verdicts) {
            let got = classify(set, &chain, &opts.check_options()).class();
            if set.name != *name || got != *want {
                return Err(format!("{}: set `{}` is {got}, expected {want}", self.name, set.name));
            }
        }
        Ok(())
    }
}

fn named(space: &std::sync::Arc<PhaseSpace>, items: &[(&str, &str)]) -> Vec<Constraint> {
    items
        .iter()
        .map(|(n, t)| Constraint::new(*n, parse(t, space).expect("library expression")))
        .collect()
}

fn build(
    name: &str,
    hamiltonian: PhasePolynomial,
    primaries: Vec<Constraint>,
    sets: Vec<(&str, Vec<Constraint>)>,
) -> Model {
    let system = ConstrainedSystem::new(hamiltonian, primaries).expect("library system is valid");
    let generator_sets = sets
        .into_iter()
        .map(|(n, gens)| GeneratorSet::new(n, gens).expect("library generators are independent"))
        .collect();
    Model {
        name: Some(name.to_string()),
        system,
        explicit_levels: None,
        generator_sets,
        options: ModelOptions::default(),
    }
}

/// Three-dimensional isotropic oscillator with the angular momenta.
pub fn central_oscillator() -> ModelDescriptor {
    let space = PhaseSpace::new(3, Vec::<String>::new()).unwrap();
    let h = parse("(p1^2 + p2^2 + p3^2)/2 + (q1^2 + q2^2 + q3^2)/2", &space).unwrap();
    let so3 = named(
        &space,
        &[("Lx", "q2*p3 - q3*p2"), ("Ly", "q3*p1 - q1*p3"), ("Lz", "q1*p2 - q2*p1")],
    );
    ModelDescriptor {
        name: "central_oscillator".into(),
        model: build("central_oscillator", h, vec![], vec![("so3", so3)]),
        expected: Expected {
            counts: (0, 0, 0),
            first_class: true,
            verdicts: vec![("so3".into(), SymmetryClass::StrictSymmetry)],
        },
    }
}

/// `H_d = q1 p2 + q2 p3` with primary `p1`: the chain `p1 → p2 → p3`.
pub fn three_level_chain() -> ModelDescriptor {
    let space = PhaseSpace::new(3, Vec::<String>::new()).unwrap();
    let h = parse("q1*p2 + q2*p3", &space).unwrap();
    let primaries = named(&space, &[("phi1", "p1")]);
    ModelDescriptor {
        name: "three_level_chain".into(),
        model: build(
            "three_level_chain",
            h,
            primaries,
            vec![
                ("good", named(&space, &[("D", "q1*p1")])),
                ("bad", named(&space, &[("M", "q2*p1")])),
            ],
        ),
        expected: Expected {
            counts: (1, 1, 1),
            first_class: true,
            verdicts: vec![
                ("good".into(), SymmetryClass::DynamicalSymmetry),
                ("bad".into(), SymmetryClass::MixesConstraints),
            ],
        },
    }
}

/// Canonical indices of one truncated electromagnetic mode `k` (1-based):
/// scalar potential, longitudinal and transverse vector potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmMode {
    pub scalar: usize,
    pub longitudinal: usize,
    pub transverse: usize,
}

pub fn em_mode(k: usize) -> EmMode {
    EmMode {
        scalar: 3 * k - 2,
        longitudinal: 3 * k - 1,
        transverse: 3 * k,
    }
}

/// Free electromagnetic field truncated to `n` modes with wave numbers
/// `k = 1..n`.
///
/// Mode `k` uses three canonical pairs (see [`em_mode`]):
/// `(a0, π0)`, `(aL, πL)`, `(aT, πT)`, and contributes
/// `πL²/2 + k·a0·πL + πT²/2 + k²·aT²/2` to `H_d`. The primaries are the `π0`;
/// their brackets give the Gauss modes `πL`, which commute with `H_d`.
///
/// Returns `None` for `n = 0`.
pub fn em_modes(n: usize) -> Option<ModelDescriptor> {
    if n == 0 {
        return None;
    }
    let space = PhaseSpace::new(3 * n, Vec::<String>::new()).unwrap();
    let q = |i| PhasePolynomial::q(&space, i);
    let p = |i| PhasePolynomial::p(&space, i);
    let half = crate::poly::rat(1, 2);

    let mut h = PhasePolynomial::zero(&space);
    let mut primaries = Vec::new();
    let mut gauge = Vec::new();
    for k in 1..=n {
        let m = em_mode(k);
        let kk = int(k as i64);
        h = &h + &(&p(m.longitudinal) * &p(m.longitudinal)).scale(&half);
        h = &h + &(&q(m.scalar) * &p(m.longitudinal)).scale(&kk);
        h = &h + &(&p(m.transverse) * &p(m.transverse)).scale(&half);
        h = &h + &(&q(m.transverse) * &q(m.transverse)).scale(&(&kk * &kk * &half));
        primaries.push(Constraint::new(format!("pi0_{k}"), p(m.scalar)));
    }
    gauge.extend(primaries.iter().cloned());
    for k in 1..=n {
        gauge.push(Constraint::new(format!("G_{k}"), p(em_mode(k).longitudinal)));
    }
    let m1 = em_mode(1);
    let dressed = vec![Constraint::new(
        "G_1_aT_1",
        &p(m1.longitudinal) * &q(m1.transverse),
    )];

    let name = format!("em_modes_{n}");
    Some(ModelDescriptor {
        name: name.clone(),
        model: build(
            &name,
            h,
            primaries,
            vec![("gauge", gauge), ("dressed_gauss", dressed)],
        ),
        expected: Expected {
            counts: (n, n, 0),
            first_class: true,
            verdicts: vec![
                ("gauge".into(), SymmetryClass::DynamicalSymmetry),
                ("dressed_gauss".into(), SymmetryClass::DynamicalSymmetry),
            ],
        },
    })
}

/// Every shipped model: the oscillator, the three-level chain and
/// `em_modes(1..=3)`.
pub fn library() -> Vec<ModelDescriptor> {
    let mut models = vec![central_oscillator(), three_level_chain()];
    models.extend((1..=3).filter_map(em_modes));
    models
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Level;

    #[test]
    fn em_modes_hamiltonian_text() {
        let d = em_modes(1).unwrap();
        assert_eq!(
            d.model.system.hamiltonian().to_string(),
            "q1*p2 + 1/2*q3^2 + 1/2*p2^2 + 1/2*p3^2"
        );
        assert!(em_modes(0).is_none());
    }

    #[test]
    fn em_gauss_modes_carry_wave_number() {
        let d = em_modes(3).unwrap();
        let chain = d.model.chain().unwrap();
        assert_eq!(chain.counts(), (3, 3, 0));
        assert!(chain.ordering_ok());
        for k in 1..=3 {
            let s = &chain.level(Level::Secondary)[k - 1];
            assert_eq!(s.poly, PhasePolynomial::p(chain.space(), em_mode(k).longitudinal));
            assert_eq!(chain.coeff_a[k - 1][k - 1], PhasePolynomial::constant(chain.space(), int(-(k as i64))));
        }
    }

    #[test]
    fn library_self_tests() {
        for d in library() {
            d.self_test().unwrap();
        }
    }
}
