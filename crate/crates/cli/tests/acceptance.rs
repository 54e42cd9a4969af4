//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//!     cargo test -p dirac-symmetry --test acceptance

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dirac_core::chain::Level;
use dirac_core::models::{central_oscillator, em_modes, library, three_level_chain};
use dirac_core::poly::{format_rational_fraction, int, parse_rational, rat, Monomial};
use dirac_core::symmetry::{classify_generator, CommutationClass};
use dirac_core::{
    classify, decompose, parse, CoefficientMode, ConstrainedSystem, Constraint, ConstraintChain, GeneratorSet,
    Model, PhasePolynomial, PhaseSpace, Rational, SymmetryClass,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pb(f: &PhasePolynomial, g: &PhasePolynomial) -> PhasePolynomial {
    f.poisson(g).unwrap()
}

/// Random polynomial over the canonical variables: up to `max_terms` terms,
/// each of total degree ≤ `max_degree`, coefficients in [-9, 9].
fn random_poly(rng: &mut ChaCha8Rng, space: &Arc<PhaseSpace>, max_degree: u32, max_terms: usize) -> PhasePolynomial {
    let canonical = 2 * space.n_dof();
    let terms = rng.gen_range(0..=max_terms);
    let mut out = PhasePolynomial::zero(space);
    for _ in 0..terms {
        let mut exps = vec![0u32; space.n_vars()];
        for _ in 0..rng.gen_range(0..=max_degree) {
            exps[rng.gen_range(0..canonical)] += 1;
        }
        let c = int(rng.gen_range(-9..=9));
        out = &out + &PhasePolynomial::monomial(space, Monomial::from_exponents(exps), c);
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spaces: Vec<_> = (1..=3).map(|n| PhaseSpace::new(n, Vec::<String>::new()).unwrap()).collect();
    let triples = 1000;
    for t in 0..triples {
        let s = &spaces[rng.gen_range(0..3)];
        let f = random_poly(&mut rng, s, 4, 4);
        let g = random_poly(&mut rng, s, 4, 4);
        let h = random_poly(&mut rng, s, 4, 4);
        let (a, b) = (rat(rng.gen_range(-9..=9), rng.gen_range(1..=9)), int(rng.gen_range(-9..=9)));
        ensure(pb(&f, &g) == -&pb(&g, &f), || format!("antisymmetry fails on triple {t}"))?;
        let combo = &f.scale(&a) + &g.scale(&b);
        ensure(pb(&combo, &h) == &pb(&f, &h).scale(&a) + &pb(&g, &h).scale(&b), || {
            format!("bilinearity fails on triple {t}")
        })?;
        ensure(pb(&f, &(&g * &h)) == &(&pb(&f, &g) * &h) + &(&g * &pb(&f, &h)), || {
            format!("Leibniz fails on triple {t}")
        })?;
        let jacobi = &(&pb(&f, &pb(&g, &h)) + &pb(&g, &pb(&h, &f))) + &pb(&h, &pb(&f, &g));
        ensure(jacobi.is_zero(), || format!("Jacobi fails on triple {t}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{triples} triples, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let s = PhaseSpace::new(4, Vec::<String>::new()).unwrap();
    for i in 1..=4 {
        for j in 1..=4 {
            let (qi, pi) = (PhasePolynomial::q(&s, i), PhasePolynomial::p(&s, i));
            let (qj, pj) = (PhasePolynomial::q(&s, j), PhasePolynomial::p(&s, j));
            let delta = PhasePolynomial::constant(&s, int(i64::from(i == j)));
            ensure(pb(&qi, &pj) == delta, || format!("{{q{i}, p{j}}} wrong"))?;
            ensure(pb(&qi, &qj).is_zero() && pb(&pi, &pj).is_zero(), || format!("pair ({i}, {j}) wrong"))?;
        }
    }
    Ok("48 relations for i, j <= 4".into())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spaces: Vec<_> = (1..=3).map(|n| PhaseSpace::new(n, Vec::<String>::new()).unwrap()).collect();
    let instances = 500;
    let mut done = 0;
    while done < instances {
        let s = &spaces[rng.gen_range(0..3)];
        let k = rng.gen_range(1..=3);
        let gens: Vec<_> = (0..k).map(|_| random_poly(&mut rng, s, 2, 3)).collect();
        if gens.iter().any(PhasePolynomial::is_zero) {
            continue;
        }
        let coeffs: Vec<_> = (0..k).map(|_| random_poly(&mut rng, s, 3, 3)).collect();
        let target = gens
            .iter()
            .zip(&coeffs)
            .fold(PhasePolynomial::zero(s), |acc, (g, f)| &acc + &(f * g));
        let cert = decompose(&target, &gens, 3, CoefficientMode::Polynomial)
            .map_err(|e| format!("instance {done}: {e}"))?;
        ensure(cert.verify() && cert.expand() == target, || format!("instance {done}: bad certificate"))?;
        done += 1;
    }
    Ok(format!("{instances} instances, {:.2?}", start.elapsed()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let d = three_level_chain();
    let chain = d.model.chain().map_err(|e| e.to_string())?;
    let s = chain.space().clone();
    let p = |i| PhasePolynomial::p(&s, i);
    let minus_one = PhasePolynomial::constant(&s, int(-1));
    ensure(chain.counts() == (1, 1, 1), || format!("counts {:?}", chain.counts()))?;
    ensure(chain.ordering_ok(), || "ordering flag false".into())?;
    ensure(chain.coeff_a[0][0] == minus_one, || format!("a_11 = {}", chain.coeff_a[0][0]))?;
    ensure(chain.coeff_c[0][0] == minus_one, || format!("c_11 = {}", chain.coeff_c[0][0]))?;
    // hand-expanded brackets: {p1, H} = -p2, {p2, H} = -p3, {p3, H} = 0
    let h = chain.hamiltonian();
    ensure(pb(&p(1), h) == -&p(2) && pb(&p(2), h) == -&p(3), || "bracket fixtures differ".into())?;
    let t = &chain.level(Level::Tertiary)[0].poly;
    ensure(*t == p(3) && pb(t, h).is_zero(), || "tertiary bracket is not exactly zero".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("(1, 1, 1), a_11 = c_11 = -1, {elapsed:.2?}"))
}

fn criterion_5() -> Outcome {
    let mut last = Duration::ZERO;
    for n in 1..=5 {
        let start = Instant::now();
        let d = em_modes(n).unwrap();
        let chain = d.model.chain().map_err(|e| e.to_string())?;
        ensure(chain.counts() == (n, n, 0), || format!("n = {n}: counts {:?}", chain.counts()))?;
        ensure(chain.first_class_check(None, true).all_first_class(), || format!("n = {n}: second class pair"))?;
        let gauge = d.model.generator_set("gauge").unwrap();
        let verdict = classify(gauge, &chain, &d.model.options.check_options());
        ensure(verdict.class() == SymmetryClass::DynamicalSymmetry, || {
            format!("n = {n}: gauge set is {}", verdict.class())
        })?;
        match &verdict.closure {
            dirac_core::Closure::Closed(sc) if sc.is_abelian() => {}
            _ => return Err(format!("n = {n}: structure constants not identically zero")),
        }
        last = start.elapsed();
    }
    ensure(last < Duration::from_secs(10), || format!("n = 5 took {last:?}"))?;
    Ok(format!("n = 1..5, n = 5 in {last:.2?}"))
}

fn criterion_6() -> Outcome {
    let d = central_oscillator();
    let chain = d.model.chain().map_err(|e| e.to_string())?;
    let set = d.model.generator_set("so3").unwrap();
    let verdict = classify(set, &chain, &d.model.options.check_options());
    ensure(verdict.class() == SymmetryClass::StrictSymmetry, || format!("verdict {}", verdict.class()))?;
    let dirac_core::Closure::Closed(sc) = &verdict.closure else {
        return Err("so(3) did not close".into());
    };
    let l: Vec<&PhasePolynomial> = set.generators().iter().map(|g| &g.poly).collect();
    let epsilon = |i: usize, j: usize, k: usize| -> i64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
            _ => 0,
        }
    };
    for i in 0..3 {
        for j in 0..3 {
            // brute-force oracle: the bracket itself against Σ ε_ijk L_k
            let expected = (0..3).fold(PhasePolynomial::zero(chain.space()), |acc, k| {
                &acc + &l[k].scale(&int(epsilon(i, j, k)))
            });
            ensure(pb(l[i], l[j]) == expected, || format!("{{L{i}, L{j}}} oracle mismatch"))?;
            for k in 0..3 {
                ensure(*sc.get(k, i, j) == int(epsilon(i, j, k)), || format!("C[{k}][{i}][{j}] wrong"))?;
            }
        }
    }
    ensure(sc.is_antisymmetric() && sc.satisfies_jacobi(), || "antisymmetry or Jacobi fails".into())?;
    Ok("StrictSymmetry, C = epsilon".into())
}

fn criterion_7() -> Outcome {
    let d = em_modes(1).unwrap();
    let chain = d.model.chain().map_err(|e| e.to_string())?;
    let g = &d.model.generator_set("dressed_gauss").unwrap().generators()[0];
    let verdict = classify_generator(&g.name, &g.poly, &chain, &d.model.options.check_options());
    let c = &verdict.commutation;
    ensure(!c.bracket.is_zero(), || "bracket vanishes identically".into())?;
    ensure(c.class == CommutationClass::OnShell, || format!("commutation {}", c.class))?;
    let cert = c.result.as_ref().map_err(|e| e.to_string())?;
    ensure(cert.verify() && cert.expand() == c.bracket, || "certificate does not re-expand".into())?;
    ensure(verdict.class() == SymmetryClass::DynamicalSymmetry, || format!("verdict {}", verdict.class()))?;
    Ok(format!("{{{}, H_d}} = {} is OnShell, not Strict", g.name, c.bracket))
}

fn criterion_8() -> Outcome {
    let d = three_level_chain();
    let chain = d.model.chain().map_err(|e| e.to_string())?;
    let opts = d.model.options.check_options();
    let s = chain.space();
    let bad = classify_generator("M", &parse("q2*p1", s).unwrap(), &chain, &opts);
    ensure(bad.class() == SymmetryClass::MixesConstraints, || format!("q2*p1 is {}", bad.class()))?;
    let pairs = bad.level_action.offending_pairs();
    let named = pairs.iter().any(|p| {
        p.constraint == "s1" && p.from == Level::Secondary && p.into.contains(&(Level::Primary, "phi1".into()))
    });
    ensure(named, || format!("offending pairs {pairs:?}"))?;
    let good = classify_generator("D", &parse("q1*p1", s).unwrap(), &chain, &opts);
    ensure(good.level_action.level_preserving(), || "q1*p1 is not level preserving".into())?;
    Ok("q2*p1 mixes s1 (secondary) into phi1 (primary); q1*p1 preserves levels".into())
}

fn random_nonzero_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-7..=7);
    }
    rat(n, rng.gen_range(1..=5))
}

/// Applies an invertible rational matrix `L·U` (unit-diagonal factors up to
/// a nonzero diagonal) to a list of constraints, keeping the names.
fn recombine(rng: &mut ChaCha8Rng, cs: &[Constraint]) -> Vec<Constraint> {
    let n = cs.len();
    let mut mixed: Vec<PhasePolynomial> = cs.iter().map(|c| c.poly.scale(&random_nonzero_rational(rng))).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(0.5) {
                let c = int(rng.gen_range(-3..=3));
                mixed[i] = &mixed[i] + &mixed[j].scale(&c);
            }
        }
    }
    cs.iter().zip(mixed).map(|(c, p)| Constraint::new(c.name.clone(), p)).collect()
}

fn verdicts(model: &Model, chain: &ConstraintChain, sets: &[GeneratorSet]) -> Vec<(SymmetryClass, Vec<SymmetryClass>)> {
    sets.iter()
        .map(|set| {
            let v = classify(set, chain, &model.options.check_options());
            (v.class(), v.generators.iter().map(|g| g.class()).collect())
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checks = 0;
    for d in library() {
        let model = &d.model;
        let chain = model.chain().map_err(|e| e.to_string())?;
        let base = verdicts(model, &chain, &model.generator_sets);
        let fc = chain.first_class_check(None, true).all_first_class();

        for _ in 0..2 {
            let scaled: Vec<GeneratorSet> = model
                .generator_sets
                .iter()
                .map(|set| {
                    let gens = set
                        .generators()
                        .iter()
                        .map(|g| Constraint::new(g.name.clone(), g.poly.scale(&random_nonzero_rational(&mut rng))))
                        .collect();
                    GeneratorSet::new(set.name.clone(), gens).unwrap()
                })
                .collect();
            ensure(verdicts(model, &chain, &scaled) == base, || format!("{}: rescaling changed a verdict", d.name))?;

            let system = ConstrainedSystem::new(
                model.system.hamiltonian().clone(),
                recombine(&mut rng, chain.level(Level::Primary)),
            )
            .map_err(|e| e.to_string())?;
            let mixed = ConstraintChain::from_levels(
                &system,
                recombine(&mut rng, chain.level(Level::Secondary)),
                recombine(&mut rng, chain.level(Level::Tertiary)),
                model.options.chain_options(),
            )
            .map_err(|e| format!("{}: recombined chain rejected: {e}", d.name))?;
            ensure(mixed.counts() == chain.counts(), || format!("{}: counts changed", d.name))?;
            ensure(mixed.first_class_check(None, true).all_first_class() == fc, || {
                format!("{}: first-class result changed", d.name)
            })?;
            ensure(verdicts(model, &mixed, &model.generator_sets) == base, || {
                format!("{}: level recombination changed a verdict", d.name)
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} rescaled and recombined variants over {} models", library().len()))
}

const COMMANDS: [&str; 5] = ["chain", "total-hamiltonian", "first-class", "check-symmetry", "structure-constants"];

fn run_cli(args: &[&str]) -> (Option<i32>, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_dirac-symmetry"))
        .args(args)
        .env_remove("DIRAC_SYMMETRY_COLOR")
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout, out.stderr)
}

/// Every "n/d" string in a report parses and prints back unchanged.
fn fraction_strings(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) if s.contains('/') && parse_rational(s).is_some() => out.push(s.clone()),
        Value::Array(items) => items.iter().for_each(|i| fraction_strings(i, out)),
        Value::Object(map) => map.values().for_each(|i| fraction_strings(i, out)),
        _ => {}
    }
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models");
    let mut runs = 0;
    for d in library() {
        let text = d.model.to_toml();
        let committed = std::fs::read_to_string(shipped.join(format!("{}.toml", d.name))).unwrap_or_default();
        ensure(committed == text, || format!("models/{}.toml is out of date", d.name))?;

        // export and re-ingest
        let again = Model::from_toml(&text).map_err(|e| format!("{}: {e}", d.name))?;
        ensure(again.to_toml() == text, || format!("{}: export is not a fixed point", d.name))?;
        let (c1, c2) = (d.model.chain().unwrap(), again.chain().unwrap());
        let same_chain = c1.counts() == c2.counts()
            && c1.constraints().zip(c2.constraints()).all(|(a, b)| a.0 == b.0 && a.1 == b.1)
            && c1.coeff_a == c2.coeff_a
            && c1.coeff_b == c2.coeff_b
            && c1.coeff_c == c2.coeff_c;
        ensure(same_chain, || format!("{}: re-ingested chain differs", d.name))?;
        ensure(
            verdicts(&d.model, &c1, &d.model.generator_sets) == verdicts(&again, &c2, &again.generator_sets),
            || format!("{}: re-ingested verdicts differ", d.name),
        )?;

        let path = dir.path().join(format!("{}.toml", d.name));
        std::fs::write(&path, &text).unwrap();
        let path = path.to_str().unwrap();
        for cmd in COMMANDS {
            let sets: Vec<Option<&str>> = if cmd == "check-symmetry" || cmd == "structure-constants" {
                d.model.generator_sets.iter().map(|s| Some(s.name.as_str())).collect()
            } else {
                vec![None]
            };
            for set in sets {
                for format in ["--format=text", "--format=structured"] {
                    let mut args = vec![cmd, path, format];
                    if let Some(s) = set {
                        args.extend(["--set", s]);
                    }
                    let first = run_cli(&args);
                    let second = run_cli(&args);
                    ensure(first == second, || format!("{args:?} is not byte-deterministic"))?;
                    ensure(matches!(first.0, Some(0 | 2)), || format!("{args:?} exited with {:?}", first.0))?;
                    runs += 2;
                    if format == "--format=structured" {
                        let v: Value = serde_json::from_slice(&first.1).map_err(|e| format!("{args:?}: {e}"))?;
                        let mut fracs = Vec::new();
                        fraction_strings(&v, &mut fracs);
                        for f in &fracs {
                            let r = parse_rational(f).unwrap();
                            ensure(format_rational_fraction(&r) == *f, || format!("{f} does not round-trip"))?;
                        }
                        check_structured_values(&again, &c2, cmd, set, &v)?;
                    }
                }
            }
        }
    }
    Ok(format!("{runs} CLI runs byte-identical, {} models round-trip", library().len()))
}

/// Compares the exact values in a structured report with the library.
fn check_structured_values(model: &Model, chain: &ConstraintChain, cmd: &str, set: Option<&str>, v: &Value) -> Result<(), String> {
    let poly = |val: &Value| parse(val.as_str().unwrap_or("?"), model.space()).map_err(|e| e.to_string());
    match cmd {
        "chain" => {
            for (key, table) in [("a", &chain.coeff_a), ("b", &chain.coeff_b), ("c", &chain.coeff_c)] {
                let entries = v["tables"][key]["entries"].as_array().ok_or("missing table")?;
                for (row, want) in entries.iter().zip(table) {
                    for (cell, w) in row.as_array().ok_or("bad row")?.iter().zip(want) {
                        ensure(poly(cell)? == *w, || format!("table {key} entry {cell} differs"))?;
                    }
                }
            }
            ensure(poly(&v["hamiltonian"])? == *chain.hamiltonian(), || "hamiltonian differs".into())
        }
        "structure-constants" => {
            let set = model.generator_set(set.unwrap()).unwrap();
            match dirac_core::closure_and_structure_constants(set, model.options.degree_bound) {
                dirac_core::Closure::Closed(sc) => {
                    let c = &v["closure"]["structure_constants"]["c"];
                    for k in 0..sc.dim() {
                        for i in 0..sc.dim() {
                            for j in 0..sc.dim() {
                                let got = c[k][i][j].as_str().and_then(parse_rational);
                                ensure(got.as_ref() == Some(sc.get(k, i, j)), || format!("C[{k}][{i}][{j}] differs"))?;
                            }
                        }
                    }
                    Ok(())
                }
                dirac_core::Closure::NotClosed { .. } => {
                    ensure(v["closure"]["closed"] == Value::Bool(false), || "closure flag differs".into())
                }
            }
        }
        _ => Ok(()),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("bracket laws on random triples", criterion_1),
        ("canonical relations", criterion_2),
        ("ideal-membership round-trip", criterion_3),
        ("three-level chain", criterion_4),
        ("em_modes(1..5)", criterion_5),
        ("so(3) recovery", criterion_6),
        ("on-shell versus strict commutation", criterion_7),
        ("mixing detection", criterion_8),
        ("verdict invariances", criterion_9),
        ("determinism and round-trip", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
