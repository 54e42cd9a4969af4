//! One report builder per subcommand. Each produces the text rendering and
//! the structured body side by side.

use std::fmt::Write as _;

use dirac_core::chain::{FirstClassReport, Level};
use dirac_core::symmetry::{
    Closure, CommutationClass, GeneratorVerdict, LevelOutcome, StructureConstants,
};
use dirac_core::{
    assemble_total_hamiltonian, classify, closure_and_structure_constants, ConstraintChain,
    GeneratorSet, Model, SymmetryVerdict,
};
use serde_json::{json, Value};

use crate::render::{certificate_value, combination, poly_value, rational_value, table, Style};
use crate::{chain_error, Cli, Command, Exit};

#[derive(Debug, Clone)]
pub struct Report {
    pub exit: Exit,
    pub text: String,
    /// Structured body; merged after the common header fields.
    pub json: Value,
    /// Message for standard error, if the run failed.
    pub error: Option<String>,
}

impl Report {
    pub fn error(exit: Exit, message: String) -> Self {
        Report {
            exit,
            text: String::new(),
            json: json!({ "error": message }),
            error: Some(message),
        }
    }
}

pub fn dispatch(cli: &Cli, model: &Model, style: Style) -> Report {
    let chain = match analysis_chain(model) {
        Ok(c) => c,
        Err(r) => return r,
    };
    match cli.command {
        Command::Chain => chain_report(model, &chain, style),
        Command::TotalHamiltonian => total_hamiltonian_report(model, &chain),
        Command::FirstClass => first_class_report(model, &chain, style),
        Command::CheckSymmetry => match select_set(model, cli.set.as_deref()) {
            Ok(set) => symmetry_report(model, &chain, set, style),
            Err(r) => r,
        },
        Command::StructureConstants => match select_set(model, cli.set.as_deref()) {
            Ok(set) => structure_constants_report(model, set, style),
            Err(r) => r,
        },
    }
}

/// The chain every command works with: the file's explicit levels when it
/// gives them, the generated chain otherwise.
fn analysis_chain(model: &Model) -> Result<ConstraintChain, Report> {
    match model.explicit_chain() {
        Some(explicit) => explicit.map_err(|e| chain_error(&e)),
        None => model.chain().map_err(|e| chain_error(&e)),
    }
}

fn select_set<'m>(model: &'m Model, name: Option<&str>) -> Result<&'m GeneratorSet, Report> {
    let names = || {
        model
            .generator_sets
            .iter()
            .map(|s| s.name.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    };
    match name {
        Some(n) => model.generator_set(n).ok_or_else(|| {
            Report::error(
                Exit::InvalidInput,
                format!("no generator set `{n}` (available: {})", names()),
            )
        }),
        None => match model.generator_sets.as_slice() {
            [only] => Ok(only),
            [] => Err(Report::error(
                Exit::InvalidInput,
                "the model file declares no generator sets".into(),
            )),
            _ => Err(Report::error(
                Exit::InvalidInput,
                format!("several generator sets; choose one with --set ({})", names()),
            )),
        },
    }
}

fn model_name(model: &Model) -> String {
    model.name.clone().unwrap_or_else(|| "(unnamed)".into())
}

fn header(model: &Model) -> String {
    format!(
        "model: {}\nH_d = {}\n",
        model_name(model),
        model.system.hamiltonian()
    )
}

fn level_names(chain: &ConstraintChain, level: Level) -> Vec<String> {
    chain.level(level).iter().map(|c| c.name.clone()).collect()
}

fn weak_names(chain: &ConstraintChain, include_energy: bool) -> Vec<String> {
    let mut names: Vec<String> = chain.constraints().map(|(_, c)| c.name.clone()).collect();
    if include_energy {
        names.push("(H_d - E)".into());
    }
    names
}

fn options_value(model: &Model) -> Value {
    let o = &model.options;
    json!({
        "degree_bound": o.degree_bound,
        "on_shell_energy": o.on_shell_energy,
        "coefficients": o.coefficient_mode.to_string(),
    })
}

fn bound_text(bound: Option<u32>) -> String {
    bound.map_or_else(|| "default".into(), |d| d.to_string())
}

fn coefficient_table(
    text: &mut String,
    title: &str,
    rows: &[String],
    cols: &[String],
    data: &[Vec<dirac_core::PhasePolynomial>],
) -> Value {
    writeln!(text, "table {title}").unwrap();
    if rows.is_empty() || cols.is_empty() {
        writeln!(text, "    (empty)").unwrap();
    } else {
        let mut head = vec![String::new()];
        head.extend(cols.iter().cloned());
        let body: Vec<Vec<String>> = rows
            .iter()
            .zip(data)
            .map(|(r, row)| {
                let mut cells = vec![r.clone()];
                cells.extend(row.iter().map(|c| c.to_string()));
                cells
            })
            .collect();
        writeln!(text, "{}", table(&head, &body)).unwrap();
    }
    json!({
        "rows": rows,
        "columns": cols,
        "entries": data.iter().map(|row| row.iter().map(poly_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn chain_report(model: &Model, chain: &ConstraintChain, style: Style) -> Report {
    let mut text = header(model);
    let mut levels = serde_json::Map::new();
    for level in Level::ALL {
        let cs = chain.level(level);
        writeln!(text, "{level} constraints ({}):", cs.len()).unwrap();
        if cs.is_empty() {
            writeln!(text, "    (none)").unwrap();
        }
        for c in cs {
            writeln!(text, "    {} = {}", c.name, c.poly).unwrap();
        }
        levels.insert(
            level.name().into(),
            Value::Array(
                cs.iter()
                    .map(|c| json!({ "name": c.name, "polynomial": poly_value(&c.poly) }))
                    .collect(),
            ),
        );
    }
    let (np, ns, nt) = chain.counts();
    let ordering = if chain.ordering_ok() {
        style.good("ok")
    } else {
        style.warn("violated")
    };
    writeln!(text, "counts: N_p = {np}, N_s = {ns}, N_t = {nt}").unwrap();
    writeln!(text, "ordering N_p >= N_s >= N_t: {ordering}").unwrap();

    writeln!(text, "brackets with H_d:").unwrap();
    let mut relations = Vec::new();
    for rel in chain.relations() {
        let names = weak_names(chain, rel.level == Level::Tertiary);
        let combo = combination(&rel.decomposition.coefficients, &names);
        if rel.bracket.is_zero() {
            writeln!(text, "    {{{}, H_d}} = 0", rel.source).unwrap();
        } else {
            writeln!(text, "    {{{}, H_d}} = {} = {}", rel.source, rel.bracket, combo).unwrap();
        }
        relations.push(json!({
            "source": rel.source,
            "level": rel.level.name(),
            "bracket": poly_value(&rel.bracket),
            "certificate": certificate_value(&rel.decomposition, &names),
        }));
    }

    let (p, s, t) = (
        level_names(chain, Level::Primary),
        level_names(chain, Level::Secondary),
        level_names(chain, Level::Tertiary),
    );
    let a = coefficient_table(&mut text, "a (primary bracket on secondaries)", &p, &s, &chain.coeff_a);
    let b = coefficient_table(&mut text, "b (primary bracket on tertiaries)", &p, &t, &chain.coeff_b);
    let c = coefficient_table(&mut text, "c (secondary bracket on tertiaries)", &s, &t, &chain.coeff_c);

    let off = chain.off_pattern_terms();
    if off.is_empty() {
        writeln!(text, "off-pattern terms: none").unwrap();
    } else {
        writeln!(text, "off-pattern terms:").unwrap();
        for (src, on, coeff) in &off {
            writeln!(text, "    {{{src}, H_d}} contains ({coeff})*{on}").unwrap();
        }
    }
    let off_json: Vec<Value> = off
        .iter()
        .map(|(src, on, coeff)| json!({ "source": src, "constraint": on, "coefficient": poly_value(coeff) }))
        .collect();

    let mut explicit = Value::Null;
    if model.explicit_levels.is_some() {
        let generated = model.chain();
        let agree = generated
            .as_ref()
            .map(|g| g.counts() == chain.counts())
            .unwrap_or(false);
        let line = match &generated {
            Ok(g) if agree => style.good(&format!("verified; generated chain has the same counts {:?}", g.counts())),
            Ok(g) => style.warn(&format!("verified; generated chain has counts {:?}", g.counts())),
            Err(e) => style.warn(&format!("verified; generating the chain fails: {e}")),
        };
        writeln!(text, "explicit levels: {line}").unwrap();
        explicit = json!({
            "verified": true,
            "generated_counts": generated.as_ref().ok().map(|g| {
                let (a, b, c) = g.counts();
                json!({ "primary": a, "secondary": b, "tertiary": c })
            }),
        });
    }

    Report {
        exit: Exit::Pass,
        text,
        json: json!({
            "model": model_name(model),
            "options": options_value(model),
            "hamiltonian": poly_value(chain.hamiltonian()),
            "levels": levels,
            "counts": { "primary": np, "secondary": ns, "tertiary": nt },
            "ordering_ok": chain.ordering_ok(),
            "relations": relations,
            "tables": { "a": a, "b": b, "c": c },
            "off_pattern_terms": off_json,
            "explicit_levels": explicit,
        }),
        error: None,
    }
}

pub fn total_hamiltonian_report(model: &Model, chain: &ConstraintChain) -> Report {
    let th = assemble_total_hamiltonian(chain);
    let mut text = header(model);
    let symbolic: Vec<String> = th
        .multipliers
        .iter()
        .map(|(m, c)| format!("{m}*{c}"))
        .collect();
    let mut sum = String::from("H_tot = H_d");
    for s in &symbolic {
        sum.push_str(" + ");
        sum.push_str(s);
    }
    writeln!(text, "{sum}").unwrap();
    writeln!(text, "      = {}", th.total).unwrap();
    writeln!(text, "multipliers:").unwrap();
    if th.multipliers.is_empty() {
        writeln!(text, "    (none)").unwrap();
    }
    for (m, c) in &th.multipliers {
        writeln!(text, "    {m} -> {c}").unwrap();
    }
    let names = weak_names(chain, false);
    writeln!(
        text,
        "weak equality H_tot ~ H_d: H_tot - H_d = {}",
        combination(&th.weak_certificate.coefficients, &names)
    )
    .unwrap();

    Report {
        exit: Exit::Pass,
        text,
        json: json!({
            "model": model_name(model),
            "options": options_value(model),
            "hamiltonian": poly_value(&th.hamiltonian),
            "total": poly_value(&th.total),
            "multipliers": th.multipliers.iter().map(|(m, c)| json!({ "multiplier": m, "constraint": c })).collect::<Vec<_>>(),
            "weak_certificate": certificate_value(&th.weak_certificate, &names),
        }),
        error: None,
    }
}

pub fn first_class_report(model: &Model, chain: &ConstraintChain, style: Style) -> Report {
    let o = model.options;
    let report: FirstClassReport = chain.first_class_check(o.degree_bound, o.on_shell_energy);
    let names = weak_names(chain, report.include_energy);
    let mut text = header(model);
    writeln!(
        text,
        "first-class test modulo the constraints{} (degree bound {})",
        if report.include_energy { " and H_d - E" } else { "" },
        bound_text(o.degree_bound)
    )
    .unwrap();
    if report.pairs.is_empty() {
        writeln!(text, "    (fewer than two constraints)").unwrap();
    }
    let mut pairs = Vec::new();
    for pair in &report.pairs {
        let label = format!("{{{}, {}}} = {}", pair.left, pair.right, pair.bracket);
        match &pair.result {
            Ok(cert) => {
                if pair.bracket.is_zero() {
                    writeln!(text, "    {label}  {}", style.good("first class")).unwrap();
                } else {
                    writeln!(
                        text,
                        "    {label}  {}  [= {}]",
                        style.good("first class"),
                        combination(&cert.coefficients, &names)
                    )
                    .unwrap();
                }
                pairs.push(json!({
                    "left": pair.left, "right": pair.right,
                    "bracket": poly_value(&pair.bracket),
                    "first_class": true,
                    "certificate": certificate_value(cert, &names),
                }));
            }
            Err(nf) => {
                writeln!(text, "    {label}  {}: {nf}", style.bad("NOT first class")).unwrap();
                pairs.push(json!({
                    "left": pair.left, "right": pair.right,
                    "bracket": poly_value(&pair.bracket),
                    "first_class": false,
                    "not_found": nf.to_string(),
                }));
            }
        }
    }
    let all = report.all_first_class();
    writeln!(
        text,
        "result: {}",
        style.verdict(all, if all { "all constraints first class" } else { "second-class pairs found" })
    )
    .unwrap();
    Report {
        exit: if all { Exit::Pass } else { Exit::Finding },
        text,
        json: json!({
            "model": model_name(model),
            "options": options_value(model),
            "include_energy": report.include_energy,
            "pairs": pairs,
            "all_first_class": all,
        }),
        error: None,
    }
}

fn structure_constants_value(sc: &StructureConstants) -> Value {
    let n = sc.dim();
    let tensor: Vec<Value> = (0..n)
        .map(|k| {
            Value::Array(
                (0..n)
                    .map(|i| Value::Array((0..n).map(|j| rational_value(sc.get(k, i, j))).collect()))
                    .collect(),
            )
        })
        .collect();
    json!({
        "generators": sc.names,
        "c": tensor,
        "nonzero": sc.nonzero_upper().iter().map(|(k, i, j, v)| json!({
            "k": sc.names[*k], "i": sc.names[*i], "j": sc.names[*j], "value": rational_value(v),
        })).collect::<Vec<_>>(),
        "abelian": sc.is_abelian(),
        "antisymmetric": sc.is_antisymmetric(),
        "jacobi": sc.satisfies_jacobi(),
    })
}

fn closure_text(text: &mut String, closure: &Closure, names: &[String], style: Style) {
    match closure {
        Closure::Closed(sc) => {
            writeln!(text, "closure: {} with constant structure constants", style.good("closed")).unwrap();
            let nz = sc.nonzero_upper();
            if nz.is_empty() {
                writeln!(text, "    all C^k_ij = 0 (abelian)").unwrap();
            }
            for (k, i, j, v) in nz {
                writeln!(
                    text,
                    "    C^{}_{{{}, {}}} = {}",
                    sc.names[k],
                    sc.names[i],
                    sc.names[j],
                    dirac_core::poly::format_rational(&v)
                )
                .unwrap();
            }
            let yes_no = |b: bool| if b { style.good("holds") } else { style.bad("fails") };
            writeln!(text, "    antisymmetry: {}", yes_no(sc.is_antisymmetric())).unwrap();
            writeln!(text, "    Jacobi identity: {}", yes_no(sc.satisfies_jacobi())).unwrap();
        }
        Closure::NotClosed {
            left,
            right,
            bracket,
            field_dependent,
        } => {
            writeln!(
                text,
                "closure: {}: {{{left}, {right}}} = {bracket} is not a constant combination of the generators",
                style.bad("not closed")
            )
            .unwrap();
            match field_dependent {
                Some(cert) => writeln!(
                    text,
                    "    field-dependent combination exists: {}",
                    combination(&cert.coefficients, names)
                )
                .unwrap(),
                None => writeln!(text, "    no field-dependent combination within the degree bound either").unwrap(),
            }
        }
    }
}

fn closure_value(closure: &Closure, names: &[String]) -> Value {
    match closure {
        Closure::Closed(sc) => json!({ "closed": true, "structure_constants": structure_constants_value(sc) }),
        Closure::NotClosed {
            left,
            right,
            bracket,
            field_dependent,
        } => json!({
            "closed": false,
            "left": left,
            "right": right,
            "bracket": poly_value(bracket),
            "field_dependent": field_dependent.as_ref().map(|c| certificate_value(c, names)),
        }),
    }
}

pub fn structure_constants_report(model: &Model, set: &GeneratorSet, style: Style) -> Report {
    let closure = closure_and_structure_constants(set, model.options.degree_bound);
    let names: Vec<String> = set.generators().iter().map(|g| g.name.clone()).collect();
    let mut text = header(model);
    writeln!(text, "generator set: {}", set.name).unwrap();
    for g in set.generators() {
        writeln!(text, "    {} = {}", g.name, g.poly).unwrap();
    }
    closure_text(&mut text, &closure, &names, style);
    Report {
        exit: if closure.is_closed() { Exit::Pass } else { Exit::Finding },
        text,
        json: json!({
            "model": model_name(model),
            "options": options_value(model),
            "set": set.name,
            "generators": set.generators().iter().map(|g| json!({ "name": g.name, "polynomial": poly_value(&g.poly) })).collect::<Vec<_>>(),
            "closure": closure_value(&closure, &names),
        }),
        error: None,
    }
}

fn level_label(level: Level, name: &str) -> String {
    format!("{name} ({level})")
}

fn generator_text(text: &mut String, g: &GeneratorVerdict, chain: &ConstraintChain, include_energy: bool, style: Style) {
    let class = g.class();
    writeln!(text, "generator {} = {}: {}", g.name, g.generator, style.verdict(class.is_symmetry(), &class.to_string())).unwrap();
    let c = &g.commutation;
    let names = weak_names(chain, include_energy);
    let comm = match (&c.class, &c.result) {
        (CommutationClass::Strict, _) => style.good("Strict (identically zero)"),
        (CommutationClass::OnShell, Ok(cert)) => format!(
            "{} = {}",
            style.good("OnShell"),
            combination(&cert.coefficients, &names)
        ),
        (_, Err(nf)) => format!("{}: {nf}", style.bad("Fails")),
        (_, Ok(_)) => style.bad("Fails"),
    };
    writeln!(text, "    {{{}, H_d}} = {}  {}", g.name, c.bracket, comm).unwrap();
    let level_names = weak_names(chain, include_energy);
    for e in &g.level_action.entries {
        let head = format!("    {{{}, {}}} = {}", g.name, e.constraint, e.bracket);
        let line = match &e.outcome {
            LevelOutcome::Preserved(cert) if cert.is_trivial() => {
                format!("{} within {} level", style.good("preserved"), e.level)
            }
            LevelOutcome::Preserved(cert) => format!(
                "{} within {} level [= {}]",
                style.good("preserved"),
                e.level,
                combination(&cert.coefficients, &level_certificate_names(chain, e.level, include_energy))
            ),
            LevelOutcome::Mixes { certificate, into } => format!(
                "{} {} into {} [= {}]",
                style.bad("MIXES"),
                e.level,
                into.iter().map(|(l, n)| level_label(*l, n)).collect::<Vec<_>>().join(", "),
                combination(&certificate.coefficients, &level_names)
            ),
            LevelOutcome::Outside(nf) => format!("{}: {nf}", style.bad("outside the constraint module")),
        };
        writeln!(text, "{head}  {line}").unwrap();
    }
    match &g.counts {
        Some(counts) => {
            let parts: Vec<String> = counts
                .iter()
                .map(|c| format!("{} rank {} <= {}", c.level, c.image_rank, c.count))
                .collect();
            let ok = g.counts_preserved() == Some(true);
            writeln!(text, "    counts: {} ({})", style.verdict(ok, if ok { "not increased" } else { "increased" }), parts.join(", ")).unwrap();
        }
        None => writeln!(text, "    counts: not evaluated (level preservation failed)").unwrap(),
    }
}

fn level_certificate_names(chain: &ConstraintChain, level: Level, include_energy: bool) -> Vec<String> {
    let mut names = level_names(chain, level);
    if include_energy {
        names.push("(H_d - E)".into());
    }
    names
}

fn generator_value(g: &GeneratorVerdict, chain: &ConstraintChain, include_energy: bool) -> Value {
    let names = weak_names(chain, include_energy);
    let c = &g.commutation;
    let commutation = json!({
        "class": c.class.to_string(),
        "bracket": poly_value(&c.bracket),
        "certificate": c.result.as_ref().ok().map(|cert| certificate_value(cert, &names)),
        "not_found": c.result.as_ref().err().map(ToString::to_string),
    });
    let entries: Vec<Value> = g
        .level_action
        .entries
        .iter()
        .map(|e| {
            let (outcome, cert, into, nf) = match &e.outcome {
                LevelOutcome::Preserved(cert) => (
                    "preserved",
                    Some(certificate_value(cert, &level_certificate_names(chain, e.level, include_energy))),
                    Vec::new(),
                    None,
                ),
                LevelOutcome::Mixes { certificate, into } => (
                    "mixes",
                    Some(certificate_value(certificate, &names)),
                    into.iter().map(|(l, n)| json!({ "level": l.name(), "constraint": n })).collect(),
                    None,
                ),
                LevelOutcome::Outside(nf) => ("outside", None, Vec::new(), Some(nf.to_string())),
            };
            json!({
                "constraint": e.constraint,
                "level": e.level.name(),
                "bracket": poly_value(&e.bracket),
                "outcome": outcome,
                "certificate": cert,
                "into": into,
                "not_found": nf,
            })
        })
        .collect();
    let matrices: serde_json::Map<String, Value> = Level::ALL
        .into_iter()
        .map(|l| {
            let m = g.level_action.matrix(l).map(|rows| {
                rows.iter()
                    .map(|r| r.iter().map(poly_value).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            });
            (l.name().to_string(), json!(m))
        })
        .collect();
    let counts = g.counts.as_ref().map(|cs| {
        cs.iter()
            .map(|c| json!({ "level": c.level.name(), "count": c.count, "image_rank": c.image_rank }))
            .collect::<Vec<_>>()
    });
    json!({
        "name": g.name,
        "generator": poly_value(&g.generator),
        "class": g.class().to_string(),
        "commutation": commutation,
        "level_action": {
            "preserving": g.level_action.level_preserving(),
            "mixing_found": g.level_action.mixing_found(),
            "entries": entries,
            "matrices": matrices,
            "offending_pairs": g.level_action.offending_pairs().iter().map(|p| json!({
                "constraint": p.constraint,
                "from": p.from.name(),
                "into": p.into.iter().map(|(l, n)| json!({ "level": l.name(), "constraint": n })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        },
        "counts": counts,
        "counts_preserved": g.counts_preserved(),
    })
}

pub fn symmetry_report(model: &Model, chain: &ConstraintChain, set: &GeneratorSet, style: Style) -> Report {
    let opts = model.options.check_options();
    let verdict: SymmetryVerdict = classify(set, chain, &opts);
    let class = verdict.class();
    let mut text = header(model);
    writeln!(
        text,
        "generator set: {} (degree bound {}, on-shell energy {}, {} level coefficients)",
        set.name,
        bound_text(opts.degree_bound),
        opts.include_energy,
        opts.level_mode
    )
    .unwrap();
    let (np, ns, nt) = chain.counts();
    writeln!(text, "constraints: N_p = {np}, N_s = {ns}, N_t = {nt}").unwrap();
    for g in &verdict.generators {
        generator_text(&mut text, g, chain, opts.include_energy, style);
    }
    let names: Vec<String> = set.generators().iter().map(|g| g.name.clone()).collect();
    closure_text(&mut text, &verdict.closure, &names, style);
    let mixing: Vec<String> = verdict
        .generators
        .iter()
        .flat_map(|g| {
            g.level_action.offending_pairs().into_iter().map(move |p| {
                format!(
                    "{} maps {} into {}",
                    g.name,
                    level_label(p.from, &p.constraint),
                    p.into.iter().map(|(l, n)| level_label(*l, n)).collect::<Vec<_>>().join(", ")
                )
            })
        })
        .collect();
    for m in &mixing {
        writeln!(text, "offending pair: {m}").unwrap();
    }
    writeln!(text, "verdict: {}", style.verdict(class.is_symmetry(), &class.to_string())).unwrap();

    Report {
        exit: if class.is_symmetry() { Exit::Pass } else { Exit::Finding },
        text,
        json: json!({
            "model": model_name(model),
            "options": options_value(model),
            "set": set.name,
            "counts": { "primary": np, "secondary": ns, "tertiary": nt },
            "generators": verdict.generators.iter().map(|g| generator_value(g, chain, opts.include_energy)).collect::<Vec<_>>(),
            "closure": closure_value(&verdict.closure, &names),
            "verdict": class.to_string(),
        }),
        error: None,
    }
}
