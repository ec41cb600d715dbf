use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::connectives::{
    bang, check_comonad_laws_with, curry, delta_translate_action, delta_translate_reaction,
    lollipop, tensor, uncurry, BangMode, Lollipop, Tensor,
};
use crate::fixtures::{by_name, random_system, RandomShape, FIXTURE_NAMES};
use crate::lambda::{
    normalize, parse_context, parse_term, parse_type, typecheck, Context, Term, Type,
};
use crate::relation::Relation;
use crate::semantics::{denote, verify_correctness, verify_invariance, SemanticsError, Valuation};
use crate::simulation::{
    compose, find_violation, greatest_simulation, refine_once, synthesize_strategy, Counterexample,
    SimulationStrategy, Synthesis,
};
use crate::system::{Interaction, InteractionSystem, SystemRef};
use crate::token::Token;

use super::files::{relation_from_file, relation_to_file, RelationFile, StrategyFile, SystemFile};
use super::{Cli, CliError, Command, Global, RelationChoice, Source, Status, TermInput};

type Out<'a> = &'a mut dyn Write;

pub(super) fn run(cli: &Cli, sources: Vec<Source>, out: Out) -> Result<Status, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Check { relation, .. } => {
            let (w1, w2) = two_systems(&sources)?;
            let r = pick_relation(relation, &w1, &w2, 0)?;
            let violation = find_violation(&w1, &w2, &r).map_err(system_err)?;
            report_check(g, out, &r, violation.as_ref())
        }
        Command::Synth { relation, .. } => {
            let (w1, w2) = two_systems(&sources)?;
            let r = pick_relation(relation, &w1, &w2, 0)?;
            match synthesize_strategy(&w1, &w2, &r).map_err(system_err)? {
                Synthesis::Strategy(x) => {
                    print_strategy(g, out, &x)?;
                    Ok(Status::Ok)
                }
                Synthesis::Counterexample(c) => report_check(g, out, &r, Some(&c)),
            }
        }
        Command::Greatest { .. } => {
            let (w1, w2) = two_systems(&sources)?;
            let r = greatest_simulation(&w1, &w2).map_err(system_err)?;
            print_relation(g, out, &r)?;
            Ok(Status::Ok)
        }
        Command::Compose { relation, .. } => {
            let ws = load_all(&sources)?;
            let (w1, w2, w3) = match ws.as_slice() {
                [a] => (a, a, a),
                [a, b, c] => (a, b, c),
                _ => return Err(CliError::usage("compose takes one or three systems")),
            };
            let r12 = pick_relation(relation, w1, w2, 0)?;
            let r23 = pick_relation(relation, w2, w3, 1)?;
            let x = strategy_or_fail(g, out, w1, w2, &r12)?;
            let y = strategy_or_fail(g, out, w2, w3, &r23)?;
            let (Some(x), Some(y)) = (x, y) else {
                return Ok(Status::Fails);
            };
            let z = compose(&y, &x).map_err(|e| CliError::usage(e.to_string()))?;
            z.verify(w1, w3)
                .map_err(|e| CliError::usage(e.to_string()))?;
            print_strategy(g, out, &z)?;
            Ok(Status::Ok)
        }
        Command::Tensor { .. } => {
            let (w1, w2) = exactly_two(&sources)?;
            print_system(g, out, &tensor(&w1, &w2))
        }
        Command::Lollipop { .. } => {
            let (w1, w2) = exactly_two(&sources)?;
            let w = lollipop(&w1, &w2, g.cap).map_err(system_err)?;
            print_system(g, out, &w)
        }
        Command::Bang { .. } => {
            let w = exactly_one(&sources)?;
            print_system(g, out, &bang(&w, g.bound, mode(g)))
        }
        Command::Curry { relation, .. } => {
            let [w1, w2, w3] = three(&sources)?;
            let source: SystemRef = Arc::new(Tensor::new(w1.clone(), w2.clone()));
            let r = pick_relation(relation, &*source, &*w3, 0)?;
            let Some(x) = strategy_or_fail(g, out, &*source, &*w3, &r)? else {
                return Ok(Status::Fails);
            };
            let y = curry(&x, &w1, &w2, &w3, g.cap).map_err(|e| CliError::usage(e.to_string()))?;
            print_strategy(g, out, &y)?;
            Ok(Status::Ok)
        }
        Command::Uncurry { relation, .. } => {
            let [w1, w2, w3] = three(&sources)?;
            let target: SystemRef = Arc::new(Lollipop::with_cap(w2.clone(), w3.clone(), g.cap));
            let r = pick_relation(relation, &*w1, &*target, 0)?;
            let Some(x) = strategy_or_fail(g, out, &*w1, &*target, &r)? else {
                return Ok(Status::Fails);
            };
            let y =
                uncurry(&x, &w1, &w2, &w3, g.cap).map_err(|e| CliError::usage(e.to_string()))?;
            print_strategy(g, out, &y)?;
            Ok(Status::Ok)
        }
        Command::Laws { width, .. } => {
            let w = exactly_one(&sources)?.into_ref();
            let report = check_comonad_laws_with(&w, g.bound, *width).map_err(system_err)?;
            if g.json {
                emit_json(out, &report)?;
            } else {
                let mut text = format!("bound {}\n", report.bound);
                text += &format!("counit is a simulation: {}\n", report.counit_simulation);
                text += &format!(
                    "comultiplication is a simulation: {}\n",
                    report.comultiplication_simulation
                );
                for l in &report.laws {
                    text += &format!(
                        "{}: {}\n",
                        l.name,
                        serde_json::to_string(&l.status).unwrap()
                    );
                }
                write_out(out, &text)?;
            }
            Ok(if report.holds() {
                Status::Ok
            } else {
                Status::Fails
            })
        }
        Command::Typecheck { term, context } => {
            let ctx = read_context(context)?;
            let t = read_term(term)?;
            let ty = typecheck(&ctx, &t).map_err(|e| CliError::usage(e.to_string()))?;
            if g.json {
                emit_json(out, &json!({"term": t.to_string(), "type": ty.to_string()}))?;
            } else {
                write_out(out, &format!("{ty}\n"))?;
            }
            Ok(Status::Ok)
        }
        Command::Normalize {
            term,
            context,
            max_steps,
        } => {
            let ctx = read_context(context)?;
            let t = read_term(term)?;
            let ty = typecheck(&ctx, &t).map_err(|e| CliError::usage(e.to_string()))?;
            let nf = normalize(&t, *max_steps).map_err(|e| CliError::usage(e.to_string()))?;
            if g.json {
                emit_json(
                    out,
                    &json!({"term": t.to_string(), "type": ty.to_string(), "normal_form": nf.to_string()}),
                )?;
            } else {
                write_out(out, &format!("{nf}\n"))?;
            }
            Ok(Status::Ok)
        }
        Command::Denote { term, input } => {
            let ctx = read_context(&input.context)?;
            let t = read_term(term)?;
            let rho = valuation(input, &ctx, &[&t])?;
            let ty = typecheck(&ctx, &t).map_err(|e| CliError::usage(e.to_string()))?;
            let d = denote(&ctx, &t, &rho, g.bound).map_err(semantics_err)?;
            let pairs: Vec<(String, String)> = d
                .iter()
                .map(|(env, p)| (env.display(&ctx), p.to_string()))
                .collect();
            if g.json {
                let pairs: Vec<_> = pairs
                    .iter()
                    .map(|(e, p)| json!({"environment": e, "point": p}))
                    .collect();
                emit_json(
                    out,
                    &json!({"term": t.to_string(), "type": ty.to_string(), "bound": g.bound, "pairs": pairs}),
                )?;
            } else {
                let mut text = String::new();
                for (e, p) in pairs {
                    text += &format!("{e} |- {p}\n");
                }
                write_out(out, &text)?;
            }
            Ok(Status::Ok)
        }
        Command::VerifyCorrectness { term, input } => {
            let ctx = read_context(&input.context)?;
            let t = read_term(term)?;
            let rho = valuation(input, &ctx, &[&t])?;
            let report =
                verify_correctness(&ctx, &t, &rho, g.bound, g.cap).map_err(semantics_err)?;
            if g.json {
                emit_json(out, &report)?;
            } else {
                write_out(
                    out,
                    &format!(
                        "{} : {} at bound {}: {} pairs, {}\ncurried check: {}\n",
                        report.term,
                        report.ty,
                        report.bound,
                        report.pairs,
                        serde_json::to_string(&report.verdict).unwrap(),
                        serde_json::to_string(&report.curried).unwrap()
                    ),
                )?;
            }
            Ok(if report.holds() {
                Status::Ok
            } else {
                Status::Fails
            })
        }
        Command::VerifyInvariance {
            redex,
            reduct,
            input,
        } => {
            let ctx = read_context(&input.context)?;
            let t = read_term(redex)?;
            let u = read_term(reduct)?;
            let rho = valuation(input, &ctx, &[&t, &u])?;
            let report = verify_invariance(&ctx, &t, &u, &rho, g.bound).map_err(semantics_err)?;
            if g.json {
                emit_json(out, &report)?;
            } else {
                let mut text = format!(
                    "{} vs {} at bound {} (internal width {}): {} and {} pairs\n",
                    report.left,
                    report.right,
                    report.bound,
                    report.internal,
                    report.left_size,
                    report.right_size
                );
                if !report.stable {
                    text += "not stable: raising the internal width still changes a side\n";
                }
                for p in &report.only_left {
                    text += &format!("only left:  {p}\n");
                }
                for p in &report.only_right {
                    text += &format!("only right: {p}\n");
                }
                text += if report.equal() {
                    "equal\n"
                } else {
                    "different\n"
                };
                write_out(out, &text)?;
            }
            Ok(if report.equal() {
                Status::Ok
            } else {
                Status::Fails
            })
        }
        Command::Examples { count } => examples(g, *count, out),
    }
}

fn mode(g: &Global) -> BangMode {
    if g.faithful {
        BangMode::Faithful
    } else {
        BangMode::Canonical
    }
}

fn system_err(e: crate::system::SystemError) -> CliError {
    CliError::usage(e.to_string())
}

fn semantics_err(e: SemanticsError) -> CliError {
    CliError::usage(e.to_string())
}

fn write_out(out: Out, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::usage(format!("cannot write output: {e}")))
}

fn emit_json<T: Serialize + ?Sized>(out: Out, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    write_out(out, &(text + "\n"))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load(source: &Source) -> Result<InteractionSystem, CliError> {
    match source {
        Source::Fixture(name) => by_name(name).ok_or_else(|| {
            CliError::usage(format!(
                "unknown fixture `{name}` (known: {})",
                FIXTURE_NAMES.join(", ")
            ))
        }),
        Source::File(path) => {
            let text = read_file(path)?;
            let input = |message: String| CliError::Input {
                path: path.display().to_string(),
                message,
            };
            let file: SystemFile = serde_json::from_str(&text).map_err(|e| input(e.to_string()))?;
            file.to_system().map_err(input)
        }
    }
}

fn load_all(sources: &[Source]) -> Result<Vec<InteractionSystem>, CliError> {
    if sources.is_empty() {
        return Err(CliError::usage(
            "no system given: pass a file or --fixture NAME",
        ));
    }
    sources.iter().map(load).collect()
}

/// One system is compared with itself.
fn two_systems(sources: &[Source]) -> Result<(InteractionSystem, InteractionSystem), CliError> {
    let mut ws = load_all(sources)?;
    match ws.len() {
        1 => Ok((ws[0].clone(), ws.remove(0))),
        2 => {
            let w2 = ws.pop().unwrap();
            Ok((ws.pop().unwrap(), w2))
        }
        n => Err(CliError::usage(format!(
            "expected one or two systems, got {n}"
        ))),
    }
}

fn exactly_two(sources: &[Source]) -> Result<(InteractionSystem, InteractionSystem), CliError> {
    if sources.len() != 2 {
        return Err(CliError::usage(format!(
            "expected two systems, got {}",
            sources.len()
        )));
    }
    two_systems(sources)
}

fn exactly_one(sources: &[Source]) -> Result<InteractionSystem, CliError> {
    let mut ws = load_all(sources)?;
    if ws.len() != 1 {
        return Err(CliError::usage(format!(
            "expected one system, got {}",
            ws.len()
        )));
    }
    Ok(ws.remove(0))
}

fn three(sources: &[Source]) -> Result<[SystemRef; 3], CliError> {
    let ws = load_all(sources)?;
    match <[InteractionSystem; 3]>::try_from(ws) {
        Ok([a, b, c]) => Ok([a.into_ref(), b.into_ref(), c.into_ref()]),
        Err(ws) => Err(CliError::usage(format!(
            "expected three systems, got {}",
            ws.len()
        ))),
    }
}

/// The `i`-th `--relation`, or the identity on the left states.
fn pick_relation(
    choice: &RelationChoice,
    w1: &dyn Interaction,
    w2: &dyn Interaction,
    i: usize,
) -> Result<Relation, CliError> {
    let r = if choice.identity {
        Relation::identity(&w1.states())
    } else {
        let path = choice.relation.get(i).ok_or_else(|| {
            CliError::usage(if i == 0 {
                "pass --identity or --relation FILE".to_string()
            } else {
                format!("expected {} --relation files", i + 1)
            })
        })?;
        let text = read_file(path)?;
        let pairs: RelationFile = serde_json::from_str(&text).map_err(|e| CliError::Input {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        relation_from_file(pairs)
    };
    r.validate(w1, w2).map_err(system_err)?;
    Ok(r)
}

fn report_check(
    g: &Global,
    out: Out,
    r: &Relation,
    c: Option<&Counterexample>,
) -> Result<Status, CliError> {
    if g.json {
        let cx = c.map(|c| json!({"source": c.source, "target": c.target, "action": c.action}));
        emit_json(
            out,
            &json!({"holds": c.is_none(), "counterexample": cx, "relation": relation_to_file(r)}),
        )?;
    } else {
        match c {
            None => write_out(out, &format!("simulation ({} pairs)\n", r.len()))?,
            Some(c) => {
                let mut text = format!(
                    "not a simulation: at ({}, {}) the action {} has no answer\nrelation:\n",
                    c.source, c.target, c.action
                );
                for (a, b) in r.iter() {
                    text += &format!("  {a} ~ {b}\n");
                }
                write_out(out, &text)?;
            }
        }
    }
    Ok(if c.is_none() {
        Status::Ok
    } else {
        Status::Fails
    })
}

fn strategy_or_fail(
    g: &Global,
    out: Out,
    w1: &dyn Interaction,
    w2: &dyn Interaction,
    r: &Relation,
) -> Result<Option<SimulationStrategy>, CliError> {
    match synthesize_strategy(w1, w2, r).map_err(system_err)? {
        Synthesis::Strategy(x) => Ok(Some(x)),
        Synthesis::Counterexample(c) => {
            report_check(g, out, r, Some(&c))?;
            Ok(None)
        }
    }
}

fn print_strategy(g: &Global, out: Out, x: &SimulationStrategy) -> Result<(), CliError> {
    if g.json {
        return emit_json(out, &StrategyFile::from(x));
    }
    let mut text = format!("relation ({} pairs):\n", x.relation.len());
    for (a, b) in x.relation.iter() {
        text += &format!("  {a} ~ {b}\n");
    }
    text += "actions:\n";
    for ((s1, s2, a1), a2) in &x.act {
        text += &format!("  at ({s1}, {s2}): {a1} -> {a2}\n");
    }
    text += "reactions:\n";
    for ((s1, s2, a1, d2), d1) in &x.react {
        text += &format!("  at ({s1}, {s2}) after {a1}: {d2} -> {d1}\n");
    }
    write_out(out, &text)
}

fn print_relation(g: &Global, out: Out, r: &Relation) -> Result<(), CliError> {
    if g.json {
        return emit_json(out, &relation_to_file(r));
    }
    let mut text = String::new();
    for (a, b) in r.iter() {
        text += &format!("{a} ~ {b}\n");
    }
    write_out(out, &text)
}

fn print_system(g: &Global, out: Out, w: &InteractionSystem) -> Result<Status, CliError> {
    let file = SystemFile::from_system(w);
    if g.json {
        emit_json(out, &file)?;
    } else {
        let mut text = format!("{} states\n", file.states.len());
        for s in &file.states {
            for m in w.moves(s).map_err(system_err)? {
                for o in &m.outcomes {
                    text += &format!("{s} --{} / {}--> {}\n", m.action, o.reaction, o.next);
                }
                if m.outcomes.is_empty() {
                    text += &format!("{s} --{} / (no reaction)\n", m.action);
                }
            }
        }
        write_out(out, &text)?;
    }
    Ok(Status::Ok)
}

fn read_context(src: &str) -> Result<Context, CliError> {
    parse_context(src).map_err(|e| CliError::Input {
        path: "--context".to_string(),
        message: e.to_string(),
    })
}

fn read_term(path: &Path) -> Result<Term, CliError> {
    let text = read_file(path)?;
    parse_term(&text).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn term_base_names(t: &Term, acc: &mut BTreeSet<String>) {
    let mut add = |ty: &Type| acc.extend(ty.base_names().into_iter().map(str::to_string));
    match t {
        Term::Var(_) | Term::Zero(None) => {}
        Term::Zero(Some(ty)) => add(ty),
        Term::Lam(_, ty, body) => {
            add(ty);
            term_base_names(body, acc);
        }
        Term::App(f, u) | Term::Diff(f, u) => {
            term_base_names(f, acc);
            term_base_names(u, acc);
        }
        Term::Sum(ms) => ms.iter().for_each(|m| term_base_names(m, acc)),
    }
}

/// Every base name in the context and terms gets a system.
fn valuation(input: &TermInput, ctx: &Context, terms: &[&Term]) -> Result<Valuation, CliError> {
    let mut names = BTreeSet::new();
    for (_, ty) in ctx.entries() {
        names.extend(ty.base_names().into_iter().map(str::to_string));
    }
    for t in terms {
        term_base_names(t, &mut names);
    }
    let mut rho = Valuation::new();
    let mut given = BTreeSet::new();
    for entry in &input.valuation {
        let (name, system) = entry.split_once('=').ok_or_else(|| {
            CliError::usage(format!("--valuation expects NAME=SYSTEM, got `{entry}`"))
        })?;
        let name = name.trim();
        parse_type(name)
            .ok()
            .filter(|t| matches!(t, Type::Base(_)))
            .ok_or_else(|| CliError::usage(format!("`{name}` is not a base type name")))?;
        let system = system.trim();
        let source = if by_name(system).is_some() {
            Source::Fixture(system.to_string())
        } else {
            Source::File(system.into())
        };
        rho.insert(name, load(&source)?.into_ref());
        given.insert(name.to_string());
    }
    let fallback = input
        .fixtures
        .first()
        .map(String::as_str)
        .unwrap_or("stack");
    let fallback = load(&Source::Fixture(fallback.to_string()))?.into_ref();
    for name in names.difference(&given) {
        rho.insert(name.clone(), fallback.clone());
    }
    Ok(rho)
}

#[derive(Serialize)]
struct RandomRun {
    index: usize,
    states: usize,
    greatest: usize,
    stable: bool,
    agree: bool,
}

/// The copycat on the stack, the worked comultiplication example and a
/// seeded run over random systems.
fn examples(g: &Global, count: usize, out: Out) -> Result<Status, CliError> {
    let stack = by_name("stack").unwrap();
    let copycat = SimulationStrategy::copycat(&stack)
        .map_err(system_err)?
        .verify(&stack, &stack)
        .is_ok();

    let t = |s: &str| s.parse::<Token>().expect("literal token");
    let outer = t("[[s1, s2, s3], [t1], []]");
    let action =
        t("(([s1, s2, s3], [t1], []), (((s1, s2, s3), (a1, a2, a3)), ((t1), (b1)), ((), ())))");
    let translated =
        delta_translate_action(&outer, &action, BangMode::Faithful).map_err(system_err)?;
    let back =
        delta_translate_reaction(&outer, &action, &t("(d1, d2, d3, e1)"), BangMode::Faithful)
            .map_err(system_err)?;

    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut runs = Vec::with_capacity(count);
    for index in 0..count {
        let w1 = random_system(&mut rng, RandomShape::SMALL);
        let w2 = random_system(&mut rng, RandomShape::SMALL);
        let r = greatest_simulation(&w1, &w2).map_err(system_err)?;
        let stable = refine_once(&w1, &w2, &r).map_err(system_err)? == r;
        let total = Relation::total(&w1.states(), &w2.states());
        let checked = find_violation(&w1, &w2, &total)
            .map_err(system_err)?
            .is_none();
        let synthesized = synthesize_strategy(&w1, &w2, &total)
            .map_err(system_err)?
            .strategy()
            .is_some();
        runs.push(RandomRun {
            index,
            states: w1.state_count() + w2.state_count(),
            greatest: r.len(),
            stable,
            agree: checked == synthesized,
        });
    }
    let ok = copycat && runs.iter().all(|r| r.stable && r.agree);
    if g.json {
        emit_json(
            out,
            &json!({
                "seed": g.seed,
                "copycat_on_stack": copycat,
                "comultiplication_example": {
                    "outer": outer,
                    "action": action,
                    "translated_action": translated,
                    "reaction": "(d1, d2, d3, e1)",
                    "translated_reaction": back,
                },
                "random": runs,
            }),
        )?;
    } else {
        let mut text = format!("copycat on stack verifies: {copycat}\n");
        text += &format!("comultiplication at {outer}:\n  {action}\n  -> {translated}\n");
        text += &format!("  (d1, d2, d3, e1) -> {back}\n");
        text += &format!(
            "{} random system pairs (seed {}): {} stable, {} agree\n",
            runs.len(),
            g.seed,
            runs.iter().filter(|r| r.stable).count(),
            runs.iter().filter(|r| r.agree).count()
        );
        write_out(out, &text)?;
    }
    Ok(if ok { Status::Ok } else { Status::Fails })
}
