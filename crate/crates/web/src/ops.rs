use intsys::cli::files::{relation_from_file, relation_to_file, RelationFile, SystemFile};
use intsys::connectives::DEFAULT_CAP;
use intsys::fixtures;
use intsys::lambda::{normalize as reduce_fully, parse_context, parse_term, typecheck};
use intsys::semantics::{denote_at, verify_correctness, Valuation, Verdict};
use intsys::simulation::{find_violation, greatest_simulation, synthesize_strategy};
use intsys::InteractionSystem;
use serde::Serialize;
use serde_json::{json, Value};

/// Largest width accepted from the page, to keep the tab responsive.
pub const MAX_BOUND: usize = 3;

const MAX_STEPS: usize = 10_000;

pub fn render(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// A fixture name or a system in the JSON file format.
pub fn system(src: &str) -> Result<InteractionSystem, String> {
    let src = src.trim();
    if src.starts_with('{') {
        let file: SystemFile = serde_json::from_str(src).map_err(|e| e.to_string())?;
        file.to_system()
    } else {
        fixtures::by_name(src).ok_or_else(|| {
            format!(
                "unknown fixture `{src}`, expected one of {}",
                fixtures::FIXTURE_NAMES.join(", ")
            )
        })
    }
}

#[derive(Serialize)]
struct Strategy {
    relation: RelationFile,
    act: Vec<[String; 4]>,
}

pub fn simulate(left: &str, right: &str, relation: &str) -> Result<Value, String> {
    let w1 = system(left).map_err(|e| format!("left system: {e}"))?;
    let w2 = system(right).map_err(|e| format!("right system: {e}"))?;
    let r = if relation.trim().is_empty() {
        greatest_simulation(&w1, &w2).map_err(|e| e.to_string())?
    } else {
        let file: RelationFile =
            serde_json::from_str(relation).map_err(|e| format!("relation: {e}"))?;
        relation_from_file(file)
    };
    if let Some(c) = find_violation(&w1, &w2, &r).map_err(|e| e.to_string())? {
        return Ok(json!({
            "holds": false,
            "counterexample": {
                "source": c.source.to_string(),
                "target": c.target.to_string(),
                "action": c.action.to_string(),
            },
        }));
    }
    let x = synthesize_strategy(&w1, &w2, &r)
        .map_err(|e| e.to_string())?
        .strategy()
        .ok_or("no strategy for a relation that passed the check")?;
    let strategy = Strategy {
        relation: relation_to_file(&x.relation),
        act: x
            .act
            .iter()
            .map(|((s1, s2, a1), a2)| [s1, s2, a1, a2].map(|t| t.to_string()))
            .collect(),
    };
    Ok(json!({ "holds": true, "strategy": strategy }))
}

pub fn normalize(context: &str, term: &str) -> Result<Value, String> {
    let ctx = parse_context(context).map_err(|e| format!("context: {e}"))?;
    let t = parse_term(term).map_err(|e| format!("term: {e}"))?;
    let ty = typecheck(&ctx, &t).map_err(|e| e.to_string())?;
    let nf = reduce_fully(&t, MAX_STEPS).map_err(|e| e.to_string())?;
    Ok(json!({ "type": ty.to_string(), "normal_form": nf.to_string() }))
}

pub fn denote(context: &str, term: &str, fixture: &str, bound: usize) -> Result<Value, String> {
    if bound > MAX_BOUND {
        return Err(format!("bound {bound} is above the demo limit of {MAX_BOUND}"));
    }
    let ctx = parse_context(context).map_err(|e| format!("context: {e}"))?;
    let t = parse_term(term).map_err(|e| format!("term: {e}"))?;
    let ty = typecheck(&ctx, &t).map_err(|e| e.to_string())?;
    let w = system(fixture)?;
    let mut rho = Valuation::new();
    for name in ctx
        .entries()
        .iter()
        .map(|(_, a)| a)
        .chain([&ty])
        .flat_map(|a| a.base_names())
    {
        rho.insert(name, w.clone().into_ref());
    }
    let d = denote_at(&ctx, &t, &ty, &rho, bound).map_err(|e| e.to_string())?;
    let pairs: Vec<String> = d
        .iter()
        .map(|(env, p)| format!("{} |- {}", env.display(&ctx), p))
        .collect();
    let report = verify_correctness(&ctx, &t, &rho, bound, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let verdict = match &report.verdict {
        Verdict::Holds { .. } => json!({ "simulation": true }),
        Verdict::Fails { counterexample } => {
            json!({ "simulation": false, "counterexample": counterexample })
        }
    };
    Ok(json!({
        "type": ty.to_string(),
        "bound": bound,
        "pairs": pairs,
        "verdict": verdict,
    }))
}
