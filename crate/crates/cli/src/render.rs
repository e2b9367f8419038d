use kohn_core::kohn::{Status, Step, StepKind, Witness};
use kohn_core::Trace;
use serde_json::{json, Value};

/// The procedure a step kind belongs to, in the labels of the derivation.
pub fn label(kind: StepKind) -> &'static str {
    match kind {
        StepKind::InitJacobian | StepKind::GenJacobianPartial | StepKind::GenJacobianFull => {
            "(i) Jacobian"
        }
        StepKind::IdealElement => "(ii) ideal element",
        StepKind::RootTaking => "(iii) root taking",
        StepKind::CoordinateChange => "induction: coordinate change",
        StepKind::WeierstrassExtraction => "induction: Weierstrass polynomial",
        StepKind::EliminationRelation => "induction: elimination relation",
        StepKind::AdjustPreMultiplier => "generation: adjusted pre-multiplier",
        StepKind::Termination => "termination",
    }
}

fn detail(step: &Step) -> String {
    match &step.witness {
        Witness::Jacobian(w) => format!(" in {}", w.vars.join(", ")),
        Witness::Root(w) => format!(" of order {}", w.m),
        Witness::Weierstrass(w) => format!(" of degree {} in {}", w.degree, w.linear_form),
        Witness::CoordinateChange(w) => {
            let rows: Vec<String> = w.matrix.iter().map(|r| format!("[{}]", r.join(", "))).collect();
            format!(" {}", rows.join(" "))
        }
        _ => String::new(),
    }
}

pub fn step_line(step: &Step) -> String {
    let inputs: Vec<String> = step.inputs.iter().map(|s| s.to_string()).collect();
    let eps = step
        .epsilon
        .as_ref()
        .map(|e| format!("  ε = {e}"))
        .unwrap_or_default();
    format!(
        "#{:<3} {}{} [{}] -> {}{}",
        step.id,
        label(step.kind),
        detail(step),
        inputs.join(", "),
        step.output,
        eps
    )
}

/// One line that depends only on the outcome of the run, not on the input.
pub fn summary_line(trace: &Trace) -> String {
    let p_star = trace.p_star.map(|p| p.to_string()).unwrap_or_else(|| "?".into());
    match &trace.status {
        Status::Terminated => format!(
            "terminated after {} steps; final ε = {}; p* = {}",
            trace.steps.len(),
            trace.final_epsilon().map(|e| e.to_string()).unwrap_or_default(),
            p_star
        ),
        Status::Failed(reason) => format!(
            "failed after {} steps: {}; p* = {}",
            trace.steps.len(),
            reason,
            p_star
        ),
    }
}

pub fn derivation_text(trace: &Trace) -> String {
    let mut out = String::new();
    for s in &trace.steps {
        out.push_str(&step_line(s));
        out.push('\n');
    }
    out.push_str(&summary_line(trace));
    out.push('\n');
    out
}

pub fn summary_json(trace: &Trace) -> Value {
    let mut v = trace.footer_json();
    v["steps"] = json!(trace.steps.len());
    v["kinds"] = json!(trace.kinds().iter().map(|k| k.name()).collect::<Vec<_>>());
    v
}
