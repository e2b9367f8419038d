//! Step records and their JSONL form.
//!
//! A trace file holds one header line, one line per step and one footer
//! line. Polynomials are stored in canonical printed form; witness
//! polynomials in auxiliary variables are printed in the ring named by the
//! witness itself.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::driver::Config;
use super::Epsilon;
use crate::poly::{parse_poly, PolyError, Polynomial, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    InitJacobian,
    GenJacobianPartial,
    GenJacobianFull,
    IdealElement,
    RootTaking,
    AdjustPreMultiplier,
    CoordinateChange,
    WeierstrassExtraction,
    EliminationRelation,
    Termination,
}

impl StepKind {
    /// Whether the output of a step of this kind is a multiplier.
    pub fn yields_multiplier(self) -> bool {
        matches!(
            self,
            StepKind::InitJacobian
                | StepKind::GenJacobianPartial
                | StepKind::GenJacobianFull
                | StepKind::IdealElement
                | StepKind::RootTaking
                | StepKind::WeierstrassExtraction
        )
    }

    pub fn is_jacobian(self) -> bool {
        matches!(
            self,
            StepKind::InitJacobian | StepKind::GenJacobianPartial | StepKind::GenJacobianFull
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            StepKind::InitJacobian => "InitJacobian",
            StepKind::GenJacobianPartial => "GenJacobianPartial",
            StepKind::GenJacobianFull => "GenJacobianFull",
            StepKind::IdealElement => "IdealElement",
            StepKind::RootTaking => "RootTaking",
            StepKind::AdjustPreMultiplier => "AdjustPreMultiplier",
            StepKind::CoordinateChange => "CoordinateChange",
            StepKind::WeierstrassExtraction => "WeierstrassExtraction",
            StepKind::EliminationRelation => "EliminationRelation",
            StepKind::Termination => "Termination",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a step input comes from: a generator `f_j` (0-based here, printed
/// 1-based as `"fj"`) or an earlier step id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Generator(usize),
    Step(usize),
}

impl Source {
    fn to_json(self) -> Value {
        match self {
            Source::Generator(j) => Value::String(format!("f{}", j + 1)),
            Source::Step(s) => json!(s),
        }
    }

    fn from_json(v: &Value) -> Option<Source> {
        match v {
            Value::Number(n) => n.as_u64().map(|s| Source::Step(s as usize)),
            Value::String(s) => {
                let j: usize = s.strip_prefix('f')?.parse().ok()?;
                (j >= 1).then(|| Source::Generator(j - 1))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Generator(j) => write!(f, "f{}", j + 1),
            Source::Step(s) => write!(f, "#{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobianWitness {
    /// Differentiation variables, by name.
    pub vars: Vec<String>,
}

/// `unit·output = Σ cofactors_i·input_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealElementWitness {
    pub cofactors: Vec<String>,
    pub unit: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootMode {
    /// The output is the monic squarefree part of the input.
    Squarefree,
    /// The output is a stated root.
    Explicit,
}

/// `output^m = cofactor·input`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootWitness {
    pub mode: RootMode,
    pub m: u32,
    pub cofactor: String,
}

/// `output = Σ coefficients_i·input_i` with constant coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjustWitness {
    pub coefficients: Vec<String>,
}

/// New coordinates `ℓ_i = Σ_j matrix[i][j]·z_j`; the output is the determinant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateChangeWitness {
    pub matrix: Vec<Vec<String>>,
}

/// `relation(t, y…)` with `output = relation(linear_form, h…)` where the `h`
/// are the inputs after the first `ideal_inputs`, and
/// `output = Σ cofactors_i·input_i` over the ideal inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassWitness {
    pub aux_variables: Vec<String>,
    pub relation: String,
    pub linear_form: String,
    pub ideal_inputs: usize,
    pub degree: u32,
    pub cofactors: Vec<String>,
}

/// `relation(y…)` with `output = relation(h…)` and
/// `output = Σ cofactors_i·input_i + cofactors_last·D`, where
/// `D = Jac(linear_forms…, h…)` and the `h` follow the ideal inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationWitness {
    pub aux_variables: Vec<String>,
    pub relation: String,
    pub linear_forms: Vec<String>,
    pub ideal_inputs: usize,
    pub cofactors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Jacobian(JacobianWitness),
    IdealElement(IdealElementWitness),
    Root(RootWitness),
    Adjust(AdjustWitness),
    CoordinateChange(CoordinateChangeWitness),
    Weierstrass(WeierstrassWitness),
    Elimination(EliminationWitness),
    Empty {},
}

impl Witness {
    fn from_json(kind: StepKind, v: Value) -> Result<Witness, serde_json::Error> {
        Ok(match kind {
            StepKind::InitJacobian | StepKind::GenJacobianPartial | StepKind::GenJacobianFull => {
                Witness::Jacobian(serde_json::from_value(v)?)
            }
            StepKind::IdealElement => Witness::IdealElement(serde_json::from_value(v)?),
            StepKind::RootTaking => Witness::Root(serde_json::from_value(v)?),
            StepKind::AdjustPreMultiplier => Witness::Adjust(serde_json::from_value(v)?),
            StepKind::CoordinateChange => Witness::CoordinateChange(serde_json::from_value(v)?),
            StepKind::WeierstrassExtraction => Witness::Weierstrass(serde_json::from_value(v)?),
            StepKind::EliminationRelation => Witness::Elimination(serde_json::from_value(v)?),
            StepKind::Termination => Witness::Empty {},
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// 1-based position in the trace.
    pub id: usize,
    pub kind: StepKind,
    pub inputs: Vec<Source>,
    pub witness: Witness,
    pub output: Polynomial,
    /// The ledger value: a multiplier's ε, a pre-multiplier's cap, or none.
    pub epsilon: Option<Epsilon>,
}

impl Step {
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "kind": self.kind,
            "inputs": self.inputs.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "witness": self.witness,
            "output": self.output.to_string(),
            "epsilon": self.epsilon.as_ref().map(|e| e.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Terminated,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub ring: Arc<Ring>,
    pub generators: Vec<Polynomial>,
    pub config: Config,
    pub steps: Vec<Step>,
    pub status: Status,
    pub p_star: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceParseError {
    #[error("line {line}: invalid JSON: {msg}")]
    Json { line: usize, msg: String },
    #[error("line {line}: missing or malformed field `{field}`")]
    Field { line: usize, field: &'static str },
    #[error("line {line}: {source}")]
    Poly { line: usize, source: PolyError },
    #[error("trace needs a header and a footer line")]
    Truncated,
}

impl Trace {
    pub fn is_terminated(&self) -> bool {
        self.status == Status::Terminated
    }

    /// The ε attached to the terminating step.
    pub fn final_epsilon(&self) -> Option<&Epsilon> {
        match self.status {
            Status::Terminated => self.steps.last().and_then(|s| s.epsilon.as_ref()),
            Status::Failed(_) => None,
        }
    }

    pub fn step(&self, id: usize) -> Option<&Step> {
        id.checked_sub(1).and_then(|i| self.steps.get(i))
    }

    pub fn kinds(&self) -> Vec<StepKind> {
        self.steps.iter().map(|s| s.kind).collect()
    }

    pub fn header_json(&self) -> Value {
        json!({
            "variables": self.ring.names(),
            "generators": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "seed": self.config.seed,
            "config": self.config,
        })
    }

    pub fn footer_json(&self) -> Value {
        let mut v = json!({
            "status": match self.status {
                Status::Terminated => "terminated",
                Status::Failed(_) => "failed",
            },
            "final_epsilon": self.final_epsilon().map(|e| e.to_string()),
            "p_star": self.p_star,
            "ideal_element_rule": "min",
        });
        if let Status::Failed(reason) = &self.status {
            v["reason"] = Value::String(reason.clone());
        }
        v
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header_json().to_string());
        out.push('\n');
        for s in &self.steps {
            out.push_str(&s.to_json().to_string());
            out.push('\n');
        }
        out.push_str(&self.footer_json().to_string());
        out.push('\n');
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Trace, TraceParseError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        if lines.len() < 2 {
            return Err(TraceParseError::Truncated);
        }
        let parse = |line: usize, s: &str| -> Result<Value, TraceParseError> {
            serde_json::from_str(s).map_err(|e| TraceParseError::Json {
                line,
                msg: e.to_string(),
            })
        };
        let (hl, htext) = lines[0];
        let header = parse(hl, htext)?;
        let field = |line, field| TraceParseError::Field { line, field };
        let names: Vec<String> = serde_json::from_value(header["variables"].clone())
            .map_err(|_| field(hl, "variables"))?;
        let ring = Ring::new(&names).map_err(|source| TraceParseError::Poly { line: hl, source })?;
        let gens: Vec<String> = serde_json::from_value(header["generators"].clone())
            .map_err(|_| field(hl, "generators"))?;
        let generators = gens
            .iter()
            .map(|g| parse_poly(g, &ring))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|source| TraceParseError::Poly { line: hl, source })?;
        let config: Config =
            serde_json::from_value(header["config"].clone()).map_err(|_| field(hl, "config"))?;

        let mut steps = Vec::new();
        for &(ln, s) in &lines[1..lines.len() - 1] {
            let v = parse(ln, s)?;
            let id = v["id"].as_u64().ok_or(field(ln, "id"))? as usize;
            let kind: StepKind =
                serde_json::from_value(v["kind"].clone()).map_err(|_| field(ln, "kind"))?;
            let inputs = v["inputs"]
                .as_array()
                .ok_or(field(ln, "inputs"))?
                .iter()
                .map(Source::from_json)
                .collect::<Option<Vec<_>>>()
                .ok_or(field(ln, "inputs"))?;
            let witness =
                Witness::from_json(kind, v["witness"].clone()).map_err(|_| field(ln, "witness"))?;
            let output = parse_poly(v["output"].as_str().ok_or(field(ln, "output"))?, &ring)
                .map_err(|source| TraceParseError::Poly { line: ln, source })?;
            let epsilon = match &v["epsilon"] {
                Value::Null => None,
                Value::String(s) => Some(s.parse().map_err(|_| field(ln, "epsilon"))?),
                _ => return Err(field(ln, "epsilon")),
            };
            steps.push(Step {
                id,
                kind,
                inputs,
                witness,
                output,
                epsilon,
            });
        }

        let (fl, ftext) = lines[lines.len() - 1];
        let footer = parse(fl, ftext)?;
        let status = match footer["status"].as_str() {
            Some("terminated") => Status::Terminated,
            Some("failed") => Status::Failed(footer["reason"].as_str().unwrap_or("").to_string()),
            _ => return Err(field(fl, "status")),
        };
        let p_star = footer["p_star"].as_u64().map(|p| p as u32);
        Ok(Trace {
            ring,
            generators,
            config,
            steps,
            status,
            p_star,
        })
    }
}
