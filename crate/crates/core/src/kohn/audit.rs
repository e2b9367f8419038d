//! Independent re-verification of a trace.
//!
//! Every output is recomputed from the step's inputs and witness, and every
//! ε is recomputed from the ledger rules. Nothing computed by the driver is
//! trusted beyond what the trace itself records.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use super::trace::{RootMode, Source, Status, Step, StepKind, Trace, Witness};
use super::Epsilon;
use crate::poly::{jacobian_det, parse_poly, scalar_determinant, squarefree_part, Polynomial, Ring};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Offending step id, or 0 for trace-level problems.
    pub step: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.step == 0 {
            write!(f, "trace: {}", self.message)
        } else {
            write!(f, "step {}: {}", self.step, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub steps_checked: usize,
    pub violation: Option<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "clean: {} steps verified", self.steps_checked),
            Some(v) => write!(f, "violation at {v}"),
        }
    }
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Auditor<'a> {
    trace: &'a Trace,
    ring: &'a Arc<Ring>,
}

impl<'a> Auditor<'a> {
    fn parse(&self, s: &str) -> Result<Polynomial, String> {
        parse_poly(s, self.ring).map_err(|e| format!("cannot parse `{s}`: {e}"))
    }

    fn parse_all(&self, xs: &[String]) -> Result<Vec<Polynomial>, String> {
        xs.iter().map(|s| self.parse(s)).collect()
    }

    fn earlier(&self, at: usize, src: Source) -> Result<Option<&'a Step>, String> {
        match src {
            Source::Generator(j) => {
                ensure(j < self.trace.generators.len(), || format!("no generator f{}", j + 1))?;
                Ok(None)
            }
            Source::Step(s) => {
                ensure(s >= 1 && s < at, || format!("input #{s} is not an earlier step"))?;
                Ok(Some(&self.trace.steps[s - 1]))
            }
        }
    }

    fn poly_of(&self, at: usize, src: Source) -> Result<Polynomial, String> {
        Ok(match self.earlier(at, src)? {
            None => match src {
                Source::Generator(j) => self.trace.generators[j].clone(),
                Source::Step(_) => unreachable!(),
            },
            Some(s) => s.output.clone(),
        })
    }

    /// The ε of a multiplier input.
    fn multiplier_eps(&self, at: usize, src: Source) -> Result<Epsilon, String> {
        match self.earlier(at, src)? {
            Some(s) if s.kind.yields_multiplier() => {
                s.epsilon.clone().ok_or_else(|| format!("input #{} has no ε", s.id))
            }
            Some(s) => Err(format!("input #{} ({}) is not a multiplier", s.id, s.kind)),
            None => Err(format!("input {src} is a generator, not a multiplier")),
        }
    }

    /// The ledger value of a Jacobian entry: 1 for a generator, the cap of
    /// an adjusted pre-multiplier, or the ε of a multiplier.
    fn entry_eps(&self, at: usize, src: Source) -> Result<Epsilon, String> {
        match self.earlier(at, src)? {
            None => Ok(Epsilon::one()),
            Some(s) if s.kind == StepKind::AdjustPreMultiplier || s.kind.yields_multiplier() => {
                s.epsilon.clone().ok_or_else(|| format!("input #{} has no ε", s.id))
            }
            Some(s) => Err(format!("input #{} ({}) cannot enter a Jacobian", s.id, s.kind)),
        }
    }

    fn min_over_support(&self, at: usize, inputs: &[Source], cofs: &[Polynomial]) -> Result<Epsilon, String> {
        let mut eps: Option<Epsilon> = None;
        for (src, c) in inputs.iter().zip(cofs) {
            if c.is_zero() {
                continue;
            }
            let e = self.multiplier_eps(at, *src)?;
            eps = Some(match eps {
                None => e,
                Some(cur) => cur.min(e),
            });
        }
        eps.ok_or_else(|| "every cofactor is zero".to_string())
    }

    fn expect_eps(&self, step: &Step, want: Option<Epsilon>) -> Check {
        ensure(step.epsilon == want, || {
            format!(
                "recorded ε {} but the ledger gives {}",
                step.epsilon.as_ref().map_or("none".into(), |e| e.to_string()),
                want.as_ref().map_or("none".into(), |e| e.to_string())
            )
        })
    }

    fn combination(&self, cofs: &[Polynomial], polys: &[Polynomial]) -> Polynomial {
        cofs.iter()
            .zip(polys)
            .fold(Polynomial::zero(self.ring), |acc, (c, p)| &acc + &(c * p))
    }

    fn var_indices(&self, names: &[String]) -> Result<Vec<usize>, String> {
        let mut out = Vec::new();
        for n in names {
            let i = self.ring.index_of(n).ok_or_else(|| format!("unknown variable `{n}`"))?;
            ensure(!out.contains(&i), || format!("variable `{n}` repeated"))?;
            out.push(i);
        }
        Ok(out)
    }

    fn check_step(&self, step: &Step) -> Check {
        let at = step.id;
        let v = self.ring.nvars();
        if step.kind.yields_multiplier() {
            let e = step.epsilon.as_ref().ok_or("multiplier without ε")?;
            ensure(e.in_unit_interval(), || format!("ε {e} outside (0, 1]"))?;
        }
        match (&step.kind, &step.witness) {
            (k, Witness::Jacobian(w)) if k.is_jacobian() => {
                let vars = self.var_indices(&w.vars)?;
                ensure(vars.len() == step.inputs.len(), || "entry count differs from variable count".into())?;
                match k {
                    StepKind::InitJacobian => {
                        ensure(step.inputs.iter().all(|s| matches!(s, Source::Generator(_))), || {
                            "initial Jacobian of something other than generators".into()
                        })?;
                        ensure(vars.len() == v || vars.len() + 1 == v, || "wrong number of variables".into())?;
                    }
                    StepKind::GenJacobianFull => ensure(vars.len() == v, || "full Jacobian needs every variable".into())?,
                    _ => ensure(vars.len() < v, || "partial Jacobian uses every variable".into())?,
                }
                let mut polys = Vec::new();
                let mut eps = Epsilon::one();
                for &src in &step.inputs {
                    polys.push(self.poly_of(at, src)?);
                    eps = eps.min(self.entry_eps(at, src)?);
                }
                let jac = jacobian_det(&polys, &vars).map_err(|e| e.to_string())?;
                ensure(!jac.is_zero(), || "Jacobian is zero".into())?;
                ensure(jac == step.output, || format!("Jacobian is {jac}, not {}", step.output))?;
                self.expect_eps(step, Some(eps.halved()))
            }
            (StepKind::IdealElement, Witness::IdealElement(w)) => {
                let cofs = self.parse_all(&w.cofactors)?;
                ensure(cofs.len() == step.inputs.len(), || "one cofactor per input needed".into())?;
                let unit = self.parse(&w.unit)?;
                ensure(!unit.constant_term().is_zero(), || "unit vanishes at the origin".into())?;
                ensure(!step.output.is_zero(), || "zero output".into())?;
                let polys: Vec<Polynomial> = step
                    .inputs
                    .iter()
                    .map(|&s| self.poly_of(at, s))
                    .collect::<Result<_, _>>()?;
                ensure(&unit * &step.output == self.combination(&cofs, &polys), || {
                    "unit·output differs from the cofactor combination".into()
                })?;
                let eps = self.min_over_support(at, &step.inputs, &cofs)?;
                self.expect_eps(step, Some(eps))
            }
            (StepKind::RootTaking, Witness::Root(w)) => {
                ensure(step.inputs.len() == 1, || "root taking has one input".into())?;
                ensure(w.m >= 1, || "root order must be positive".into())?;
                let input = self.poly_of(at, step.inputs[0])?;
                let eps = self.multiplier_eps(at, step.inputs[0])?;
                let c = self.parse(&w.cofactor)?;
                ensure(!step.output.is_zero(), || "zero output".into())?;
                ensure(step.output.pow(w.m) == &c * &input, || "output^m differs from cofactor·input".into())?;
                if w.mode == RootMode::Squarefree {
                    let (sf, m) = squarefree_part(&input).map_err(|e| e.to_string())?;
                    ensure(sf == step.output && m == w.m, || {
                        format!("squarefree part is ({sf}, {m}), not ({}, {})", step.output, w.m)
                    })?;
                }
                self.expect_eps(step, Some(eps.divided_by(w.m)))
            }
            (StepKind::AdjustPreMultiplier, Witness::Adjust(w)) => {
                let cofs = self.parse_all(&w.coefficients)?;
                ensure(cofs.len() == step.inputs.len(), || "one coefficient per input needed".into())?;
                ensure(cofs.iter().all(|c| c.is_constant()), || "coefficients must be constants".into())?;
                let mut out = Polynomial::zero(self.ring);
                let mut cap = Epsilon::one();
                for (src, c) in step.inputs.iter().zip(&cofs) {
                    out = &out + &(c * &self.poly_of(at, *src)?);
                    if let Source::Step(_) = src {
                        let e = self.multiplier_eps(at, *src)?;
                        if !c.is_zero() {
                            cap = cap.min(e);
                        }
                    }
                }
                ensure(!out.is_zero(), || "zero pre-multiplier".into())?;
                ensure(out == step.output, || format!("combination is {out}, not {}", step.output))?;
                self.expect_eps(step, Some(cap))
            }
            (StepKind::CoordinateChange, Witness::CoordinateChange(w)) => {
                ensure(step.inputs.is_empty(), || "coordinate change takes no inputs".into())?;
                ensure(w.matrix.len() == v && w.matrix.iter().all(|r| r.len() == v), || {
                    format!("matrix must be {v}×{v}")
                })?;
                let mut m = Vec::new();
                for row in &w.matrix {
                    let polys = self.parse_all(row)?;
                    ensure(polys.iter().all(|p| p.is_constant()), || "matrix entries must be constants".into())?;
                    m.push(polys.iter().map(|p| p.constant_term()).collect::<Vec<_>>());
                }
                let det = scalar_determinant(&m);
                ensure(!det.is_zero(), || "singular coordinate change".into())?;
                ensure(step.output == Polynomial::constant(self.ring, det), || "output is not the determinant".into())?;
                self.expect_eps(step, None)
            }
            (StepKind::WeierstrassExtraction, Witness::Weierstrass(w)) => {
                let k = w.ideal_inputs;
                ensure(k >= 1 && k <= step.inputs.len(), || "bad ideal input count".into())?;
                let subs: Vec<Polynomial> = step.inputs[k..]
                    .iter()
                    .map(|&s| self.poly_of(at, s))
                    .collect::<Result<_, _>>()?;
                ensure(w.aux_variables.len() == 1 + subs.len(), || "one auxiliary variable per substitution plus t".into())?;
                let aux = Ring::new(&w.aux_variables).map_err(|e| e.to_string())?;
                let rel = parse_poly(&w.relation, &aux).map_err(|e| e.to_string())?;
                ensure(rel.degree_in(0) == Some(w.degree) && w.degree > 0, || "degree in t is wrong".into())?;
                let lf = self.parse(&w.linear_form)?;
                let mut images = vec![lf];
                images.extend(subs);
                ensure(rel.compose(&images) == step.output, || "output is not the substituted relation".into())?;
                ensure(!step.output.is_zero(), || "zero output".into())?;
                let cofs = self.parse_all(&w.cofactors)?;
                ensure(cofs.len() == k, || "one cofactor per ideal input needed".into())?;
                let polys: Vec<Polynomial> = step.inputs[..k]
                    .iter()
                    .map(|&s| self.poly_of(at, s))
                    .collect::<Result<_, _>>()?;
                ensure(self.combination(&cofs, &polys) == step.output, || "output is not in the ideal as claimed".into())?;
                let eps = self.min_over_support(at, &step.inputs[..k], &cofs)?;
                self.expect_eps(step, Some(eps))
            }
            (StepKind::EliminationRelation, Witness::Elimination(w)) => {
                let k = w.ideal_inputs;
                ensure(k <= step.inputs.len(), || "bad ideal input count".into())?;
                let subs: Vec<Polynomial> = step.inputs[k..]
                    .iter()
                    .map(|&s| self.poly_of(at, s))
                    .collect::<Result<_, _>>()?;
                ensure(w.aux_variables.len() == subs.len(), || "one auxiliary variable per substitution".into())?;
                let aux = Ring::new(&w.aux_variables).map_err(|e| e.to_string())?;
                let rel = parse_poly(&w.relation, &aux).map_err(|e| e.to_string())?;
                ensure(!rel.is_zero(), || "zero relation".into())?;
                ensure(rel.compose(&subs) == step.output, || "output is not the substituted relation".into())?;
                let mut rows = self.parse_all(&w.linear_forms)?;
                rows.extend(subs);
                let vars: Vec<usize> = (0..v).collect();
                let d = jacobian_det(&rows, &vars).map_err(|e| e.to_string())?;
                let cofs = self.parse_all(&w.cofactors)?;
                ensure(cofs.len() == k + 1, || "cofactors for each ideal input and for D needed".into())?;
                let mut polys: Vec<Polynomial> = step.inputs[..k]
                    .iter()
                    .map(|&s| self.poly_of(at, s))
                    .collect::<Result<_, _>>()?;
                polys.push(d);
                ensure(self.combination(&cofs, &polys) == step.output, || "relation is not in (W, D) as claimed".into())?;
                self.expect_eps(step, None)
            }
            (StepKind::Termination, Witness::Empty {}) => {
                ensure(at == self.trace.steps.len(), || "termination is not the last step".into())?;
                ensure(step.inputs.len() == 1, || "termination has one input".into())?;
                let eps = self.multiplier_eps(at, step.inputs[0])?;
                let input = self.poly_of(at, step.inputs[0])?;
                ensure(input.is_one() && step.output.is_one(), || "termination requires the multiplier 1".into())?;
                self.expect_eps(step, Some(eps))
            }
            (k, _) => Err(format!("witness does not match kind {k}")),
        }
    }
}

/// Re-verifies every step and reports the first violation.
pub fn audit_trace(trace: &Trace) -> AuditReport {
    let auditor = Auditor {
        trace,
        ring: &trace.ring,
    };
    for (i, step) in trace.steps.iter().enumerate() {
        if step.id != i + 1 {
            return AuditReport {
                steps_checked: i,
                violation: Some(Violation {
                    step: step.id,
                    message: format!("expected id {}", i + 1),
                }),
            };
        }
        if let Err(message) = auditor.check_step(step) {
            return AuditReport {
                steps_checked: i,
                violation: Some(Violation { step: step.id, message }),
            };
        }
    }
    let n = trace.steps.len();
    let ends = trace.steps.last().map(|s| s.kind) == Some(StepKind::Termination);
    let violation = match (&trace.status, ends) {
        (Status::Terminated, false) => Some("status is terminated but the last step is not a termination"),
        (Status::Failed(_), true) => Some("status is failed but the trace terminates"),
        _ => None,
    };
    AuditReport {
        steps_checked: n,
        violation: violation.map(|m| Violation {
            step: 0,
            message: m.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kohn::{run_algorithm, Config};

    fn worked() -> Trace {
        let r = Ring::new(&["z", "w"]).unwrap();
        let fs = vec![parse_poly("z^2", &r).unwrap(), parse_poly("w^3 + w*z^5", &r).unwrap()];
        run_algorithm(&fs, &Config::default()).unwrap()
    }

    #[test]
    fn clean_trace_and_round_trip() {
        let t = worked();
        assert!(audit_trace(&t).is_clean(), "{}", audit_trace(&t));
        let back = Trace::from_jsonl(&t.to_jsonl()).unwrap();
        assert_eq!(back, t);
        assert!(audit_trace(&back).is_clean());
    }

    #[test]
    fn mutations_are_caught() {
        let mut t = worked();
        t.steps[3].epsilon = Some(Epsilon::new(1, 12));
        let rep = audit_trace(&t);
        assert_eq!(rep.violation.as_ref().map(|v| v.step), Some(4));

        let mut t = worked();
        t.steps[4].output = parse_poly("z^4*w", &t.ring).unwrap();
        assert_eq!(audit_trace(&t).violation.map(|v| v.step), Some(5));

        let mut t = worked();
        t.steps.pop();
        assert_eq!(audit_trace(&t).violation.map(|v| v.step), Some(0));
    }
}
