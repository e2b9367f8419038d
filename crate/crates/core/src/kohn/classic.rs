//! The first radical step of the classical algorithm, for comparison with
//! the effective root orders.

use super::trace::{RootWitness, StepKind, Trace, Witness};
use super::KohnError;
use crate::groebner::Ideal;
use crate::poly::{jacobian_det, squarefree_part, Polynomial};

/// `(g, Jac(f_S, g)…)` over all `(v − 1)`-subsets `S` of the generators.
pub fn classic_radical_step(fs: &[Polynomial], g: &Polynomial) -> Result<Ideal, KohnError> {
    let v = g.nvars();
    let vars: Vec<usize> = (0..v).collect();
    let mut gens = vec![g.clone()];
    for s in super::procedures::generator_subsets(fs.len(), v - 1) {
        let mut rows: Vec<Polynomial> = s.iter().map(|&j| fs[j].clone()).collect();
        rows.push(g.clone());
        let jac = jacobian_det(&rows, &vars)?;
        if !jac.is_zero() {
            gens.push(jac);
        }
    }
    Ok(Ideal::new(gens)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicComparison {
    /// The initial Jacobian of the trace.
    pub initial: Polynomial,
    /// Generator of its radical, where the classical step starts.
    pub radical: Polynomial,
    /// Per variable, the least `k ≤ cap` with `z_i^k` in the classical ideal.
    pub powers: Vec<Option<u32>>,
    /// Largest root order taken in the effective trace.
    pub effective_root_order: u32,
}

/// Compares the root orders forced by the classical radical with the ones
/// the effective trace actually uses. The classical step starts from the
/// radical of the trace's first Jacobian.
pub fn compare_classic(trace: &Trace, cap: u32) -> Result<ClassicComparison, KohnError> {
    let first = trace
        .steps
        .iter()
        .find(|s| s.kind == StepKind::InitJacobian)
        .ok_or(KohnError::ZeroJacobian)?;
    let initial = first.output.clone();
    let (radical, _) = squarefree_part(&initial)?;
    let ideal = classic_radical_step(&trace.generators, &radical)?;
    let ring = trace.ring.clone();
    let powers = (0..ring.nvars())
        .map(|i| {
            let z = Polynomial::var(&ring, i);
            (1..=cap).find(|&k| ideal.contains(&z.pow(k)))
        })
        .collect();
    let effective_root_order = trace
        .steps
        .iter()
        .filter_map(|s| match &s.witness {
            Witness::Root(RootWitness { m, .. }) => Some(*m),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    Ok(ClassicComparison {
        initial,
        radical,
        powers,
        effective_root_order,
    })
}
