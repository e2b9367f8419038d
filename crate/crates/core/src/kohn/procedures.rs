//! The allowable procedures. Each one checks its own preconditions, records
//! a step in a [`Derivation`] and returns the certified result.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::trace::{
    AdjustWitness, EliminationWitness, IdealElementWitness, JacobianWitness, RootMode, RootWitness,
    Source, Step, StepKind, WeierstrassWitness, Witness,
};
use super::{Epsilon, Item, KohnError, Multiplier, PreKind, PreMultiplier};
use crate::coeff::GaussianRational;
use crate::groebner::{local_member, Ideal};
use crate::poly::{jacobian_det, same_ring, squarefree_part, Monomial, Polynomial, Ring};

/// An append-only record of procedure applications over fixed generators.
#[derive(Debug, Clone)]
pub struct Derivation {
    ring: Arc<Ring>,
    gens: Vec<Polynomial>,
    steps: Vec<Step>,
}

impl Derivation {
    pub fn new(gens: &[Polynomial]) -> Result<Self, KohnError> {
        let ring = gens.first().ok_or(KohnError::NoGenerators)?.ring().clone();
        if gens.iter().any(|g| !same_ring(g.ring(), &ring)) {
            return Err(crate::poly::PolyError::RingMismatch.into());
        }
        Ok(Derivation {
            ring,
            gens: gens.to_vec(),
            steps: Vec::new(),
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<Step> {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Drops every step after the first `len`.
    pub fn truncate(&mut self, len: usize) {
        self.steps.truncate(len);
    }

    /// `f_j` as a pre-multiplier with cap 1.
    pub fn generator(&self, j: usize) -> PreMultiplier {
        PreMultiplier {
            poly: self.gens[j].clone(),
            kind: PreKind::Initial(j),
            epsilon_cap: Epsilon::one(),
        }
    }

    pub fn step(&self, id: usize) -> Option<&Step> {
        id.checked_sub(1).and_then(|i| self.steps.get(i))
    }

    /// The multiplier recorded by step `id`, if that step yields one.
    pub fn multiplier(&self, id: usize) -> Option<Multiplier> {
        let s = self.step(id)?;
        if !s.kind.yields_multiplier() {
            return None;
        }
        Some(Multiplier {
            poly: s.output.clone(),
            epsilon: s.epsilon.clone()?,
            step: id,
        })
    }

    pub(crate) fn push(
        &mut self,
        kind: StepKind,
        inputs: Vec<Source>,
        witness: Witness,
        output: Polynomial,
        epsilon: Option<Epsilon>,
    ) -> usize {
        let id = self.steps.len() + 1;
        self.steps.push(Step {
            id,
            kind,
            inputs,
            witness,
            output,
            epsilon,
        });
        id
    }

    fn push_multiplier(
        &mut self,
        kind: StepKind,
        inputs: Vec<Source>,
        witness: Witness,
        poly: Polynomial,
        epsilon: Epsilon,
    ) -> Multiplier {
        let step = self.push(kind, inputs, witness, poly.clone(), Some(epsilon.clone()));
        Multiplier {
            poly,
            epsilon,
            step,
        }
    }

    fn check_ring(&self, p: &Polynomial) -> Result<(), KohnError> {
        if same_ring(p.ring(), &self.ring) {
            Ok(())
        } else {
            Err(crate::poly::PolyError::RingMismatch.into())
        }
    }
}

pub(crate) fn var_names(ring: &Ring, vars: &[usize]) -> Vec<String> {
    vars.iter().map(|&v| ring.names()[v].clone()).collect()
}

pub(crate) fn combination(ring: &Arc<Ring>, cofactors: &[Polynomial], polys: &[Polynomial]) -> Polynomial {
    cofactors
        .iter()
        .zip(polys)
        .fold(Polynomial::zero(ring), |acc, (c, p)| &acc + &(c * p))
}

/// Names for auxiliary variables that avoid every name of `ring`.
pub(crate) fn fresh_names(ring: &Ring, wanted: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for w in wanted {
        let mut name = w.clone();
        while ring.index_of(&name).is_some() || out.contains(&name) {
            name.push('_');
        }
        out.push(name);
    }
    out
}

/// `½·min(1, orders…)`.
fn jacobian_epsilon(items: &[Item]) -> Epsilon {
    items
        .iter()
        .fold(Epsilon::one(), |acc, it| acc.min(it.order().clone()))
        .halved()
}

/// A determinant of partial derivatives of the items. The step is recorded
/// as `InitJacobian` when every item is a generator, and otherwise as a full
/// or partial generalized Jacobian depending on `vars`.
pub fn gen_jacobian(d: &mut Derivation, items: &[Item], vars: &[usize]) -> Result<Multiplier, KohnError> {
    for it in items {
        d.check_ring(it.poly())?;
    }
    let polys: Vec<Polynomial> = items.iter().map(|i| i.poly().clone()).collect();
    let out = jacobian_det(&polys, vars)?;
    if out.is_zero() {
        return Err(KohnError::ZeroJacobian);
    }
    let all_initial = items
        .iter()
        .all(|i| matches!(i, Item::Pre(p) if matches!(p.kind, PreKind::Initial(_))));
    let kind = if all_initial {
        StepKind::InitJacobian
    } else if vars.len() == d.ring.nvars() {
        StepKind::GenJacobianFull
    } else {
        StepKind::GenJacobianPartial
    };
    let eps = jacobian_epsilon(items);
    let witness = Witness::Jacobian(JacobianWitness {
        vars: var_names(&d.ring, vars),
    });
    Ok(d.push_multiplier(kind, items.iter().map(|i| i.source()).collect(), witness, out, eps))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

pub(crate) fn generator_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets(n, k)
}

/// Every nonzero Jacobian of generators: full determinants of `v`-subsets
/// and, for `v − 1`-subsets, determinants in the first `v − 1` variables.
/// Repeated outputs are recorded once.
pub fn initial_multipliers(d: &mut Derivation) -> Result<Vec<Multiplier>, KohnError> {
    let v = d.ring.nvars();
    let n = d.gens.len();
    let mut out: Vec<Multiplier> = Vec::new();
    let full: Vec<usize> = (0..v).collect();
    let partial: Vec<usize> = (0..v - 1).collect();
    for (size, vars) in [(v, &full), (v - 1, &partial)] {
        for s in subsets(n, size) {
            let polys: Vec<Polynomial> = s.iter().map(|&j| d.gens[j].clone()).collect();
            let jac = jacobian_det(&polys, vars)?;
            if jac.is_zero() || out.iter().any(|m| m.poly == jac) {
                continue;
            }
            let items: Vec<Item> = s.iter().map(|&j| Item::Pre(d.generator(j))).collect();
            out.push(gen_jacobian(d, &items, vars)?);
        }
    }
    Ok(out)
}

/// `unit·target = Σ cofactors_i·gens_i` with `unit(0) ≠ 0`; the ε is the
/// least ε among generators with a nonzero cofactor.
pub fn ideal_element_with_unit(
    d: &mut Derivation,
    gens: &[Multiplier],
    cofactors: &[Polynomial],
    unit: &Polynomial,
    target: &Polynomial,
) -> Result<Multiplier, KohnError> {
    if gens.len() != cofactors.len() {
        return Err(KohnError::Dimension(format!(
            "{} generators but {} cofactors",
            gens.len(),
            cofactors.len()
        )));
    }
    d.check_ring(target)?;
    d.check_ring(unit)?;
    for c in cofactors {
        d.check_ring(c)?;
    }
    if target.is_zero() {
        return Err(KohnError::ZeroTarget);
    }
    if unit.constant_term().is_zero() {
        return Err(KohnError::NotAUnit);
    }
    let polys: Vec<Polynomial> = gens.iter().map(|g| g.poly.clone()).collect();
    if unit * target != combination(&d.ring, cofactors, &polys) {
        return Err(KohnError::IdentityFails);
    }
    let eps = gens
        .iter()
        .zip(cofactors)
        .filter(|(_, c)| !c.is_zero())
        .map(|(g, _)| g.epsilon.clone())
        .reduce(Epsilon::min)
        .ok_or(KohnError::IdentityFails)?;
    let witness = Witness::IdealElement(IdealElementWitness {
        cofactors: cofactors.iter().map(|c| c.to_string()).collect(),
        unit: unit.to_string(),
    });
    let inputs = gens.iter().map(|g| Source::Step(g.step)).collect();
    Ok(d.push_multiplier(StepKind::IdealElement, inputs, witness, target.clone(), eps))
}

/// `target = Σ cofactors_i·gens_i`.
pub fn ideal_element(
    d: &mut Derivation,
    gens: &[Multiplier],
    cofactors: &[Polynomial],
    target: &Polynomial,
) -> Result<Multiplier, KohnError> {
    let one = Polynomial::one(&d.ring);
    ideal_element_with_unit(d, gens, cofactors, &one, target)
}

/// Finds cofactors by a Gröbner lift, or a unit certificate when the target
/// lies in the ideal only at the germ level.
pub fn ideal_element_auto(
    d: &mut Derivation,
    gens: &[Multiplier],
    target: &Polynomial,
) -> Result<Multiplier, KohnError> {
    if target.is_zero() {
        return Err(KohnError::ZeroTarget);
    }
    let ideal = Ideal::new(gens.iter().map(|g| g.poly.clone()).collect())?;
    let cert = local_member(&ideal, target).ok_or(KohnError::NotInIdeal)?;
    // Ideal::new drops zero generators; re-align the cofactors.
    let mut cofactors = Vec::with_capacity(gens.len());
    let mut it = cert.cofactors.into_iter();
    for g in gens {
        if g.poly.is_zero() {
            cofactors.push(Polynomial::zero(&d.ring));
        } else {
            cofactors.push(it.next().expect("one cofactor per nonzero generator"));
        }
    }
    ideal_element_with_unit(d, gens, &cofactors, &cert.unit, target)
}

/// The monic squarefree part `R` of `F`, with `R^m = c·F` and ε divided by `m`.
pub fn root_taking(d: &mut Derivation, f: &Multiplier) -> Result<Multiplier, KohnError> {
    if f.poly.is_constant() {
        return Err(KohnError::ConstantInput);
    }
    let (root, m) = squarefree_part(&f.poly)?;
    let cofactor = root
        .pow(m)
        .div_exact(&f.poly)
        .expect("the squarefree part to the maximal multiplicity is divisible by the input");
    let witness = Witness::Root(RootWitness {
        mode: RootMode::Squarefree,
        m,
        cofactor: cofactor.to_string(),
    });
    let eps = f.epsilon.divided_by(m);
    Ok(d.push_multiplier(StepKind::RootTaking, vec![Source::Step(f.step)], witness, root, eps))
}

/// A stated root: `root^m = cofactor·F`.
pub fn root_taking_explicit(
    d: &mut Derivation,
    f: &Multiplier,
    root: &Polynomial,
    m: u32,
    cofactor: &Polynomial,
) -> Result<Multiplier, KohnError> {
    d.check_ring(root)?;
    d.check_ring(cofactor)?;
    if m == 0 {
        return Err(KohnError::Dimension("root order must be positive".into()));
    }
    if root.is_zero() {
        return Err(KohnError::ZeroTarget);
    }
    if root.pow(m) != cofactor * &f.poly {
        return Err(KohnError::IdentityFails);
    }
    let witness = Witness::Root(RootWitness {
        mode: RootMode::Explicit,
        m,
        cofactor: cofactor.to_string(),
    });
    let eps = f.epsilon.divided_by(m);
    Ok(d.push_multiplier(StepKind::RootTaking, vec![Source::Step(f.step)], witness, root.clone(), eps))
}

/// `Σ c_j·f_j + Σ b_k·F_k` for generators `f_j` and multipliers `F_k`. The
/// cap is the least ε among multipliers with a nonzero coefficient, and 1
/// when there are none.
pub fn adjust_premultiplier(
    d: &mut Derivation,
    gen_coeffs: &[(usize, GaussianRational)],
    mult_coeffs: &[(Multiplier, GaussianRational)],
) -> Result<PreMultiplier, KohnError> {
    let mut out = Polynomial::zero(&d.ring);
    let mut inputs = Vec::new();
    let mut coefficients = Vec::new();
    for (j, c) in gen_coeffs {
        let g = d
            .gens
            .get(*j)
            .ok_or_else(|| KohnError::Dimension(format!("no generator f{}", j + 1)))?;
        out = &out + &g.scale(c);
        inputs.push(Source::Generator(*j));
        coefficients.push(c.to_string());
    }
    let mut cap = Epsilon::one();
    for (m, c) in mult_coeffs {
        out = &out + &m.poly.scale(c);
        inputs.push(Source::Step(m.step));
        coefficients.push(c.to_string());
        if !c.is_zero() {
            cap = cap.min(m.epsilon.clone());
        }
    }
    if out.is_zero() {
        return Err(KohnError::ZeroTarget);
    }
    let witness = Witness::Adjust(AdjustWitness { coefficients });
    let step = d.push(
        StepKind::AdjustPreMultiplier,
        inputs,
        witness,
        out.clone(),
        Some(cap.clone()),
    );
    Ok(PreMultiplier {
        poly: out,
        kind: PreKind::Adjusted(step),
        epsilon_cap: cap,
    })
}

/// `L^1 F, L^2 F, …` for `L = Jac(pivots…, ·)`, stopping after `count`
/// iterates or before the first zero one.
pub fn iterate_l_operator(
    d: &mut Derivation,
    pivots: &[Item],
    target: &Item,
    count: usize,
) -> Result<Vec<Multiplier>, KohnError> {
    let v = d.ring.nvars();
    if pivots.len() + 1 != v {
        return Err(KohnError::Dimension(format!(
            "{} pivots for {} variables",
            pivots.len(),
            v
        )));
    }
    let vars: Vec<usize> = (0..v).collect();
    let mut out: Vec<Multiplier> = Vec::new();
    let mut cur = target.clone();
    for _ in 0..count {
        let mut items = pivots.to_vec();
        items.push(cur.clone());
        let polys: Vec<Polynomial> = items.iter().map(|i| i.poly().clone()).collect();
        if jacobian_det(&polys, &vars)?.is_zero() {
            break;
        }
        let m = gen_jacobian(d, &items, &vars)?;
        cur = Item::Mult(m.clone());
        out.push(m);
    }
    if out.is_empty() && count > 0 {
        return Err(KohnError::ZeroJacobian);
    }
    Ok(out)
}

/// A Weierstrass relation together with the ring it lives in.
#[derive(Debug, Clone)]
pub struct Relation {
    /// Auxiliary variables; the last `subs` of them stand for the substitutions.
    pub ring: Arc<Ring>,
    pub poly: Polynomial,
}

/// Least relation among `subs` modulo a zero-dimensional ideal. `None` when
/// the quotient is infinite.
fn quotient_relation(
    ideal: &Ideal,
    subs: &[Polynomial],
    aux_names: &[String],
) -> Result<Option<(Arc<Ring>, Polynomial)>, KohnError> {
    let Some(standard) = ideal.grevlex().standard_monomials() else {
        return Ok(None);
    };
    linear_relation(ideal, subs, aux_names, standard.len() + 1)
}

/// First linear dependence among the normal forms of `subs^α` modulo the
/// ideal, with monomials `α` tried by increasing degree, so the relation
/// found has least degree. Gives up after `limit` monomials.
fn linear_relation(
    ideal: &Ideal,
    subs: &[Polynomial],
    aux_names: &[String],
    limit: usize,
) -> Result<Option<(Arc<Ring>, Polynomial)>, KohnError> {
    let gb = ideal.grevlex();
    let aux = Ring::new(aux_names)?;
    let k = subs.len();
    let mut images: HashMap<Monomial, Polynomial> = HashMap::new();
    let mut rows: Vec<(Polynomial, Polynomial)> = Vec::new();
    let mut pivots: HashMap<Monomial, usize> = HashMap::new();
    let mut tried = 0;
    for deg in 0.. {
        let mut layer = Monomial::all_of_degree(k, deg);
        layer.sort_by(|a, b| a.cmp_grevlex(b));
        for m in layer {
            if tried == limit {
                return Ok(None);
            }
            tried += 1;
            let image = match (0..k).find(|&i| m.exp(i) > 0) {
                None => gb.normal_form(&Polynomial::one(ideal.ring())),
                Some(i) => {
                    let mut prev = m.clone();
                    prev.set_exp(i, m.exp(i) - 1);
                    gb.normal_form(&(&images[&prev] * &subs[i]))
                }
            };
            images.insert(m.clone(), image.clone());
            let mut vec = image;
            let mut combo = Polynomial::monomial(&aux, m, GaussianRational::one());
            while let Some(idx) = vec.terms().iter().find_map(|(t, _)| pivots.get(t).copied()) {
                let (row, row_combo) = &rows[idx];
                let lead = row.leading_term().expect("pivot rows are nonzero");
                let c = vec.coeff_of(&lead.0) * lead.1.inv().expect("nonzero pivot");
                vec = &vec - &row.scale(&c);
                combo = &combo - &row_combo.scale(&c);
            }
            if vec.is_zero() {
                return Ok(Some((aux, combo)));
            }
            let lead = vec.leading_term().expect("nonzero").0.clone();
            pivots.insert(lead, rows.len());
            rows.push((vec, combo));
        }
    }
    unreachable!("the degree loop only exits by returning")
}

/// The output of [`weierstrass_extract`].
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub multiplier: Multiplier,
    /// Degree in `t`.
    pub degree: u32,
    /// `W(t, y…)` in the auxiliary ring `(t, y…)`.
    pub relation: Relation,
}

/// Monomials tried before the search for `W` gives up.
const RELATION_SEARCH_LIMIT: usize = 600;

/// A polynomial `W(t, y)` of positive degree in `t` that vanishes on the
/// common zeros of the multipliers once `t = ℓ` and `y = h` are substituted,
/// so `W(ℓ, h) ∈ (ideal)` is a multiplier.
pub fn weierstrass_extract(
    d: &mut Derivation,
    ideal: &[Multiplier],
    subs: &[Item],
    linear_form: &Polynomial,
) -> Result<WeierstrassData, KohnError> {
    d.check_ring(linear_form)?;
    let mut wanted = vec!["t".to_string()];
    wanted.extend((1..=subs.len()).map(|k| format!("y{k}")));
    let aux_names = fresh_names(&d.ring, &wanted);
    let ipolys: Vec<Polynomial> = ideal.iter().map(|m| m.poly.clone()).collect();
    let spolys: Vec<Polynomial> = subs.iter().map(|s| s.poly().clone()).collect();
    let mut images = vec![linear_form.clone()];
    images.extend(spolys.iter().cloned());
    let members = Ideal::new(ipolys.clone())?;
    let (aux, w) = linear_relation(&members, &images, &aux_names, RELATION_SEARCH_LIMIT)?
        .ok_or_else(|| KohnError::NoWeierstrass("no relation of bounded degree".into()))?;
    if w.degree_in(0).unwrap_or(0) == 0 {
        return Err(KohnError::Genericity("the substitutions are dependent on the zero set".into()));
    }
    let w = w.monic();
    let degree = w.degree_in(0).expect("positive degree");
    let out = w.compose(&images);
    if out.is_zero() {
        return Err(KohnError::Genericity(
            "the linear form and substitutions are algebraically dependent".into(),
        ));
    }
    let cofactors = members.lift(&out).ok_or(KohnError::NotInIdeal)?;
    let cofactors = realign(ideal.iter().map(|m| &m.poly), cofactors, &d.ring);
    let eps = ideal
        .iter()
        .zip(&cofactors)
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, _)| m.epsilon.clone())
        .reduce(Epsilon::min)
        .ok_or(KohnError::IdentityFails)?;
    let witness = Witness::Weierstrass(WeierstrassWitness {
        aux_variables: aux_names,
        relation: w.to_string(),
        linear_form: linear_form.to_string(),
        ideal_inputs: ideal.len(),
        degree,
        cofactors: cofactors.iter().map(|c| c.to_string()).collect(),
    });
    let mut inputs: Vec<Source> = ideal.iter().map(|m| Source::Step(m.step)).collect();
    inputs.extend(subs.iter().map(|s| s.source()));
    let multiplier =
        d.push_multiplier(StepKind::WeierstrassExtraction, inputs, witness, out, eps);
    Ok(WeierstrassData {
        multiplier,
        degree,
        relation: Relation { ring: aux, poly: w },
    })
}

/// Inserts zero cofactors for generators that `Ideal::new` dropped.
fn realign<'a>(
    gens: impl Iterator<Item = &'a Polynomial>,
    lifted: Vec<Polynomial>,
    ring: &Arc<Ring>,
) -> Vec<Polynomial> {
    let mut it = lifted.into_iter();
    gens.map(|g| {
        if g.is_zero() {
            Polynomial::zero(ring)
        } else {
            it.next().expect("one cofactor per nonzero generator")
        }
    })
    .collect()
}

/// The output of [`elimination_relation`].
#[derive(Debug, Clone)]
pub struct EliminationData {
    /// `g(y…)` in the auxiliary ring of the substitutions.
    pub relation: Relation,
    /// Cofactors on the `W` inputs followed by the cofactor on `D`.
    pub cofactors: Vec<Polynomial>,
}

/// A nonzero `g(y)` with `g(h) ∈ (W_1, …, W_ν, D)` where
/// `D = Jac(ℓ_1, …, ℓ_ν, h…)`. The output `g(h)` is a relation, not a
/// multiplier.
pub(crate) fn elimination_relation(
    d: &mut Derivation,
    ws: &[Multiplier],
    subs: &[Item],
    linear_forms: &[Polynomial],
) -> Result<EliminationData, KohnError> {
    let v = d.ring.nvars();
    let spolys: Vec<Polynomial> = subs.iter().map(|s| s.poly().clone()).collect();
    let mut jac_rows = linear_forms.to_vec();
    jac_rows.extend(spolys.iter().cloned());
    let vars: Vec<usize> = (0..v).collect();
    let jacobian = jacobian_det(&jac_rows, &vars)?;
    if jacobian.is_zero() {
        return Err(KohnError::Genericity("Jac(ℓ, h) vanishes identically".into()));
    }
    let wanted: Vec<String> = (1..=subs.len()).map(|k| format!("y{k}")).collect();
    let aux_names = fresh_names(&d.ring, &wanted);
    let mut ideal: Vec<Polynomial> = ws.iter().map(|m| m.poly.clone()).collect();
    ideal.push(jacobian.clone());
    let members = Ideal::new(ideal.clone())?;
    let (aux, g) = quotient_relation(&members, &spolys, &aux_names)?.ok_or_else(|| {
        KohnError::Genericity("W(ℓ, h) and Jac(ℓ, h) share a curve".into())
    })?;
    let g = g.monic();
    let value = g.compose(&spolys);
    let cofactors = members.lift(&value).ok_or(KohnError::NotInIdeal)?;
    let cofactors = realign(ideal.iter(), cofactors, &d.ring);
    let witness = Witness::Elimination(EliminationWitness {
        aux_variables: aux_names,
        relation: g.to_string(),
        linear_forms: linear_forms.iter().map(|l| l.to_string()).collect(),
        ideal_inputs: ws.len(),
        cofactors: cofactors.iter().map(|c| c.to_string()).collect(),
    });
    let mut inputs: Vec<Source> = ws.iter().map(|m| Source::Step(m.step)).collect();
    inputs.extend(subs.iter().map(|s| s.source()));
    d.push(StepKind::EliminationRelation, inputs, witness, value, None);
    Ok(EliminationData {
        relation: Relation { ring: aux, poly: g },
        cofactors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn setup(gens: &[&str]) -> Derivation {
        let r = Ring::new(&["z", "w"]).unwrap();
        let g: Vec<Polynomial> = gens.iter().map(|s| parse_poly(s, &r).unwrap()).collect();
        Derivation::new(&g).unwrap()
    }

    fn p(d: &Derivation, s: &str) -> Polynomial {
        parse_poly(s, d.ring()).unwrap()
    }

    #[test]
    fn initial_jacobians() {
        let mut d = setup(&["z^2", "w^3 + w*z^5"]);
        let ms = initial_multipliers(&mut d).unwrap();
        let polys: Vec<String> = ms.iter().map(|m| m.poly.to_string()).collect();
        assert!(polys.contains(&"2*z^6 + 6*z*w^2".to_string()), "{polys:?}");
        assert!(polys.contains(&"2*z".to_string()), "{polys:?}");
        assert!(ms.iter().all(|m| m.epsilon == Epsilon::half()));
        assert!(d.steps().iter().all(|s| s.kind == StepKind::InitJacobian));
    }

    #[test]
    fn iteration_and_roots() {
        let mut d = setup(&["z^2", "w^3 + w*z^5"]);
        let f1 = Item::Pre(d.generator(0));
        let f2 = Item::Pre(d.generator(1));
        let hs = iterate_l_operator(&mut d, &[f1], &f2, 10).unwrap();
        let polys: Vec<String> = hs.iter().map(|m| m.poly.to_string()).collect();
        assert_eq!(polys, ["2*z^6 + 6*z*w^2", "24*z^2*w", "48*z^3"]);
        assert_eq!(hs[2].epsilon, Epsilon::new(1, 8));
        let z = root_taking(&mut d, &hs[2]).unwrap();
        assert_eq!(z.poly, p(&d, "z"));
        assert_eq!(z.epsilon, Epsilon::new(1, 24));
    }

    #[test]
    fn ideal_elements_check_their_identity() {
        let mut d = setup(&["z^2", "w^3 + w*z^5"]);
        let f1 = Item::Pre(d.generator(0));
        let f = gen_jacobian(&mut d, &[f1], &[0]).unwrap();
        let z = root_taking(&mut d, &f).unwrap();
        assert_eq!(z.epsilon, Epsilon::half());
        let wz5 = p(&d, "w*z^5");
        let wrong = p(&d, "w*z^3");
        let bad = ideal_element(&mut d, std::slice::from_ref(&z), &[wrong], &wz5);
        assert_eq!(bad, Err(KohnError::IdentityFails));
        let good = ideal_element_auto(&mut d, std::slice::from_ref(&z), &wz5).unwrap();
        assert_eq!(good.epsilon, Epsilon::half());
        let adj = adjust_premultiplier(
            &mut d,
            &[(1, GaussianRational::from_int(1))],
            &[(good, GaussianRational::from_int(-1))],
        )
        .unwrap();
        assert_eq!(adj.poly.to_string(), "w^3");
        assert_eq!(adj.epsilon_cap, Epsilon::half());
    }

    #[test]
    fn explicit_roots() {
        let mut d = setup(&["z^2", "w^2"]);
        let items = [Item::Pre(d.generator(0)), Item::Pre(d.generator(1))];
        let (zw, z, one) = (p(&d, "z*w"), p(&d, "z"), Polynomial::one(d.ring()));
        let f = gen_jacobian(&mut d, &items, &[0, 1]).unwrap();
        assert_eq!(f.poly.to_string(), "4*z*w");
        let r = root_taking(&mut d, &f).unwrap();
        assert_eq!(r.poly, zw);
        assert_eq!(r.epsilon, Epsilon::half());
        let sq = ideal_element(&mut d, std::slice::from_ref(&r), std::slice::from_ref(&zw), &zw.pow(2)).unwrap();
        let back = root_taking_explicit(&mut d, &sq, &zw, 2, &one).unwrap();
        assert_eq!(back.epsilon, Epsilon::new(1, 4));
        assert!(root_taking_explicit(&mut d, &sq, &z, 2, &one).is_err());
    }

    #[test]
    fn weierstrass_relation() {
        let mut d = setup(&["z^2", "w^2"]);
        let items = [Item::Pre(d.generator(0)), Item::Pre(d.generator(1))];
        let h = gen_jacobian(&mut d, &items, &[0, 1]).unwrap();
        let h = root_taking(&mut d, &h).unwrap();
        let h12 = adjust_premultiplier(
            &mut d,
            &[(0, GaussianRational::from_int(1)), (1, GaussianRational::from_int(1))],
            &[],
        )
        .unwrap();
        let lf = p(&d, "z + 2*w");
        let wd = weierstrass_extract(&mut d, std::slice::from_ref(&h), &[Item::Pre(h12.clone())], &lf).unwrap();
        // zw = 0 maps onto the two parabolas y = t^2 and 4y = t^2.
        assert_eq!(wd.degree, 4);
        assert!(wd.multiplier.poly.div_exact(&h.poly).is_some());
        let ed = elimination_relation(&mut d, std::slice::from_ref(&wd.multiplier), &[Item::Pre(h12)], &[lf]).unwrap();
        assert!(!ed.relation.poly.is_zero());
        assert_eq!(ed.cofactors.len(), 2);
    }
}
