//! Search for a derivation that ends at the constant 1.
//!
//! The driver first tries a direct route: iterate `L = Jac(pivots, ·)` on an
//! initial Jacobian until it vanishes, take the root of the last iterate, and
//! close the multiplier set under adjustments of the pre-multipliers and
//! further Jacobians. If that stalls it runs the Weierstrass induction, which
//! adds one multiplier per stage until all `v` slots are multipliers.
//! Either route finishes by deriving every coordinate function and their
//! Jacobian, which is 1.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::procedures::{
    adjust_premultiplier, elimination_relation, gen_jacobian, generator_subsets, ideal_element,
    ideal_element_with_unit, iterate_l_operator, root_taking, root_taking_explicit,
    weierstrass_extract, Derivation,
};
use super::trace::{CoordinateChangeWitness, Source, Status, StepKind, Trace, Witness};
use super::{Item, KohnError, Multiplier, PreMultiplier};
use crate::coeff::GaussianRational;
use crate::groebner::{effective_type, local_member, local_type, Ideal, DEFAULT_TYPE_CAP};
use crate::poly::{jacobian_det, linear_form, scalar_determinant, squarefree_part, Monomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub seed: u64,
    /// Induction attempts with fresh generic choices after the direct route fails.
    pub max_retries: u32,
    pub type_cap: u32,
    /// Abandon an attempt once a derived polynomial exceeds this degree.
    pub degree_cap: Option<u32>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            max_retries: 16,
            type_cap: DEFAULT_TYPE_CAP,
            degree_cap: None,
        }
    }
}

fn constant(d: &Derivation, c: GaussianRational) -> Polynomial {
    Polynomial::constant(d.ring(), c)
}

fn is_unit(p: &Polynomial) -> bool {
    !p.constant_term().is_zero()
}

fn factorial(p: u32) -> GaussianRational {
    (1..=p as i64).fold(GaussianRational::from_int(1), |acc, k| {
        &acc * &GaussianRational::from_int(k)
    })
}

/// Shared machinery for both routes.
#[derive(Debug, Clone)]
struct Engine {
    d: Derivation,
    config: Config,
}

impl Engine {
    fn nvars(&self) -> usize {
        self.d.ring().nvars()
    }

    fn locally_primary(&self, polys: &[Polynomial]) -> bool {
        match Ideal::new(polys.to_vec()) {
            Ok(i) => local_type(&i, self.config.type_cap).is_ok(),
            Err(_) => false,
        }
    }

    fn check_degree(&self, p: &Polynomial) -> Result<(), KohnError> {
        match (self.config.degree_cap, p.total_degree()) {
            (Some(cap), Some(deg)) if deg > cap => Err(KohnError::Genericity(format!(
                "degree {deg} exceeds the cap {cap}"
            ))),
            _ => Ok(()),
        }
    }

    /// Derives 1 from a multiplier that is a unit at the origin and closes
    /// the trace.
    fn terminate_with(&mut self, m: &Multiplier) -> Result<(), KohnError> {
        let one = if m.poly.is_one() {
            m.clone()
        } else {
            let c = m.poly.constant_term().inv().ok_or(KohnError::NotAUnit)?;
            let unit = m.poly.scale(&c);
            let target = Polynomial::one(self.d.ring());
            let c = constant(&self.d, c);
            ideal_element_with_unit(&mut self.d, std::slice::from_ref(m), &[c], &unit, &target)?
        };
        self.d.push(
            StepKind::Termination,
            vec![Source::Step(one.step)],
            Witness::Empty {},
            one.poly.clone(),
            Some(one.epsilon.clone()),
        );
        Ok(())
    }

    /// An ideal element for `target` using as few of the most recent
    /// multipliers as possible: polynomial cofactors first, then a unit
    /// certificate.
    fn lift_recent(&mut self, pool: &[Multiplier], target: &Polynomial) -> Result<Multiplier, KohnError> {
        let n = pool.len();
        let prefix = |k: usize| -> Vec<Multiplier> { pool[n - k..].iter().rev().cloned().collect() };
        for k in 1..=n {
            let gens = prefix(k);
            let ideal = Ideal::new(gens.iter().map(|m| m.poly.clone()).collect())?;
            if let Some(cof) = ideal.lift(target) {
                return ideal_element(&mut self.d, &gens, &cof, target);
            }
        }
        for k in 1..=n {
            let gens = prefix(k);
            let ideal = Ideal::new(gens.iter().map(|m| m.poly.clone()).collect())?;
            if let Some(cert) = local_member(&ideal, target) {
                return ideal_element_with_unit(&mut self.d, &gens, &cert.cofactors, &cert.unit, target);
            }
        }
        Err(KohnError::NotInIdeal)
    }

    /// From a pool of multipliers generating an `m`-primary ideal at the
    /// origin: derive each coordinate, take their Jacobian and terminate.
    fn finalize(&mut self, pool: &[Multiplier]) -> Result<(), KohnError> {
        let v = self.nvars();
        let ring = self.d.ring().clone();
        let polys: Vec<Polynomial> = pool.iter().map(|m| m.poly.clone()).collect();
        let k = local_type(&Ideal::new(polys.clone())?, self.config.type_cap)?;
        let full = Ideal::new(polys)?;
        let mut coords: Vec<Item> = Vec::with_capacity(v);
        for i in 0..v {
            let z = Polynomial::var(&ring, i);
            if let Some(m) = pool
                .iter()
                .filter(|m| m.poly == z)
                .max_by(|a, b| a.epsilon.cmp(&b.epsilon))
            {
                coords.push(Item::Mult(m.clone()));
                continue;
            }
            let scaled = pool.iter().find(|m| {
                m.poly.len() == 1 && m.poly.terms()[0].0 == Monomial::var(v, i)
            });
            if let Some(m) = scaled {
                let c = m.poly.terms()[0].1.inv().expect("nonzero coefficient");
                let c = constant(&self.d, c);
                let zi = ideal_element(&mut self.d, std::slice::from_ref(m), &[c], &z)?;
                coords.push(Item::Mult(zi));
                continue;
            }
            let mut found = None;
            for e in 1..=k {
                let t = z.pow(e);
                if local_member(&full, &t).is_some() {
                    found = Some((e, self.lift_recent(pool, &t)?));
                    break;
                }
            }
            let (e, ie) = found.ok_or(KohnError::NotInIdeal)?;
            let zi = if e > 1 { root_taking(&mut self.d, &ie)? } else { ie };
            coords.push(Item::Mult(zi));
        }
        let vars: Vec<usize> = (0..v).collect();
        let one = gen_jacobian(&mut self.d, &coords, &vars)?;
        self.terminate_with(&one)
    }

    /// The direct route. `Ok(false)` when it stalls.
    fn fast_path(&mut self) -> Result<bool, KohnError> {
        let v = self.nvars();
        let gens = self.d.generators().to_vec();
        let vars: Vec<usize> = (0..v).collect();
        let mut chosen = None;
        for s in generator_subsets(gens.len(), v) {
            let polys: Vec<Polynomial> = s.iter().map(|&j| gens[j].clone()).collect();
            if jacobian_det(&polys, &vars)?.is_zero() || !self.locally_primary(&polys) {
                continue;
            }
            chosen = Some(s);
            break;
        }
        let Some(subset) = chosen else {
            return Ok(false);
        };
        let items: Vec<Item> = subset.iter().map(|&j| Item::Pre(self.d.generator(j))).collect();
        let h = gen_jacobian(&mut self.d, &items, &vars)?;
        if is_unit(&h.poly) {
            self.terminate_with(&h)?;
            return Ok(true);
        }

        // The generator of highest vanishing order is the target of L.
        let target_pos = (0..subset.len())
            .max_by_key(|&i| {
                let g = &gens[subset[i]];
                (g.vanishing_order().finite().unwrap_or(0), g.total_degree().unwrap_or(0), i)
            })
            .expect("nonempty subset");
        let pivots: Vec<Item> = items
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != target_pos)
            .map(|(_, it)| it.clone())
            .collect();
        let limit = gens.iter().filter_map(|g| g.total_degree()).sum::<u32>() as usize + v;
        let mut pool = vec![h.clone()];
        let iterates = match iterate_l_operator(&mut self.d, &pivots, &Item::Mult(h.clone()), limit) {
            Ok(it) => it,
            Err(KohnError::ZeroJacobian) => Vec::new(),
            Err(e) => return Err(e),
        };
        if iterates.len() == limit {
            return Ok(false);
        }
        for m in &iterates {
            self.check_degree(&m.poly)?;
            if is_unit(&m.poly) {
                self.terminate_with(m)?;
                return Ok(true);
            }
        }
        pool.extend(iterates);
        let last = pool.last().expect("nonempty").clone();
        self.take_root_if_needed(&last, &mut pool)?;

        let mut pres: Vec<PreMultiplier> = (0..gens.len()).map(|j| self.d.generator(j)).collect();
        let rounds = 4 * v + 2 * gens.len();
        for _ in 0..rounds {
            let polys: Vec<Polynomial> = pool.iter().map(|m| m.poly.clone()).collect();
            if self.locally_primary(&polys) {
                self.finalize(&pool)?;
                return Ok(true);
            }
            self.adjust(&mut pool, &mut pres)?;
            match self.next_jacobian(&pool, &pres)? {
                Some(m) => {
                    self.check_degree(&m.poly)?;
                    if is_unit(&m.poly) {
                        self.terminate_with(&m)?;
                        return Ok(true);
                    }
                    pool.push(m.clone());
                    self.take_root_if_needed(&m, &mut pool)?;
                }
                None => return Ok(false),
            }
        }
        Ok(false)
    }

    fn take_root_if_needed(&mut self, m: &Multiplier, pool: &mut Vec<Multiplier>) -> Result<(), KohnError> {
        if m.poly.is_constant() {
            return Ok(());
        }
        let (_, mult) = squarefree_part(&m.poly)?;
        if mult > 1 {
            let r = root_taking(&mut self.d, m)?;
            pool.push(r);
        }
        Ok(())
    }

    /// Replaces each generator by its normal form modulo the multipliers,
    /// recording the removed part as an ideal element.
    fn adjust(&mut self, pool: &mut Vec<Multiplier>, pres: &mut Vec<PreMultiplier>) -> Result<(), KohnError> {
        let ideal = Ideal::new(pool.iter().map(|m| m.poly.clone()).collect())?;
        let gb = ideal.grevlex();
        let one = GaussianRational::from_int(1);
        for j in 0..self.d.generators().len() {
            let f = self.d.generators()[j].clone();
            let r = gb.normal_form(&f);
            if r.is_zero() || r == f || pres.iter().any(|p| p.poly == r) {
                continue;
            }
            let removed = &f - &r;
            let ie = self.lift_recent(pool, &removed)?;
            let adj = adjust_premultiplier(&mut self.d, &[(j, one.clone())], &[(ie.clone(), -one.clone())])?;
            pool.push(ie);
            pres.insert(0, adj);
        }
        Ok(())
    }

    /// A nonzero Jacobian of recent multipliers and pre-multipliers that is
    /// not already in the ideal of the multipliers.
    fn next_jacobian(&mut self, pool: &[Multiplier], pres: &[PreMultiplier]) -> Result<Option<Multiplier>, KohnError> {
        const BUDGET: usize = 400;
        let v = self.nvars();
        let vars: Vec<usize> = (0..v).collect();
        let ideal = Ideal::new(pool.iter().map(|m| m.poly.clone()).collect())?;
        let recent: Vec<&Multiplier> = pool.iter().rev().collect();
        let mut tried = 0;
        for k in (1..v).rev() {
            for ms in generator_subsets(recent.len(), k) {
                for ps in generator_subsets(pres.len(), v - k) {
                    tried += 1;
                    if tried > BUDGET {
                        return Ok(None);
                    }
                    let mut items: Vec<Item> = ms.iter().map(|&i| Item::Mult(recent[i].clone())).collect();
                    items.extend(ps.iter().map(|&i| Item::Pre(pres[i].clone())));
                    let polys: Vec<Polynomial> = items.iter().map(|i| i.poly().clone()).collect();
                    let jac = jacobian_det(&polys, &vars)?;
                    if jac.is_zero() || ideal.contains(&jac) {
                        continue;
                    }
                    return gen_jacobian(&mut self.d, &items, &vars).map(Some);
                }
            }
        }
        Ok(None)
    }
}

/// The induction state after stage `ν`: `ν` multipliers and `v − ν`
/// pre-multipliers that together generate an `m`-primary ideal at the origin.
#[derive(Debug, Clone)]
pub struct AlgorithmState {
    engine: Engine,
    rng: ChaCha8Rng,
    generic: bool,
    multipliers: Vec<Multiplier>,
    pre: Vec<Item>,
    terminated: bool,
}

/// What an induction stage achieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageOutcome {
    Advanced,
    Terminated,
}

impl AlgorithmState {
    /// Stage one: the root of a Jacobian of generators (or of generic
    /// combinations of them) and pre-multipliers completing it to an
    /// `m`-primary ideal. With `generic` false the first attempts use the
    /// generators themselves and coordinate linear forms.
    pub fn initial(fs: &[Polynomial], config: &Config, generic: bool) -> Result<Self, KohnError> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self::initial_with_rng(fs, config, generic, &mut rng)
    }

    fn initial_with_rng(
        fs: &[Polynomial],
        config: &Config,
        generic: bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, KohnError> {
        let d = Derivation::new(fs)?;
        let mut st = AlgorithmState {
            engine: Engine {
                d,
                config: config.clone(),
            },
            rng: ChaCha8Rng::seed_from_u64(rng.gen()),
            generic,
            multipliers: Vec::new(),
            pre: Vec::new(),
            terminated: false,
        };
        let v = st.engine.nvars();
        let vars: Vec<usize> = (0..v).collect();
        let slots = st.choose_premultipliers(&[], v, |polys| {
            jacobian_det(polys, &vars).map(|j| !j.is_zero()).unwrap_or(false)
        })?;
        let h = gen_jacobian(&mut st.engine.d, &slots, &vars)?;
        if is_unit(&h.poly) {
            st.engine.terminate_with(&h)?;
            st.terminated = true;
            return Ok(st);
        }
        let h11 = root_taking(&mut st.engine.d, &h)?;
        let rest = st.choose_premultipliers(std::slice::from_ref(&h11.poly), v - 1, |_| true)?;
        st.multipliers.push(h11);
        st.pre = rest;
        Ok(st)
    }

    pub fn nu(&self) -> usize {
        self.multipliers.len()
    }

    pub fn multipliers(&self) -> &[Multiplier] {
        &self.multipliers
    }

    pub fn premultipliers(&self) -> &[Item] {
        &self.pre
    }

    pub fn derivation(&self) -> &Derivation {
        &self.engine.d
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    fn random_coeffs(&mut self, n: usize) -> Vec<i64> {
        loop {
            let c: Vec<i64> = (0..n).map(|_| self.rng.gen_range(-3..=3)).collect();
            if c.iter().any(|&x| x != 0) {
                return c;
            }
        }
    }

    /// `count` pre-multipliers `p` such that `fixed ∪ p` is `m`-primary at
    /// the origin and `accept(fixed ∪ p)` holds. Deterministic candidates
    /// (subsets of generators) come first unless the state is generic.
    fn choose_premultipliers(
        &mut self,
        fixed: &[Polynomial],
        count: usize,
        accept: impl Fn(&[Polynomial]) -> bool,
    ) -> Result<Vec<Item>, KohnError> {
        let gens = self.engine.d.generators().to_vec();
        let n = gens.len();
        let mut candidates: Vec<Vec<Vec<i64>>> = Vec::new();
        if !self.generic {
            for s in generator_subsets(n, count) {
                candidates.push(
                    s.iter()
                        .map(|&j| (0..n).map(|i| i64::from(i == j)).collect())
                        .collect(),
                );
            }
        }
        for _ in 0..8 {
            let draw: Vec<Vec<i64>> = (0..count).map(|_| self.random_coeffs(n)).collect();
            candidates.push(draw);
        }
        for cand in candidates {
            let polys: Vec<Polynomial> = cand
                .iter()
                .map(|c| {
                    c.iter().zip(&gens).fold(Polynomial::zero(self.engine.d.ring()), |acc, (&k, g)| {
                        &acc + &g.scale(&GaussianRational::from_int(k))
                    })
                })
                .collect();
            if polys.iter().any(|p| p.is_zero()) {
                continue;
            }
            let mut all = fixed.to_vec();
            all.extend(polys.iter().cloned());
            if !accept(&all) || !self.engine.locally_primary(&all) {
                continue;
            }
            let mut out = Vec::with_capacity(count);
            for c in &cand {
                let nz: Vec<(usize, GaussianRational)> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(j, &k)| (j, GaussianRational::from_int(k)))
                    .collect();
                if nz.len() == 1 && nz[0].1 == GaussianRational::from_int(1) {
                    out.push(Item::Pre(self.engine.d.generator(nz[0].0)));
                } else {
                    out.push(Item::Pre(adjust_premultiplier(&mut self.engine.d, &nz, &[])?));
                }
            }
            return Ok(out);
        }
        Err(KohnError::Genericity(
            "no combination of the generators completes an m-primary ideal".into(),
        ))
    }

    /// Linear forms `ℓ_1, …, ℓ_ν`: coordinates, or rows of a random
    /// invertible matrix recorded as a coordinate change.
    /// Coordinate choices of `ν` linear forms, in order.
    fn coordinate_forms(&self, nu: usize) -> Vec<Vec<Polynomial>> {
        let ring = self.engine.d.ring().clone();
        if self.generic {
            return Vec::new();
        }
        generator_subsets(self.engine.nvars(), nu)
            .into_iter()
            .map(|s| s.into_iter().map(|i| Polynomial::var(&ring, i)).collect())
            .collect()
    }

    /// `ν` rows of a random invertible matrix, recorded as a coordinate change.
    fn random_forms(&mut self, nu: usize) -> Vec<Polynomial> {
        let v = self.engine.nvars();
        let ring = self.engine.d.ring().clone();
        let matrix = loop {
            let m: Vec<Vec<GaussianRational>> = (0..v)
                .map(|_| (0..v).map(|_| GaussianRational::from_int(self.rng.gen_range(-3..=3))).collect())
                .collect();
            if !scalar_determinant(&m).is_zero() {
                break m;
            }
        };
        let det = scalar_determinant(&matrix);
        let witness = Witness::CoordinateChange(CoordinateChangeWitness {
            matrix: matrix
                .iter()
                .map(|r| r.iter().map(|c| c.to_string()).collect())
                .collect(),
        });
        self.engine.d.push(
            StepKind::CoordinateChange,
            Vec::new(),
            witness,
            Polynomial::constant(&ring, det),
            None,
        );
        matrix[..nu].iter().map(|r| linear_form(&ring, r)).collect()
    }
}

/// One stage of the Weierstrass induction: adds the multiplier `h_{ν+1,ν+1}`
/// and refreshes the remaining pre-multipliers. At the last stage the
/// derivation is finished.
///
/// Coordinate linear forms are tried first. Forms that turn out not to be
/// generic enough are replaced by random ones, up to a fixed number of tries.
pub fn induction_step(state: &mut AlgorithmState) -> Result<StageOutcome, KohnError> {
    const RANDOM_TRIES: usize = 4;
    if state.terminated {
        return Ok(StageOutcome::Terminated);
    }
    let mut last = None;
    let coordinates = state.coordinate_forms(state.nu());
    let tries = coordinates.len() + RANDOM_TRIES;
    let mut coordinates = coordinates.into_iter();
    for _ in 0..tries {
        let saved = state.clone();
        let lfs = match coordinates.next() {
            Some(lfs) => lfs,
            None => state.random_forms(state.nu()),
        };
        match stage(state, lfs) {
            Ok(o) => return Ok(o),
            Err(e) => {
                let rng = state.rng.clone();
                *state = saved;
                state.rng = rng;
                last = Some(e);
            }
        }
    }
    Err(last.expect("at least one try"))
}

fn stage(state: &mut AlgorithmState, lfs: Vec<Polynomial>) -> Result<StageOutcome, KohnError> {
    let v = state.engine.nvars();
    let nu = state.nu();
    let r = v - nu;
    let ring = state.engine.d.ring().clone();
    let hs = state.multipliers.clone();
    let pre = state.pre.clone();
    let pre_polys: Vec<Polynomial> = pre.iter().map(|p| p.poly().clone()).collect();

    let mut ws = Vec::with_capacity(nu);
    for l in &lfs {
        ws.push(weierstrass_extract(&mut state.engine.d, &hs, &pre, l)?);
    }
    let w_mults: Vec<Multiplier> = ws.iter().map(|w| w.multiplier.clone()).collect();
    let rel = elimination_relation(&mut state.engine.d, &w_mults, &pre, &lfs)?;

    // Iterate in the ring (t_1, …, t_ν, y_1, …, y_r).
    let mut names: Vec<String> = (1..=nu).map(|j| format!("t{j}")).collect();
    names.extend((1..=r).map(|k| format!("y{k}")));
    let vring = crate::poly::Ring::new(&names)?;
    let ys: Vec<usize> = (nu..nu + r).collect();
    let w_in: Vec<Polynomial> = ws
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let mut map = vec![j];
            map.extend(ys.iter().copied());
            w.relation.poly.embed(&vring, &map)
        })
        .collect();
    let g_in = rel.relation.poly.embed(&vring, &ys);
    let mut images = lfs.clone();
    images.extend(pre_polys.iter().cloned());
    let q = (0..nu - 1).fold(g_in.clone(), |acc, j| &acc * &w_in[j].derivative(j));
    let p = ws[nu - 1].degree;

    let mut v_cur = w_in[nu - 1].clone();
    let mut m_prev = w_mults[nu - 1].clone();
    let vars: Vec<usize> = (0..v).collect();
    for _ in 0..p {
        let mut items: Vec<Item> = w_mults[..nu - 1].iter().cloned().map(Item::Mult).collect();
        items.push(Item::Mult(m_prev.clone()));
        items.extend(pre.iter().cloned());
        let jac = gen_jacobian(&mut state.engine.d, &items, &vars)?;
        let dv = v_cur.derivative(nu - 1);
        let x = (0..nu - 1)
            .fold(dv.clone(), |acc, j| &acc * &w_in[j].derivative(j))
            .compose(&images);
        let next = &q * &dv;
        let target = next.compose(&images);
        state.engine.check_degree(&target)?;
        let mut cofactors: Vec<Polynomial> = rel.cofactors[..nu].iter().map(|a| a * &x).collect();
        cofactors.push(rel.cofactors[nu].clone());
        let mut gens = w_mults.clone();
        gens.push(jac);
        m_prev = ideal_element(&mut state.engine.d, &gens, &cofactors, &target)?;
        v_cur = next;
    }
    if is_unit(&m_prev.poly) {
        state.engine.terminate_with(&m_prev)?;
        state.terminated = true;
        return Ok(StageOutcome::Terminated);
    }

    let new = if r == 1 && nu == 1 {
        // V_p is a polynomial in y alone: y^e·U(y) with U(0) ≠ 0.
        let e = v_cur
            .terms()
            .iter()
            .map(|(m, _)| m.exp(nu))
            .min()
            .expect("nonzero");
        let ye = Polynomial::var(&vring, nu).pow(e);
        let u = v_cur.div_exact(&ye).expect("monomial factor");
        let u0 = u.constant_term().inv().expect("U(0) ≠ 0");
        let unit = u.compose(&images).scale(&u0);
        let h = pre_polys[0].clone();
        let target = h.pow(e);
        let c = constant(&state.engine.d, u0);
        let he = ideal_element_with_unit(
            &mut state.engine.d,
            &[m_prev.clone()],
            &[c],
            &unit,
            &target,
        )?;
        if e > 1 {
            let one = Polynomial::one(&ring);
            root_taking_explicit(&mut state.engine.d, &he, &h, e, &one)?
        } else {
            he
        }
    } else {
        // V_p = p!·Q^p·lc with Q = g·Π_{j<ν} ∂W_j and lc the leading
        // coefficient of W_ν in t_ν.
        let lc = w_in[nu - 1]
            .coefficients_in(nu - 1)
            .pop()
            .expect("positive degree");
        let qz = q.compose(&images);
        let pf = factorial(p);
        let root = if lc.is_constant() {
            let c = (&pf * &lc.constant_term()).inv().expect("nonzero");
            if p == 1 {
                // M_1 = lc·Q already.
                let c = constant(&state.engine.d, c);
                ideal_element(&mut state.engine.d, &[m_prev.clone()], &[c], &qz)?
            } else {
                let c = constant(&state.engine.d, c);
                root_taking_explicit(&mut state.engine.d, &m_prev, &qz, p, &c)?
            }
        } else {
            let lcz = lc.compose(&images);
            let r_poly = &qz * &lcz;
            let rm = if p == 1 {
                m_prev.clone()
            } else {
                let c = lcz.pow(p - 1).scale(&pf.inv().expect("nonzero"));
                root_taking_explicit(&mut state.engine.d, &m_prev, &r_poly, p, &c)?
            };
            let lc0 = lcz.constant_term();
            if lc0.is_zero() {
                rm
            } else {
                let inv = lc0.inv().expect("nonzero");
                let unit = lcz.scale(&inv);
                let c = constant(&state.engine.d, inv);
                ideal_element_with_unit(&mut state.engine.d, &[rm], &[c], &unit, &qz)?
            }
        };
        if is_unit(&root.poly) {
            state.engine.terminate_with(&root)?;
            state.terminated = true;
            return Ok(StageOutcome::Terminated);
        }
        let (_, mult) = squarefree_part(&root.poly)?;
        if mult > 1 {
            root_taking(&mut state.engine.d, &root)?
        } else {
            root
        }
    };

    let mut hs_next = hs;
    hs_next.push(new);
    let fixed: Vec<Polynomial> = hs_next.iter().map(|m| m.poly.clone()).collect();
    if nu + 1 == v {
        if !state.engine.locally_primary(&fixed) {
            return Err(KohnError::Genericity("the multipliers are not m-primary".into()));
        }
        state.multipliers = hs_next.clone();
        state.pre.clear();
        state.engine.finalize(&hs_next)?;
        state.terminated = true;
        return Ok(StageOutcome::Terminated);
    }
    let mut keep: Vec<Polynomial> = fixed.clone();
    keep.extend(pre_polys[1..].iter().cloned());
    let rest = if state.engine.locally_primary(&keep) {
        pre[1..].to_vec()
    } else {
        state.choose_premultipliers(&fixed, v - nu - 1, |_| true)?
    };
    state.multipliers = hs_next;
    state.pre = rest;
    Ok(StageOutcome::Advanced)
}

fn trace_of(d: Derivation, fs: &[Polynomial], config: &Config, status: Status, p_star: u32) -> Trace {
    Trace {
        ring: d.ring().clone(),
        generators: fs.to_vec(),
        config: config.clone(),
        steps: d.into_steps(),
        status,
        p_star: Some(p_star),
    }
}

/// Runs the algorithm on generators vanishing at the origin whose ideal
/// contains a power of the maximal ideal.
///
/// Errors are reserved for invalid input and an exceeded type cap; an
/// exhausted retry budget yields a trace with a failed status.
pub fn run_algorithm(fs: &[Polynomial], config: &Config) -> Result<Trace, KohnError> {
    let d = Derivation::new(fs)?;
    if d.ring().nvars() < 2 {
        return Err(KohnError::TooFewVariables);
    }
    if let Some(j) = fs.iter().position(|f| !f.constant_term().is_zero()) {
        return Err(KohnError::NonVanishingGenerator(j));
    }
    let ideal = Ideal::new(fs.to_vec())?;
    let p_star = effective_type(&ideal, config.type_cap)?.p_star;

    let mut engine = Engine {
        d,
        config: config.clone(),
    };
    let mut reason = match engine.fast_path() {
        Ok(true) => return Ok(trace_of(engine.d, fs, config, Status::Terminated, p_star)),
        Ok(false) => "direct route stalled".to_string(),
        Err(e) => e.to_string(),
    };
    let mut last_steps = engine.d;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for attempt in 0..config.max_retries {
        let generic = attempt > 0;
        let mut st = match AlgorithmState::initial_with_rng(fs, config, generic, &mut rng) {
            Ok(st) => st,
            Err(e) => {
                reason = e.to_string();
                continue;
            }
        };
        let mut failure = None;
        while !st.is_terminated() {
            if let Err(e) = induction_step(&mut st) {
                failure = Some(e);
                break;
            }
        }
        match failure {
            None => return Ok(trace_of(st.engine.d, fs, config, Status::Terminated, p_star)),
            Some(e) => {
                reason = e.to_string();
                last_steps = st.engine.d;
            }
        }
    }
    Ok(trace_of(
        last_steps,
        fs,
        config,
        Status::Failed(format!("retry budget exhausted: {reason}")),
        p_star,
    ))
}
