//! Gröbner bases over ℚ(i): Buchberger's algorithm with the normal selection
//! strategy and the Gebauer–Möller criteria, normal forms, and cofactor
//! tracking for explicit ideal-membership certificates.

mod ideal;
mod local;

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::ideal::{
    colength, contains_poly, contains_power_of_max_ideal, effective_type, elimination_ideal, Ideal,
    TypeReport, DEFAULT_TYPE_CAP,
};
pub use self::local::{
    colon_ideal, local_colength, local_contains_primary, local_member, local_type, LocalCertificate,
};

use crate::coeff::GaussianRational;
use crate::poly::{Monomial, Polynomial, Ring, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("the zero ideal is not allowed")]
    ZeroIdeal,
    #[error("generators belong to different rings")]
    RingMismatch,
    #[error("no power of the maximal ideal up to degree {cap} lies in the ideal")]
    TypeCapExceeded { cap: u32 },
    #[error("no power of the maximal ideal lies in the ideal")]
    NotPrimary,
    #[error("ideal is not zero-dimensional at the origin")]
    NotZeroDimensional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonomialOrder {
    Grevlex,
    Lex,
    /// Eliminates the first `k` variables: grevlex on them, ties broken by
    /// grevlex on the rest.
    Block(usize),
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Grevlex => a.cmp_grevlex(b),
            MonomialOrder::Lex => a.cmp_lex(b),
            MonomialOrder::Block(k) => {
                let k = k.min(a.nvars());
                let (ea, eb) = (a.exponents(), b.exponents());
                grevlex_slices(&ea[..k], &eb[..k])
                    .then_with(|| grevlex_slices(&ea[k..], &eb[k..]))
            }
        }
    }

    fn sort(&self, terms: &mut [Term]) {
        terms.sort_by(|a, b| self.cmp(&b.0, &a.0));
    }
}

fn grevlex_slices(a: &[u32], b: &[u32]) -> Ordering {
    let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

/// Terms sorted descending in `ord`.
fn to_ordered(p: &Polynomial, ord: MonomialOrder) -> Vec<Term> {
    let mut t = p.terms().to_vec();
    if ord != MonomialOrder::Grevlex {
        ord.sort(&mut t);
    }
    t
}

fn from_ordered(ring: &Arc<Ring>, mut terms: Vec<Term>, ord: MonomialOrder) -> Polynomial {
    if ord != MonomialOrder::Grevlex {
        MonomialOrder::Grevlex.sort(&mut terms);
    }
    Polynomial::from_sorted_terms(ring, terms)
}

/// `a - c·m·b`, both inputs sorted descending in `ord`.
fn sub_scaled(a: &[Term], c: &GaussianRational, m: &Monomial, b: &[Term], ord: MonomialOrder) -> Vec<Term> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let bm = b[j].0.mul(m);
        match ord.cmp(&a[i].0, &bm) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((bm, -(c * &b[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let v = &a[i].1 - &(c * &b[j].1);
                if !num_traits::Zero::is_zero(&v) {
                    out.push((bm, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    for (bm, bc) in &b[j..] {
        out.push((bm.mul(m), -(c * bc)));
    }
    out
}

fn scale_terms(t: &mut [Term], c: &GaussianRational) {
    for (_, v) in t.iter_mut() {
        *v = &*v * c;
    }
}

#[derive(Clone)]
struct Elem {
    terms: Vec<Term>,
    /// Cofactors expressing this element in the original generators.
    rep: Option<Vec<Polynomial>>,
}

impl Elem {
    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn make_monic(&mut self) {
        let lc = self.terms[0].1.clone();
        if lc.is_one() {
            return;
        }
        let inv = lc.inv().expect("leading coefficient is nonzero");
        scale_terms(&mut self.terms, &inv);
        if let Some(rep) = &mut self.rep {
            for r in rep.iter_mut() {
                *r = r.scale(&inv);
            }
        }
    }
}

fn rep_sub(rep: &mut [Polynomial], c: &GaussianRational, m: &Monomial, other: &[Polynomial]) {
    for (r, o) in rep.iter_mut().zip(other) {
        if !o.is_zero() {
            *r = &*r - &o.mul_term(m, c);
        }
    }
}

/// Fully reduces `p` against the elements of `basis` selected by `active`.
/// Returns the remainder (and, if tracking, its updated representation).
fn reduce(mut p: Elem, basis: &[Elem], active: &[usize], ord: MonomialOrder) -> Elem {
    let mut rem: Vec<Term> = Vec::new();
    let mut head = 0;
    while head < p.terms.len() {
        let lm = &p.terms[head].0;
        let divisor = active
            .iter()
            .map(|&k| &basis[k])
            .find(|g| g.lm().divides(lm));
        match divisor {
            Some(g) => {
                let q = lm.div(g.lm()).expect("divisibility checked");
                let c = &p.terms[head].1 / &g.terms[0].1;
                p.terms = sub_scaled(&p.terms[head + 1..], &c, &q, &g.terms[1..], ord);
                head = 0;
                if let (Some(rep), Some(grep)) = (&mut p.rep, &g.rep) {
                    rep_sub(rep, &c, &q, grep);
                }
            }
            None => {
                rem.push(p.terms[head].clone());
                head += 1;
            }
        }
    }
    Elem {
        terms: rem,
        rep: p.rep,
    }
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

fn spoly(a: &Elem, b: &Elem, lcm: &Monomial, ord: MonomialOrder) -> Elem {
    let ma = lcm.div(a.lm()).expect("lcm divisible");
    let mb = lcm.div(b.lm()).expect("lcm divisible");
    let ca = a.terms[0].1.inv().expect("nonzero");
    let cb = b.terms[0].1.inv().expect("nonzero");
    let mut left: Vec<Term> = a.terms[1..].iter().map(|(m, c)| (m.mul(&ma), c * &ca)).collect();
    left = sub_scaled(&left, &cb, &mb, &b.terms[1..], ord);
    let rep = match (&a.rep, &b.rep) {
        (Some(ra), Some(rb)) => {
            let mut r: Vec<Polynomial> = ra.iter().map(|p| p.mul_term(&ma, &ca)).collect();
            rep_sub(&mut r, &cb, &mb, rb);
            Some(r)
        }
        _ => None,
    };
    Elem { terms: left, rep }
}

/// Gebauer–Möller update after appending element `h` to `basis`.
fn update(basis: &[Elem], active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: usize) {
    let lh = basis[h].lm().clone();
    let mut cands: Vec<Pair> = active
        .iter()
        // S-polynomials of two monomials vanish identically.
        .filter(|&&g| !(basis[g].terms.len() == 1 && basis[h].terms.len() == 1))
        .map(|&g| Pair {
            i: g,
            j: h,
            lcm: basis[g].lm().lcm(&lh),
        })
        .collect();
    // Chain criterion among the new pairs.
    let mut kept: Vec<Pair> = Vec::new();
    while let Some(p) = cands.pop() {
        let coprime = basis[p.i].lm().is_coprime(&lh);
        let dominated = cands.iter().chain(kept.iter()).any(|q| q.lcm.divides(&p.lcm));
        if coprime || !dominated {
            kept.push(p);
        }
    }
    // Product criterion.
    kept.retain(|p| !basis[p.i].lm().is_coprime(&lh));
    // Old pairs made redundant by h.
    pairs.retain(|p| {
        !(lh.divides(&p.lcm)
            && basis[p.i].lm().lcm(&lh) != p.lcm
            && basis[p.j].lm().lcm(&lh) != p.lcm)
    });
    pairs.extend(kept);
    active.retain(|&g| !lh.divides(basis[g].lm()));
    active.push(h);
}

/// Runs Buchberger; returns all elements and the indices of a (non-reduced)
/// Gröbner basis among them.
fn buchberger_core(gens: Vec<Elem>, ord: MonomialOrder) -> (Vec<Elem>, Vec<usize>) {
    let mut basis: Vec<Elem> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    for g in gens {
        let r = reduce(g, &basis, &active, ord);
        if r.terms.is_empty() {
            continue;
        }
        let mut r = r;
        r.make_monic();
        basis.push(r);
        let h = basis.len() - 1;
        update(&basis, &mut active, &mut pairs, h);
    }
    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&pairs[a], &pairs[b]);
                pa.lcm
                    .degree()
                    .cmp(&pb.lcm.degree())
                    .then_with(|| ord.cmp(&pa.lcm, &pb.lcm))
                    .then_with(|| (pa.i, pa.j).cmp(&(pb.i, pb.j)))
            })
            .expect("non-empty");
        let pair = pairs.swap_remove(best);
        let s = spoly(&basis[pair.i], &basis[pair.j], &pair.lcm, ord);
        let r = reduce(s, &basis, &active, ord);
        if r.terms.is_empty() {
            continue;
        }
        let mut r = r;
        r.make_monic();
        basis.push(r);
        let h = basis.len() - 1;
        update(&basis, &mut active, &mut pairs, h);
    }
    (basis, active)
}

/// Minimalises and tail-reduces a Gröbner basis; output sorted by leading
/// monomial, ascending.
fn reduce_basis(basis: &[Elem], active: &[usize], ord: MonomialOrder) -> Vec<Vec<Term>> {
    let mut min: Vec<usize> = Vec::new();
    for &a in active {
        let la = basis[a].lm();
        let redundant = active.iter().any(|&b| {
            b != a && {
                let lb = basis[b].lm();
                lb.divides(la) && (lb != la || b < a)
            }
        });
        if !redundant {
            min.push(a);
        }
    }
    let mut out: Vec<Vec<Term>> = Vec::with_capacity(min.len());
    for &a in &min {
        let others: Vec<usize> = min.iter().copied().filter(|&b| b != a).collect();
        let head = basis[a].terms[0].clone();
        let tail = Elem {
            terms: basis[a].terms[1..].to_vec(),
            rep: None,
        };
        let r = reduce(tail, basis, &others, ord);
        let mut terms = vec![head];
        terms.extend(r.terms);
        let mut e = Elem { terms, rep: None };
        e.make_monic();
        out.push(e.terms);
    }
    out.sort_by(|a, b| ord.cmp(&a[0].0, &b[0].0));
    out
}

/// A reduced Gröbner basis for one monomial order.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Arc<Ring>,
    order: MonomialOrder,
    ordered: Vec<Vec<Term>>,
    polys: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn compute(gens: &[Polynomial], order: MonomialOrder) -> Result<Self, GroebnerError> {
        let ring = gens.first().ok_or(GroebnerError::ZeroIdeal)?.ring().clone();
        if gens.iter().any(|g| !crate::poly::same_ring(g.ring(), &ring)) {
            return Err(GroebnerError::RingMismatch);
        }
        let elems: Vec<Elem> = gens
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| Elem {
                terms: to_ordered(g, order),
                rep: None,
            })
            .collect();
        if elems.is_empty() {
            return Err(GroebnerError::ZeroIdeal);
        }
        let (basis, active) = buchberger_core(elems, order);
        let ordered = reduce_basis(&basis, &active, order);
        let polys = ordered
            .iter()
            .map(|t| from_ordered(&ring, t.clone(), order))
            .collect();
        Ok(GroebnerBasis {
            ring,
            order,
            ordered,
            polys,
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.ordered.iter().map(|t| &t[0].0)
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.ordered.len() == 1 && self.ordered[0][0].0.is_one()
    }

    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        let basis: Vec<Elem> = self
            .ordered
            .iter()
            .map(|t| Elem {
                terms: t.clone(),
                rep: None,
            })
            .collect();
        let active: Vec<usize> = (0..basis.len()).collect();
        let r = reduce(
            Elem {
                terms: to_ordered(p, self.order),
                rep: None,
            },
            &basis,
            &active,
            self.order,
        );
        from_ordered(&self.ring, r.terms, self.order)
    }

    pub fn reduces_to_zero(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Whether a monomial lies in the leading-term ideal.
    pub fn is_leading(&self, m: &Monomial) -> bool {
        self.leading_monomials().any(|l| l.divides(m))
    }

    /// Every variable has a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> bool {
        let n = self.ring.nvars();
        (0..n).all(|v| {
            self.leading_monomials()
                .any(|m| m.exp(v) > 0 && (0..n).all(|u| u == v || m.exp(u) == 0))
        })
    }

    /// Monomials outside the leading-term ideal, or `None` if infinitely many.
    pub fn standard_monomials(&self) -> Option<Vec<Monomial>> {
        if self.is_unit_ideal() {
            return Some(Vec::new());
        }
        if !self.is_zero_dimensional() {
            return None;
        }
        let n = self.ring.nvars();
        let mut out = Vec::new();
        let mut d = 0;
        loop {
            let layer: Vec<Monomial> = Monomial::all_of_degree(n, d)
                .into_iter()
                .filter(|m| !self.is_leading(m))
                .collect();
            if layer.is_empty() {
                return Some(out);
            }
            out.extend(layer);
            d += 1;
        }
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn buchberger(gens: &[Polynomial], order: MonomialOrder) -> Result<Vec<Polynomial>, GroebnerError> {
    Ok(GroebnerBasis::compute(gens, order)?.polys)
}

/// Remainder of `p` on division by `basis` (assumed a Gröbner basis for `order`).
pub fn normal_form(p: &Polynomial, basis: &[Polynomial], order: MonomialOrder) -> Polynomial {
    let elems: Vec<Elem> = basis
        .iter()
        .filter(|b| !b.is_zero())
        .map(|b| Elem {
            terms: to_ordered(b, order),
            rep: None,
        })
        .collect();
    let active: Vec<usize> = (0..elems.len()).collect();
    let r = reduce(
        Elem {
            terms: to_ordered(p, order),
            rep: None,
        },
        &elems,
        &active,
        order,
    );
    from_ordered(p.ring(), r.terms, order)
}

/// A grevlex Gröbner basis whose elements carry cofactors in the original
/// generators, for producing explicit membership certificates.
#[derive(Clone)]
pub struct TrackedBasis {
    ring: Arc<Ring>,
    ngens: usize,
    elems: Vec<Elem>,
}

impl TrackedBasis {
    pub fn compute(gens: &[Polynomial]) -> Result<Self, GroebnerError> {
        let ring = gens.first().ok_or(GroebnerError::ZeroIdeal)?.ring().clone();
        if gens.iter().any(|g| !crate::poly::same_ring(g.ring(), &ring)) {
            return Err(GroebnerError::RingMismatch);
        }
        if gens.iter().all(|g| g.is_zero()) {
            return Err(GroebnerError::ZeroIdeal);
        }
        let n = gens.len();
        let elems: Vec<Elem> = gens
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_zero())
            .map(|(i, g)| {
                let mut rep = vec![Polynomial::zero(&ring); n];
                rep[i] = Polynomial::one(&ring);
                Elem {
                    terms: g.terms().to_vec(),
                    rep: Some(rep),
                }
            })
            .collect();
        let (basis, active) = buchberger_core(elems, MonomialOrder::Grevlex);
        let elems = active.iter().map(|&i| basis[i].clone()).collect();
        Ok(TrackedBasis {
            ring,
            ngens: n,
            elems,
        })
    }

    /// Cofactors `c` with `p = Σ c_i·gens_i`, or `None` if `p` is not in the ideal.
    pub fn lift(&self, p: &Polynomial) -> Option<Vec<Polynomial>> {
        let start = Elem {
            terms: p.terms().to_vec(),
            rep: Some(vec![Polynomial::zero(&self.ring); self.ngens]),
        };
        let active: Vec<usize> = (0..self.elems.len()).collect();
        let r = reduce(start, &self.elems, &active, MonomialOrder::Grevlex);
        if !r.terms.is_empty() {
            return None;
        }
        // reduce() tracks p - Σ q_k g_k = r with rep = -Σ q_k·rep_k.
        Some(r.rep.expect("tracked").into_iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn ring() -> Arc<Ring> {
        Ring::new(&["z", "w"]).unwrap()
    }

    fn ps(r: &Arc<Ring>, xs: &[&str]) -> Vec<Polynomial> {
        xs.iter().map(|s| parse_poly(s, r).unwrap()).collect()
    }

    #[test]
    fn trivial_bases() {
        let r = ring();
        for ord in [MonomialOrder::Grevlex, MonomialOrder::Lex, MonomialOrder::Block(1)] {
            let g = buchberger(&ps(&r, &["z", "w"]), ord).unwrap();
            assert_eq!(g.len(), 2);
            assert!(g.contains(&parse_poly("z", &r).unwrap()));
            assert!(g.contains(&parse_poly("w", &r).unwrap()));
        }
        assert_eq!(
            buchberger(&ps(&r, &["z", "z"]), MonomialOrder::Grevlex).unwrap(),
            ps(&r, &["z"])
        );
        assert_eq!(
            buchberger(&ps(&r, &["0"]), MonomialOrder::Grevlex),
            Err(GroebnerError::ZeroIdeal)
        );
    }

    #[test]
    fn lex_basis_already_reduced() {
        let r = ring();
        let g = buchberger(&ps(&r, &["z^2 - w", "w^2"]), MonomialOrder::Lex).unwrap();
        let mut want = ps(&r, &["z^2 - w", "w^2"]);
        let mut got = g.clone();
        want.sort_by_key(|p| p.to_string());
        got.sort_by_key(|p| p.to_string());
        assert_eq!(got, want);
    }

    #[test]
    fn normal_forms() {
        let r = ring();
        let p = |s| parse_poly(s, &r).unwrap();
        let g = buchberger(&ps(&r, &["z"]), MonomialOrder::Grevlex).unwrap();
        assert!(normal_form(&p("z^2"), &g, MonomialOrder::Grevlex).is_zero());
        let g = buchberger(&ps(&r, &["z^2 - w"]), MonomialOrder::Grevlex).unwrap();
        assert_eq!(normal_form(&p("z^2*w"), &g, MonomialOrder::Grevlex), p("w^2"));
        let g = buchberger(&ps(&r, &["z", "w"]), MonomialOrder::Grevlex).unwrap();
        assert_eq!(normal_form(&p("1"), &g, MonomialOrder::Grevlex), p("1"));
    }

    #[test]
    fn tracked_lift_reconstructs() {
        let r = ring();
        let gens = ps(&r, &["z^2 - w", "z*w - 1"]);
        let tb = TrackedBasis::compute(&gens).unwrap();
        let target = parse_poly("z^3*w + w^2 - z", &r).unwrap();
        let gb = GroebnerBasis::compute(&gens, MonomialOrder::Grevlex).unwrap();
        let member = gb.reduces_to_zero(&target);
        match tb.lift(&target) {
            Some(c) => {
                assert!(member);
                let sum = c
                    .iter()
                    .zip(&gens)
                    .fold(Polynomial::zero(&r), |acc, (ci, gi)| &acc + &(ci * gi));
                assert_eq!(sum, target);
            }
            None => assert!(!member),
        }
        let inside = &(&gens[0] * &parse_poly("w+3", &r).unwrap()) + &gens[1];
        let c = tb.lift(&inside).unwrap();
        let sum = c
            .iter()
            .zip(&gens)
            .fold(Polynomial::zero(&r), |acc, (ci, gi)| &acc + &(ci * gi));
        assert_eq!(sum, inside);
    }
}
