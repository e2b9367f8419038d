//! Brute-force linear-algebra checks, independent of the Gröbner engine.
//!
//! Everything here works in the finite-dimensional space of polynomials of
//! total degree at most `d`: an ideal is replaced by the span of all products
//! `m·g` of a monomial and a generator that stay within the degree cap, and
//! questions become exact rank computations over ℚ(i).

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::coeff::GaussianRational;
use crate::poly::{Monomial, Polynomial, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("degree cap {cap} is below the degree {degree} of an input")]
    CapTooSmall { cap: u32, degree: u32 },
    #[error("no power of the maximal ideal up to degree {cap} is visible at this cap")]
    TypeNotFound { cap: u32 },
    #[error("no generators")]
    Empty,
}

/// All monomials of total degree at most `cap`, ordered by degree and then
/// descending lexicographically within a degree.
#[derive(Debug, Clone)]
pub struct TruncationFrame {
    cap: u32,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl TruncationFrame {
    pub fn new(nvars: usize, cap: u32) -> Self {
        let basis: Vec<Monomial> = (0..=cap)
            .flat_map(|d| Monomial::all_of_degree(nvars, d))
            .collect();
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        TruncationFrame { cap, basis, index }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Row echelon form keyed by each row's grevlex-leading monomial.
struct Echelon {
    rows: HashMap<Monomial, Polynomial>,
}

impl Echelon {
    fn new() -> Self {
        Echelon {
            rows: HashMap::new(),
        }
    }

    fn reduce(&self, v: &Polynomial) -> Polynomial {
        let mut v = v.clone();
        while let Some((lm, lc)) = v.leading_term().cloned() {
            match self.rows.get(&lm) {
                Some(row) => v = &v - &row.scale(&lc),
                None => break,
            }
        }
        v
    }

    fn insert(&mut self, v: &Polynomial) {
        let r = self.reduce(v);
        if let Some((lm, _)) = r.leading_term() {
            let lm = lm.clone();
            self.rows.insert(lm, r.monic());
        }
    }

    fn contains(&self, v: &Polynomial) -> bool {
        self.reduce(v).is_zero()
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

fn max_degree(gens: &[Polynomial]) -> Result<u32, OracleError> {
    gens.iter()
        .filter_map(|g| g.total_degree())
        .max()
        .ok_or(OracleError::Empty)
}

fn ring_of(gens: &[Polynomial]) -> Result<Arc<Ring>, OracleError> {
    Ok(gens.first().ok_or(OracleError::Empty)?.ring().clone())
}

/// The span of every `m·g` with `deg(m·g) ≤ cap`.
fn truncated_span(gens: &[Polynomial], cap: u32) -> Echelon {
    let mut e = Echelon::new();
    let one = GaussianRational::from_int(1);
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let dg = g.total_degree().expect("nonzero");
        if dg > cap {
            continue;
        }
        for d in 0..=cap - dg {
            for m in Monomial::all_of_degree(g.nvars(), d) {
                e.insert(&g.mul_term(&m, &one));
            }
        }
    }
    e
}

/// Whether `p = Σ G_i·g_i` with every `deg(G_i·g_i) ≤ cap`.
pub fn member_linalg(gens: &[Polynomial], p: &Polynomial, cap: u32) -> Result<bool, OracleError> {
    let md = max_degree(gens)?;
    if md > cap {
        return Err(OracleError::CapTooSmall { cap, degree: md });
    }
    if let Some(dp) = p.total_degree() {
        if dp > cap {
            return Err(OracleError::CapTooSmall { cap, degree: dp });
        }
    }
    Ok(truncated_span(gens, cap).contains(p))
}

/// Least `k ≤ cap` such that every degree-`k` monomial passes
/// [`member_linalg`] at `cap`.
pub fn type_bruteforce(gens: &[Polynomial], cap: u32) -> Result<u32, OracleError> {
    let md = max_degree(gens)?;
    if md > cap {
        return Err(OracleError::CapTooSmall { cap, degree: md });
    }
    let ring = ring_of(gens)?;
    let span = truncated_span(gens, cap);
    let one = GaussianRational::from_int(1);
    for k in 1..=cap {
        let all = Monomial::all_of_degree(ring.nvars(), k)
            .into_iter()
            .all(|m| span.contains(&Polynomial::monomial(&ring, m, one.clone())));
        if all {
            return Ok(k);
        }
    }
    Err(OracleError::TypeNotFound { cap })
}

/// `dim k[z]/I` for an ideal containing `m^k`, with `k` found by
/// [`type_bruteforce`] at `cap`.
///
/// Modulo `m^k` the ideal is spanned by the truncations of the products
/// `m·g` with `deg m < k`, so the colength is the number of monomials below
/// degree `k` minus the rank of those truncations: the monomials that are not
/// pivots of the echelon form.
pub fn colength_staircase(gens: &[Polynomial], cap: u32) -> Result<usize, OracleError> {
    let k = type_bruteforce(gens, cap)?;
    let ring = ring_of(gens)?;
    let below = TruncationFrame::new(ring.nvars(), k - 1);
    let mut e = Echelon::new();
    let one = GaussianRational::from_int(1);
    for g in gens.iter().filter(|g| !g.is_zero()) {
        for d in 0..k {
            for m in Monomial::all_of_degree(ring.nvars(), d) {
                let prod = g.mul_term(&m, &one);
                let trunc = Polynomial::from_terms(
                    &ring,
                    prod.terms().iter().filter(|(t, _)| t.degree() < k).cloned(),
                );
                e.insert(&trunc);
            }
        }
    }
    Ok(below.len() - e.rank())
}

/// A cap at which [`member_linalg`] decides membership exactly for probes of
/// degree at most `probe_degree`, provided some `m^k` lies in the ideal.
///
/// If every degree-`k` monomial is a member at cap `d0`, then every monomial of
/// degree `e ≥ k` is a member at cap `d0 + e − k`, and a member of degree below
/// `k` is a combination whose excess terms have degree at most
/// `k − 1 + max generator degree`.
pub fn validity_cap(gens: &[Polynomial], probe_degree: u32, search_limit: u32) -> Result<u32, OracleError> {
    let md = max_degree(gens)?;
    for d0 in md..=search_limit {
        if let Ok(k) = type_bruteforce(gens, d0) {
            let reach = probe_degree.max(k - 1 + md);
            return Ok(d0 + reach.saturating_sub(k));
        }
    }
    Err(OracleError::TypeNotFound { cap: search_limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn gens(xs: &[&str]) -> Vec<Polynomial> {
        let r = Ring::new(&["z", "w"]).unwrap();
        xs.iter().map(|s| parse_poly(s, &r).unwrap()).collect()
    }

    #[test]
    fn frame_size() {
        assert_eq!(TruncationFrame::new(2, 3).len(), 10);
        assert_eq!(TruncationFrame::new(3, 2).len(), 10);
    }

    #[test]
    fn membership() {
        let g = gens(&["z", "w"]);
        let r = g[0].ring().clone();
        assert!(member_linalg(&g, &parse_poly("z*w", &r).unwrap(), 4).unwrap());
        let g = gens(&["z^3", "w^4"]);
        assert!(!member_linalg(&g, &parse_poly("z^2*w^3", &r).unwrap(), 8).unwrap());
        assert!(member_linalg(&g, &g[0], 8).unwrap());
        assert!(matches!(
            member_linalg(&g, &g[0], 3),
            Err(OracleError::CapTooSmall { .. })
        ));
    }

    #[test]
    fn colengths_and_types() {
        assert_eq!(colength_staircase(&gens(&["z^2", "w^3"]), 8).unwrap(), 6);
        assert_eq!(colength_staircase(&gens(&["z", "w"]), 4).unwrap(), 1);
        assert_eq!(colength_staircase(&gens(&["z^2 - w^3", "w^2"]), 8).unwrap(), 4);
        assert_eq!(type_bruteforce(&gens(&["z^3", "w^4"]), 10).unwrap(), 6);
        assert_eq!(type_bruteforce(&gens(&["z", "w"]), 2).unwrap(), 1);
        assert_eq!(type_bruteforce(&gens(&["z^2", "w^2"]), 5).unwrap(), 3);
        assert!(type_bruteforce(&gens(&["z^2"]), 8).is_err());
    }
}
