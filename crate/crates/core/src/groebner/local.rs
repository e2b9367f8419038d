//! Germ-level questions at the origin answered with polynomial computations.
//!
//! For an ideal `I` and a power `m^c` of the maximal ideal, `m^k ⊆ I·O_0`
//! holds iff `m^k ⊆ I + m^c` for any `c > k` (Nakayama), so local types and
//! colengths reduce to global computations on `I + m^c`. Local membership of a
//! single polynomial is certified by a unit: `u·t ∈ I` with `u(0) ≠ 0`.

use std::sync::Arc;

use num_traits::Zero;

use super::{GroebnerBasis, GroebnerError, Ideal, MonomialOrder};
use crate::coeff::GaussianRational;
use crate::poly::{Monomial, Polynomial, Ring};

fn with_max_power(ideal: &Ideal, c: u32) -> Ideal {
    let ring = ideal.ring();
    let mons: Vec<Polynomial> = Monomial::all_of_degree(ring.nvars(), c)
        .into_iter()
        .map(|m| Polynomial::monomial(ring, m, GaussianRational::from_int(1)))
        .collect();
    ideal.with(&mons).expect("nonzero generators")
}

fn contains_degree(gb: &GroebnerBasis, ring: &Arc<Ring>, k: u32) -> bool {
    Monomial::all_of_degree(ring.nvars(), k).into_iter().all(|m| {
        gb.is_leading(&m)
            && gb.reduces_to_zero(&Polynomial::monomial(ring, m, GaussianRational::from_int(1)))
    })
}

/// Least `k ≥ 1` with `m^k ⊆ I·O_0`.
pub fn local_type(ideal: &Ideal, cap: u32) -> Result<u32, GroebnerError> {
    if ideal.generators().iter().any(|g| !g.constant_term().is_zero()) {
        return Ok(1);
    }
    let ring = ideal.ring().clone();
    // An isolated zero has multiplicity at most the global colength.
    let bound = ideal
        .grevlex()
        .standard_monomials()
        .map(|s| u32::try_from(s.len()).unwrap_or(u32::MAX))
        .filter(|&n| n <= cap);
    let failure = match bound {
        Some(_) => GroebnerError::NotPrimary,
        None => GroebnerError::TypeCapExceeded { cap },
    };
    let cap = bound.unwrap_or(cap);
    let mut c = 4u32;
    loop {
        let c_eff = c.min(cap + 1);
        let j = with_max_power(ideal, c_eff);
        let gb = j.grevlex();
        for k in 1..c_eff {
            if contains_degree(&gb, &ring, k) {
                return Ok(k);
            }
        }
        if c_eff > cap {
            return Err(failure);
        }
        c *= 2;
    }
}

/// `dim O_0 / I·O_0`; zero when `I` contains a unit of the local ring.
pub fn local_colength(ideal: &Ideal, cap: u32) -> Result<usize, GroebnerError> {
    if ideal.generators().iter().any(|g| !g.constant_term().is_zero()) {
        return Ok(0);
    }
    let k = local_type(ideal, cap)?;
    super::colength(&with_max_power(ideal, k))
}

/// Whether `t ∈ I·O_0`, answered without a certificate. Requires the local
/// type of `I` (so only for ideals that are `m`-primary at the origin).
pub fn local_contains_primary(ideal: &Ideal, local_type: u32, t: &Polynomial) -> bool {
    with_max_power(ideal, local_type).contains(t)
}

/// `I : t`, or `None` when `t ∈ I` (the colon is the unit ideal).
pub fn colon_ideal(ideal: &Ideal, t: &Polynomial) -> Option<Ideal> {
    if ideal.contains(t) {
        return None;
    }
    let ring = ideal.ring();
    let n = ring.nvars();
    let mut tag = String::from("_s");
    while ring.index_of(&tag).is_some() {
        tag.push('_');
    }
    let mut names: Vec<String> = vec![tag];
    names.extend(ring.names().iter().cloned());
    let big = Ring::new(&names).expect("fresh variable name");
    let shift: Vec<usize> = (1..=n).collect();
    let s = Polynomial::var(&big, 0);
    let one = Polynomial::one(&big);
    let mut gens: Vec<Polynomial> = ideal
        .generators()
        .iter()
        .map(|g| &s * &g.embed(&big, &shift))
        .collect();
    gens.push(&(&one - &s) * &t.embed(&big, &shift));
    let gb = GroebnerBasis::compute(&gens, MonomialOrder::Block(1)).expect("nonzero");
    let quotients: Vec<Polynomial> = gb
        .polys()
        .iter()
        .filter(|p| !p.involves(0))
        .map(|p| {
            let back = Polynomial::from_terms(
                ring,
                p.terms()
                    .iter()
                    .map(|(m, c)| (Monomial::from_exponents(&m.exponents()[1..]), c.clone())),
            );
            back.div_exact(t).expect("intersection with (t) is divisible by t")
        })
        .collect();
    Ideal::new(quotients).ok()
}

/// A certificate `unit·t = Σ cofactors_i·generators_i` with `unit(0) ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCertificate {
    pub unit: Polynomial,
    pub cofactors: Vec<Polynomial>,
}

/// Decides `t ∈ I·O_0` and produces a certificate when it holds.
pub fn local_member(ideal: &Ideal, t: &Polynomial) -> Option<LocalCertificate> {
    let ring = ideal.ring();
    if let Some(cofactors) = ideal.lift(t) {
        return Some(LocalCertificate {
            unit: Polynomial::one(ring),
            cofactors,
        });
    }
    let colon = colon_ideal(ideal, t)?;
    let mut cands: Vec<Polynomial> = colon
        .grevlex()
        .polys()
        .iter()
        .filter(|p| !p.constant_term().is_zero())
        .cloned()
        .collect();
    cands.sort_by(|a, b| {
        a.total_degree()
            .cmp(&b.total_degree())
            .then_with(|| a.len().cmp(&b.len()))
            .then_with(|| a.to_string().cmp(&b.to_string()))
    });
    let unit = cands.into_iter().next()?;
    let unit = unit.scale(&unit.constant_term().inv().expect("nonzero"));
    let cofactors = ideal.lift(&(&unit * t)).expect("u·t lies in I by construction");
    Some(LocalCertificate { unit, cofactors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn ideal(gens: &[&str]) -> Ideal {
        let r = Ring::new(&["z", "w"]).unwrap();
        Ideal::new(gens.iter().map(|s| parse_poly(s, &r).unwrap()).collect()).unwrap()
    }

    #[test]
    fn local_invariants_ignore_far_components() {
        // (z - 1)·z together with w^2 has a second point at z = 1.
        let i = ideal(&["z^2 - z", "w^2"]);
        assert_eq!(local_type(&i, 64).unwrap(), 2);
        assert_eq!(local_colength(&i, 64).unwrap(), 2);
        assert_eq!(super::super::colength(&i).unwrap(), 4);
        assert_eq!(local_colength(&ideal(&["z + 1", "w"]), 64).unwrap(), 0);
        assert!(local_type(&ideal(&["z^2"]), 20).is_err());
    }

    #[test]
    fn unit_certificates() {
        let i = ideal(&["z^2 - z", "w^2"]);
        let t = parse_poly("z", i.ring()).unwrap();
        assert!(!i.contains(&t));
        let cert = local_member(&i, &t).unwrap();
        assert!(!cert.unit.constant_term().is_zero());
        let lhs = &cert.unit * &t;
        let rhs = cert
            .cofactors
            .iter()
            .zip(i.generators())
            .fold(Polynomial::zero(i.ring()), |acc, (c, g)| &acc + &(c * g));
        assert_eq!(lhs, rhs);
        assert!(local_member(&i, &parse_poly("w", i.ring()).unwrap()).is_none());
    }
}
