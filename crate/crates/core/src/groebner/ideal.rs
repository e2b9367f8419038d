use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{GroebnerBasis, GroebnerError, MonomialOrder, TrackedBasis};
use crate::poly::{same_ring, Monomial, Polynomial, Ring};

pub const DEFAULT_TYPE_CAP: u32 = 64;

type Slot<T> = Arc<OnceLock<T>>;

/// A nonzero polynomial ideal with lazily computed, cached Gröbner bases.
///
/// Each basis is computed at most once per monomial order; concurrent callers
/// asking for the same order wait on the same computation.
pub struct Ideal {
    ring: Arc<Ring>,
    gens: Vec<Polynomial>,
    bases: Mutex<HashMap<MonomialOrder, Slot<Arc<GroebnerBasis>>>>,
    tracked: OnceLock<Arc<TrackedBasis>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let bases = self.bases.lock().expect("basis cache poisoned").clone();
        let tracked = OnceLock::new();
        if let Some(t) = self.tracked.get() {
            let _ = tracked.set(t.clone());
        }
        Ideal {
            ring: self.ring.clone(),
            gens: self.gens.clone(),
            bases: Mutex::new(bases),
            tracked,
        }
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.gens.iter().map(|g| g.to_string())).finish()
    }
}

impl Ideal {
    /// Zero generators are dropped; an ideal with no nonzero generator is rejected.
    pub fn new(gens: Vec<Polynomial>) -> Result<Self, GroebnerError> {
        let ring = gens.first().ok_or(GroebnerError::ZeroIdeal)?.ring().clone();
        if gens.iter().any(|g| !same_ring(g.ring(), &ring)) {
            return Err(GroebnerError::RingMismatch);
        }
        let gens: Vec<Polynomial> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            return Err(GroebnerError::ZeroIdeal);
        }
        Ok(Ideal {
            ring,
            gens,
            bases: Mutex::new(HashMap::new()),
            tracked: OnceLock::new(),
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn basis(&self, order: MonomialOrder) -> Arc<GroebnerBasis> {
        let slot = {
            let mut map = self.bases.lock().expect("basis cache poisoned");
            map.entry(order).or_default().clone()
        };
        slot.get_or_init(|| {
            Arc::new(GroebnerBasis::compute(&self.gens, order).expect("generators validated"))
        })
        .clone()
    }

    pub fn grevlex(&self) -> Arc<GroebnerBasis> {
        self.basis(MonomialOrder::Grevlex)
    }

    pub fn tracked(&self) -> Arc<TrackedBasis> {
        self.tracked
            .get_or_init(|| Arc::new(TrackedBasis::compute(&self.gens).expect("generators validated")))
            .clone()
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.grevlex().reduces_to_zero(p)
    }

    /// Cofactors `c` with `p = Σ c_i·generators_i`.
    pub fn lift(&self, p: &Polynomial) -> Option<Vec<Polynomial>> {
        if !self.contains(p) {
            return None;
        }
        self.tracked().lift(p)
    }

    pub fn is_unit(&self) -> bool {
        self.grevlex().is_unit_ideal()
    }

    /// `self + (extra)`.
    pub fn with(&self, extra: &[Polynomial]) -> Result<Ideal, GroebnerError> {
        let mut g = self.gens.clone();
        g.extend(extra.iter().cloned());
        Ideal::new(g)
    }
}

/// Whether `p` lies in the polynomial ideal generated by `ideal`.
pub fn contains_poly(ideal: &Ideal, p: &Polynomial) -> bool {
    ideal.contains(p)
}

/// Whether every monomial of total degree `k` lies in the ideal.
pub fn contains_power_of_max_ideal(ideal: &Ideal, k: u32) -> bool {
    let gb = ideal.grevlex();
    let n = ideal.ring.nvars();
    let ring = &ideal.ring;
    Monomial::all_of_degree(n, k).into_iter().all(|m| {
        gb.is_leading(&m) && gb.reduces_to_zero(&Polynomial::monomial(ring, m, 1.into()))
    })
}

/// The least `p*` with `m^{p*} ⊆ I`, and the bracket `[p*/(v+2), p*]` it
/// gives for the finite type of the associated domain in `v` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeReport {
    pub p_star: u32,
    pub nvars: usize,
    pub lower_bound: BigRational,
    pub upper_bound: u32,
}

impl TypeReport {
    pub fn new(p_star: u32, nvars: usize) -> Self {
        TypeReport {
            p_star,
            nvars,
            lower_bound: BigRational::new(BigInt::from(p_star), BigInt::from(nvars as u64 + 2)),
            upper_bound: p_star,
        }
    }
}

impl fmt::Display for TypeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lb = if self.lower_bound.is_integer() {
            self.lower_bound.numer().to_string()
        } else {
            format!("{}/{}", self.lower_bound.numer(), self.lower_bound.denom())
        };
        write!(f, "p* = {}; p in [{}, {}]", self.p_star, lb, self.upper_bound)
    }
}

/// Searches `k = 1..=cap` for the least `k` with `m^k ⊆ I`. An ideal with
/// positive-dimensional zero set, or one that fails at `k` equal to its
/// colength, has no such `k` at all.
pub fn effective_type(ideal: &Ideal, cap: u32) -> Result<TypeReport, GroebnerError> {
    let gb = ideal.grevlex();
    let n = ideal.ring.nvars();
    if gb.is_unit_ideal() {
        return Ok(TypeReport::new(1, n));
    }
    let standard = gb.standard_monomials().ok_or(GroebnerError::NotPrimary)?;
    // A standard monomial of degree d is outside I, so p* > d.
    let start = standard.iter().map(|m| m.degree()).max().unwrap_or(0) + 1;
    // An m-primary ideal of colength N contains m^N.
    let last = u32::try_from(standard.len()).unwrap_or(u32::MAX);
    for k in start.max(1)..=cap.min(last) {
        if contains_power_of_max_ideal(ideal, k) {
            return Ok(TypeReport::new(k, n));
        }
    }
    if last <= cap {
        return Err(GroebnerError::NotPrimary);
    }
    Err(GroebnerError::TypeCapExceeded { cap })
}

/// Number of standard monomials: the dimension of `k[z]/I`.
pub fn colength(ideal: &Ideal) -> Result<usize, GroebnerError> {
    ideal
        .grevlex()
        .standard_monomials()
        .map(|s| s.len())
        .ok_or(GroebnerError::NotZeroDimensional)
}

/// Elements of `I` involving only the variables in `keep`, computed with a
/// block order that eliminates the others. `None` for the zero ideal.
pub fn elimination_ideal(ideal: &Ideal, keep: &[usize]) -> Option<Ideal> {
    let n = ideal.ring.nvars();
    let elim: Vec<usize> = (0..n).filter(|v| !keep.contains(v)).collect();
    if elim.is_empty() {
        return Some(ideal.clone());
    }
    let kept: Vec<usize> = (0..n).filter(|v| keep.contains(v)).collect();
    // Permute so eliminated variables come first.
    let perm: Vec<usize> = elim.iter().chain(kept.iter()).copied().collect();
    let mut inverse = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    let names: Vec<&str> = perm.iter().map(|&v| ideal.ring.names()[v].as_str()).collect();
    let pring = Ring::new(&names).expect("permutation of a valid ring");
    let gens: Vec<Polynomial> = ideal
        .gens
        .iter()
        .map(|g| g.embed(&pring, &inverse))
        .collect();
    let gb = GroebnerBasis::compute(&gens, MonomialOrder::Block(elim.len())).ok()?;
    let k = elim.len();
    let out: Vec<Polynomial> = gb
        .polys()
        .iter()
        .filter(|p| (0..k).all(|v| !p.involves(v)))
        .map(|p| p.embed(&ideal.ring, &perm))
        .collect();
    Ideal::new(out).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn ideal(vars: &[&str], gens: &[&str]) -> Ideal {
        let r = Ring::new(vars).unwrap();
        Ideal::new(gens.iter().map(|s| parse_poly(s, &r).unwrap()).collect()).unwrap()
    }

    #[test]
    fn membership() {
        let i = ideal(&["z", "w"], &["z^3", "w^4"]);
        assert!(!i.contains(&parse_poly("z^2*w^3", i.ring()).unwrap()));
        let i = ideal(&["z", "w"], &["z", "w"]);
        assert!(i.contains(&parse_poly("3*z*w - 7*w^5 + z", i.ring()).unwrap()));
        let i = ideal(&["z", "w"], &["z"]);
        assert!(i.contains(&parse_poly("w*z^5", i.ring()).unwrap()));
    }

    #[test]
    fn powers_of_maximal_ideal() {
        let i = ideal(&["z", "w"], &["z^2", "w^2"]);
        assert!(contains_power_of_max_ideal(&i, 3));
        assert!(!contains_power_of_max_ideal(&i, 2));
        assert!(contains_power_of_max_ideal(&ideal(&["z", "w"], &["z", "w"]), 1));
        // Leading-term inclusion alone is not enough here.
        let i = ideal(&["z", "w"], &["z^2 - w", "w^2"]);
        assert!(!contains_power_of_max_ideal(&i, 2));
    }

    #[test]
    fn types() {
        assert_eq!(effective_type(&ideal(&["z", "w"], &["z^3", "w^4"]), 64).unwrap().p_star, 6);
        assert_eq!(effective_type(&ideal(&["z", "w"], &["z", "w"]), 64).unwrap().p_star, 1);
        assert_eq!(effective_type(&ideal(&["z", "w"], &["z^2", "w^2"]), 64).unwrap().p_star, 3);
        assert_eq!(
            effective_type(&ideal(&["z", "w"], &["z^2"]), 64),
            Err(GroebnerError::NotPrimary)
        );
        assert_eq!(
            effective_type(&ideal(&["z", "w"], &["z^2 - z", "w^2"]), 64),
            Err(GroebnerError::NotPrimary)
        );
        assert_eq!(
            effective_type(&ideal(&["z", "w"], &["z^5", "w^5"]), 4),
            Err(GroebnerError::TypeCapExceeded { cap: 4 })
        );
        assert_eq!(
            effective_type(&ideal(&["z", "w"], &["z^3", "w^4"]), 64).unwrap().to_string(),
            "p* = 6; p in [3/2, 6]"
        );
    }

    #[test]
    fn colengths() {
        assert_eq!(colength(&ideal(&["z", "w"], &["z^2", "w^3"])).unwrap(), 6);
        assert_eq!(colength(&ideal(&["z", "w"], &["z", "w"])).unwrap(), 1);
        assert_eq!(colength(&ideal(&["z", "w"], &["z^2 - w^3", "w^2"])).unwrap(), 4);
        assert_eq!(
            colength(&ideal(&["z", "w"], &["z^2"])),
            Err(GroebnerError::NotZeroDimensional)
        );
    }

    #[test]
    fn eliminations() {
        let i = ideal(&["z", "y1", "y2"], &["y1 - z^2", "y2 - z^3"]);
        let e = elimination_ideal(&i, &[1, 2]).unwrap();
        let want = parse_poly("y1^3 - y2^2", i.ring()).unwrap();
        assert_eq!(e.generators().len(), 1);
        assert_eq!(e.generators()[0].monic(), want.monic());

        let i = ideal(&["z", "w", "y"], &["z^2", "y - w"]);
        let e = elimination_ideal(&i, &[1, 2]).unwrap();
        assert_eq!(e.generators().len(), 1);
        assert_eq!(e.generators()[0].monic(), parse_poly("y - w", i.ring()).unwrap().monic());

        let e = elimination_ideal(&i, &[0, 1, 2]).unwrap();
        assert_eq!(e.generators(), i.generators());

        assert!(elimination_ideal(&ideal(&["z", "w"], &["z"]), &[1]).is_none());
    }
}
