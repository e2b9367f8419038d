//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use kohn_core::poly::parse_poly;
use kohn_core::{Polynomial, Ring};

pub fn polys(vars: &[&str], gens: &[&str]) -> (Arc<Ring>, Vec<Polynomial>) {
    let ring = Ring::new(vars).expect("valid variable names");
    let ps = gens
        .iter()
        .map(|g| parse_poly(g, &ring).expect("valid polynomial"))
        .collect();
    (ring, ps)
}

/// `(z^M, w^N + w z^K)`, the family whose multipliers do not depend on `K`.
pub fn family(m: u32, n: u32, k: u32) -> Vec<Polynomial> {
    let f1 = format!("z^{m}");
    let f2 = format!("w^{n} + w*z^{k}");
    polys(&["z", "w"], &[&f1, &f2]).1
}

/// A pair that needs the induction route.
pub fn induction_pair() -> Vec<Polynomial> {
    polys(&["z", "w"], &["z^3 + z*w", "z^4 + 2*w^2"]).1
}

/// Three squares; the type is 4.
pub fn three_squares() -> Vec<Polynomial> {
    polys(&["x", "y", "z"], &["x^2", "y^2", "z^2"]).1
}
