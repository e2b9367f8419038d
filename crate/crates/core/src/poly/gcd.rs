//! Multivariate gcd by recursive primitive pseudo-remainder sequences, and
//! square-free parts by repeated gcd with all partial derivatives.

use super::{Monomial, PolyError, Polynomial};
use crate::coeff::GaussianRational;

/// Monic greatest common divisor (grevlex leading coefficient 1).
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    if a.is_zero() && b.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    if !super::same_ring(a.ring(), b.ring()) {
        return Err(PolyError::RingMismatch);
    }
    Ok(gcd_rec(a, b))
}

fn gcd_rec(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.ring());
    }
    if a.len() == 1 && b.len() == 1 {
        let m = a.terms()[0].0.gcd(&b.terms()[0].0);
        return Polynomial::monomial(a.ring(), m, GaussianRational::from_int(1));
    }
    let nvars = a.nvars();
    let Some(x) = (0..nvars).find(|&v| a.involves(v) || b.involves(v)) else {
        return Polynomial::one(a.ring());
    };
    match (a.involves(x), b.involves(x)) {
        (false, _) => return gcd_rec(a, &content(b, x)),
        (_, false) => return gcd_rec(&content(a, x), b),
        _ => {}
    }
    let ca = content(a, x);
    let cb = content(b, x);
    let c = gcd_rec(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(x) < q.degree_in(x) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() && q.involves(x) {
        let r = pseudo_rem(&p, &q, x);
        p = q;
        q = if r.is_zero() { r } else { primitive_part(&r, x) };
    }
    let g = if q.is_zero() {
        primitive_part(&p, x)
    } else {
        // Nonzero remainder free of x: the primitive parts are coprime.
        Polynomial::one(a.ring())
    };
    (&g * &c).monic()
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
fn content(p: &Polynomial, x: usize) -> Polynomial {
    let coeffs = p.coefficients_in(x);
    let mut g = Polynomial::zero(p.ring());
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd_rec(&g, c);
        if g.is_constant() {
            break;
        }
    }
    g
}

fn primitive_part(p: &Polynomial, x: usize) -> Polynomial {
    let c = content(p, x);
    p.div_exact(&c).expect("content divides").monic()
}

/// `lc(q)^k · p mod q` in `x`, where the leading coefficients are taken in `x`.
fn pseudo_rem(p: &Polynomial, q: &Polynomial, x: usize) -> Polynomial {
    let dq = q.degree_in(x).unwrap_or(0);
    let qc = q.coefficients_in(x);
    let lq = qc[dq as usize].clone();
    let mut r = p.clone();
    while let Some(dr) = r.degree_in(x) {
        if r.is_zero() || dr < dq {
            break;
        }
        let lr = r.coefficients_in(x)[dr as usize].clone();
        let mut shift = Monomial::one(p.nvars());
        shift.set_exp(x, dr - dq);
        let t = (&lr * q).mul_term(&shift, &GaussianRational::from_int(1));
        r = &(&lq * &r) - &t;
    }
    r
}

/// Returns `(sf, m)` where `sf` is the monic product of the distinct
/// irreducible factors of `p` and `m` the largest multiplicity among them.
pub fn squarefree_part(p: &Polynomial) -> Result<(Polynomial, u32), PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    if p.is_constant() {
        return Ok((Polynomial::one(p.ring()), 1));
    }
    let g1 = gcd_with_partials(p);
    let sf = p.div_exact(&g1).expect("gcd divides").monic();
    let mut m = 1;
    let mut g = g1;
    while !g.is_constant() {
        g = gcd_with_partials(&g);
        m += 1;
    }
    Ok((sf, m))
}

fn gcd_with_partials(p: &Polynomial) -> Polynomial {
    let mut g = p.clone();
    for v in 0..p.nvars() {
        let d = p.derivative(v);
        if d.is_zero() {
            continue;
        }
        g = gcd_rec(&g, &d);
        if g.is_constant() {
            break;
        }
    }
    g
}

/// Whether `p` has no repeated factor: `gcd(p, ∂p/∂z_i for all i)` is constant.
pub fn is_squarefree(p: &Polynomial) -> bool {
    !p.is_zero() && gcd_with_partials(p).is_constant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Ring};

    fn p(s: &str) -> Polynomial {
        parse_poly(s, &Ring::new(&["z", "w"]).unwrap()).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(poly_gcd(&p("z^2*w"), &p("z*w^2")).unwrap(), p("z*w"));
        assert_eq!(poly_gcd(&p("3*z - 6*w"), &p("0")).unwrap(), p("z - 2*w"));
        assert_eq!(poly_gcd(&p("z^2 - w^2"), &p("z - w")).unwrap(), p("z - w"));
        assert_eq!(
            poly_gcd(&p("(z+w)^2*(z-w*z+1)"), &p("(z+w)*(z^3+w)")).unwrap(),
            p("z+w")
        );
        assert!(poly_gcd(&p("z^2+1"), &p("z+w")).unwrap().is_one());
        assert_eq!(poly_gcd(&p("0"), &p("0")), Err(PolyError::ZeroInput));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&p("48*z^3")).unwrap(), (p("z"), 3));
        assert_eq!(squarefree_part(&p("z^2*w^4")).unwrap(), (p("z*w"), 4));
        let g = p("z*(3*w^2 + z^5)");
        assert_eq!(squarefree_part(&g).unwrap(), (g.monic(), 1));
        assert_eq!(
            squarefree_part(&p("(z-w)^2*(z+w)^3*z")).unwrap(),
            (p("(z-w)*(z+w)*z").monic(), 3)
        );
        assert!(is_squarefree(&p("z*w + 1")));
        assert!(!is_squarefree(&p("(z*w+1)^2")));
    }
}
