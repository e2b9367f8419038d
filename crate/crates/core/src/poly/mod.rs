//! Sparse multivariate polynomials over ℚ(i).
//!
//! Terms are stored in descending graded reverse lexicographic order with no
//! zero coefficients, so two polynomials over the same ring are equal exactly
//! when their term vectors are.

mod gcd;
mod monomial;
mod parse;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use self::gcd::{is_squarefree, poly_gcd, squarefree_part};
pub use self::monomial::Monomial;
pub use self::parse::parse_poly;

use crate::coeff::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("zero denominator at byte {pos}")]
    ZeroDenominator { pos: usize },
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("variable index {0} out of range")]
    VariableIndex(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("operation undefined for the zero polynomial")]
    ZeroInput,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
}

/// An ordered list of variable names. Polynomials hold an `Arc<Ring>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    names: Vec<String>,
}

impl Ring {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Ring>, PolyError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() {
            return Err(PolyError::InvalidRing("no variables".into()));
        }
        for (i, n) in names.iter().enumerate() {
            let mut chars = n.chars();
            let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(PolyError::InvalidRing(format!("bad variable name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(PolyError::InvalidRing(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Arc::new(Ring { names }))
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Vanishing order at the origin; the zero polynomial vanishes to infinite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

pub type Term = (Monomial, GaussianRational);

#[derive(Clone)]
pub struct Polynomial {
    ring: Arc<Ring>,
    terms: Vec<Term>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

pub(crate) fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn desc_grevlex(a: &Term, b: &Term) -> Ordering {
    b.0.cmp_grevlex(&a.0)
}

impl Polynomial {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, GaussianRational::one())
    }

    pub fn constant(ring: &Arc<Ring>, c: GaussianRational) -> Self {
        Self::monomial(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn var(ring: &Arc<Ring>, i: usize) -> Self {
        assert!(i < ring.nvars(), "variable index out of range");
        Self::monomial(ring, Monomial::var(ring.nvars(), i), GaussianRational::one())
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: GaussianRational) -> Self {
        assert_eq!(m.nvars(), ring.nvars());
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I: IntoIterator<Item = Term>>(ring: &Arc<Ring>, terms: I) -> Self {
        let mut acc: HashMap<Monomial, GaussianRational> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), ring.nvars());
            match acc.get_mut(&m) {
                Some(v) => *v += &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: &Arc<Ring>, acc: HashMap<Monomial, GaussianRational>) -> Self {
        let mut terms: Vec<Term> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(desc_grevlex);
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Assumes `terms` are already strictly descending in grevlex and nonzero.
    pub(crate) fn from_sorted_terms(ring: &Arc<Ring>, terms: Vec<Term>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0.cmp_grevlex(&w[1].0) == Ordering::Greater));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn constant_term(&self) -> GaussianRational {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => GaussianRational::zero(),
        }
    }

    /// Leading term under grevlex.
    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> GaussianRational {
        self.terms
            .first()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.exp(var)).max()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(var) > 0)
    }

    pub fn vanishing_order(&self) -> Order {
        match self.terms.iter().map(|(m, _)| m.degree()).min() {
            Some(d) => Order::Finite(d),
            None => Order::Infinite,
        }
    }

    pub fn coeff_of(&self, m: &Monomial) -> GaussianRational {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussianRational::zero)
    }

    fn assert_ring(&self, other: &Polynomial) {
        assert!(
            same_ring(&self.ring, &other.ring),
            "polynomial ring mismatch: {:?} vs {:?}",
            self.ring.names,
            other.ring.names
        );
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        self.assert_ring(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp_grevlex(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for (m, c) in &b[j..] {
            out.push((m.clone(), if negate { -c } else { c.clone() }));
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(PolyError::RingMismatch);
        }
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(PolyError::RingMismatch);
        }
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(PolyError::RingMismatch);
        }
        Ok(self.mul_impl(other))
    }

    fn mul_impl(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        if self.terms.len() * other.terms.len() > 64 {
            return self.mul_integral(other);
        }
        let mut acc: HashMap<Monomial, GaussianRational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Polynomial::from_map(&self.ring, acc)
    }

    /// Product over cleared denominators, so the inner loop is integer-only.
    fn mul_integral(&self, other: &Polynomial) -> Polynomial {
        let (da, a) = self.integral_terms();
        let (db, b) = other.integral_terms();
        let mut acc: HashMap<Monomial, (BigInt, BigInt)> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ra, ia) in &a {
            for (mb, rb, ib) in &b {
                let re = ra * rb - ia * ib;
                let im = ra * ib + ia * rb;
                let slot = acc.entry(ma.mul(mb)).or_default();
                slot.0 += re;
                slot.1 += im;
            }
        }
        let den = da * db;
        let terms = acc.into_iter().filter_map(|(m, (r, i))| {
            if r.is_zero() && i.is_zero() {
                return None;
            }
            let c = GaussianRational::new(
                BigRational::new(r, den.clone()),
                BigRational::new(i, den.clone()),
            );
            Some((m, c))
        });
        Polynomial::from_map(&self.ring, terms.collect())
    }

    /// A common denominator and the integer real and imaginary numerators.
    fn integral_terms(&self) -> (BigInt, Vec<(&Monomial, BigInt, BigInt)>) {
        let den = self.terms.iter().fold(BigInt::one(), |acc, (_, c)| {
            acc.lcm(c.re().denom()).lcm(c.im().denom())
        });
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let re = c.re().numer() * (&den / c.re().denom());
                let im = c.im().numer() * (&den / c.im().denom());
                (m, re, im)
            })
            .collect();
        (den, terms)
    }

    /// Multiplies by the single term `c·m`; term order is preserved.
    pub fn mul_term(&self, m: &Monomial, c: &GaussianRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (tm.mul(m), tc * c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, tc)| (m.clone(), tc * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Scales so the grevlex-leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Term-wise power rule in variable `var`. Panics if `var` is out of range.
    pub fn derivative(&self, var: usize) -> Polynomial {
        assert!(var < self.nvars(), "variable index out of range");
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.set_exp(var, e - 1);
            terms.push((nm, c * &GaussianRational::from_int(e as i64)));
        }
        // Lowering one exponent can reorder grevlex ties, so re-sort.
        terms.sort_by(desc_grevlex);
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    /// Substitutes `images[i]` for variable `i`. All images share one target ring.
    pub fn compose(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars(), "one image per variable");
        let target = images
            .first()
            .map(|p| p.ring.clone())
            .unwrap_or_else(|| self.ring.clone());
        // Each monomial's image is one cheap product with a single image away
        // from a smaller monomial's image.
        let mut memo: HashMap<Monomial, Polynomial> = HashMap::new();
        memo.insert(Monomial::one(self.nvars()), Polynomial::one(&target));
        let mut acc: HashMap<Monomial, GaussianRational> = HashMap::new();
        for (m, c) in &self.terms {
            let t = image_of(m, images, &mut memo);
            for (tm, tc) in &t.terms {
                let tc = tc * c;
                match acc.get_mut(tm) {
                    Some(v) => *v += &tc,
                    None => {
                        acc.insert(tm.clone(), tc);
                    }
                }
            }
        }
        Polynomial::from_map(&target, acc)
    }

    /// Re-expresses the polynomial in `target`, sending variable `i` to
    /// variable `mapping[i]` of the target ring.
    pub fn embed(&self, target: &Arc<Ring>, mapping: &[usize]) -> Polynomial {
        assert_eq!(mapping.len(), self.nvars());
        let n = target.nvars();
        Polynomial::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut nm = Monomial::one(n);
                for (i, &e) in m.exponents().iter().enumerate() {
                    nm.set_exp(mapping[i], nm.exp(mapping[i]) + e);
                }
                (nm, c.clone())
            }),
        )
    }

    /// Coefficients of `var^0, var^1, …` as polynomials free of `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = match self.degree_in(var) {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut buckets: Vec<Vec<Term>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(var) as usize;
            let mut nm = m.clone();
            nm.set_exp(var, 0);
            buckets[e].push((nm, c.clone()));
        }
        buckets
            .into_iter()
            .map(|ts| Polynomial::from_terms(&self.ring, ts))
            .collect()
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        self.assert_ring(divisor);
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = divisor.terms[0].clone();
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot: Vec<Term> = Vec::new();
        while let Some((m, c)) = rem.terms.first().cloned() {
            let qm = m.div(&lm)?;
            let qc = &c * &lc_inv;
            rem = rem.merge(&divisor.mul_term(&qm, &qc), true);
            quot.push((qm, qc));
        }
        Some(Polynomial::from_sorted_terms(&self.ring, quot))
    }

    /// Applies the linear substitution `z ↦ A·z`.
    pub fn linear_change(&self, matrix: &[Vec<GaussianRational>]) -> Result<Polynomial, PolyError> {
        linear_coordinate_change(self, matrix)
    }
}

fn image_of(m: &Monomial, images: &[Polynomial], memo: &mut HashMap<Monomial, Polynomial>) -> Polynomial {
    if let Some(p) = memo.get(m) {
        return p.clone();
    }
    let i = (0..m.nvars()).rev().find(|&i| m.exp(i) > 0).expect("the unit monomial is seeded");
    let mut smaller = m.clone();
    smaller.set_exp(i, m.exp(i) - 1);
    let p = &image_of(&smaller, images, memo) * &images[i];
    memo.insert(m.clone(), p.clone());
    p
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        parse::write_poly(self, f)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b Polynomial> for &'a Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &'b Polynomial) -> Polynomial {
                let f: fn(&Polynomial, &Polynomial) -> Polynomial = $body;
                f(self, rhs)
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'b> $tr<&'b Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &'b Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.merge(b, false));
binop!(Sub, sub, |a, b| a.merge(b, true));
binop!(Mul, mul, |a, b| {
    a.assert_ring(b);
    a.mul_impl(b)
});

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-GaussianRational::one())
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// The ring operations offered to callers that want errors instead of panics.
#[derive(Debug, Clone)]
pub enum Operand<'a> {
    Poly(&'a Polynomial),
    Scalar(&'a GaussianRational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Scale,
}

pub fn arith(op: ArithOp, a: &Polynomial, b: Operand<'_>) -> Result<Polynomial, PolyError> {
    match (op, b) {
        (ArithOp::Add, Operand::Poly(b)) => a.checked_add(b),
        (ArithOp::Sub, Operand::Poly(b)) => a.checked_sub(b),
        (ArithOp::Mul, Operand::Poly(b)) => a.checked_mul(b),
        (ArithOp::Scale, Operand::Scalar(c)) => Ok(a.scale(c)),
        (ArithOp::Scale, Operand::Poly(b)) if b.is_constant() => Ok(a.scale(&b.constant_term())),
        (ArithOp::Add | ArithOp::Sub | ArithOp::Mul, Operand::Scalar(c)) => {
            let b = Polynomial::constant(a.ring(), c.clone());
            arith(op, a, Operand::Poly(&b))
        }
        (ArithOp::Scale, Operand::Poly(_)) => Err(PolyError::DimensionMismatch(
            "scale expects a constant".into(),
        )),
    }
}

pub fn partial_derivative(p: &Polynomial, var: usize) -> Result<Polynomial, PolyError> {
    if var >= p.nvars() {
        return Err(PolyError::VariableIndex(var));
    }
    Ok(p.derivative(var))
}

/// Determinant of the `k×k` matrix `(∂ fs[r] / ∂ z_{vars[c]})`.
pub fn jacobian_det(fs: &[Polynomial], vars: &[usize]) -> Result<Polynomial, PolyError> {
    let k = fs.len();
    if k == 0 || vars.len() != k {
        return Err(PolyError::DimensionMismatch(format!(
            "{} functions against {} variables",
            k,
            vars.len()
        )));
    }
    let ring = fs[0].ring().clone();
    for f in fs {
        if !same_ring(f.ring(), &ring) {
            return Err(PolyError::RingMismatch);
        }
    }
    for (i, &v) in vars.iter().enumerate() {
        if v >= ring.nvars() {
            return Err(PolyError::VariableIndex(v));
        }
        if vars[..i].contains(&v) {
            return Err(PolyError::DimensionMismatch(format!("repeated variable {v}")));
        }
    }
    let matrix: Vec<Vec<Polynomial>> = fs
        .iter()
        .map(|f| vars.iter().map(|&v| f.derivative(v)).collect())
        .collect();
    Ok(determinant(&ring, &matrix))
}

/// Laplace expansion along the first row, memoised on the remaining column set.
pub fn determinant(ring: &Arc<Ring>, m: &[Vec<Polynomial>]) -> Polynomial {
    let k = m.len();
    let mut memo: HashMap<(usize, u64), Polynomial> = HashMap::new();
    fn rec(
        ring: &Arc<Ring>,
        m: &[Vec<Polynomial>],
        row: usize,
        cols: u64,
        memo: &mut HashMap<(usize, u64), Polynomial>,
    ) -> Polynomial {
        if row == m.len() {
            return Polynomial::one(ring);
        }
        if let Some(v) = memo.get(&(row, cols)) {
            return v.clone();
        }
        let mut acc = Polynomial::zero(ring);
        let mut sign_pos = true;
        for c in 0..m.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = &m[row][c];
            if !entry.is_zero() {
                let minor = rec(ring, m, row + 1, cols & !(1 << c), memo);
                let t = entry * &minor;
                acc = if sign_pos { &acc + &t } else { &acc - &t };
            }
            sign_pos = !sign_pos;
        }
        memo.insert((row, cols), acc.clone());
        acc
    }
    assert!(k < 64);
    rec(ring, m, 0, (1u64 << k) - 1, &mut memo)
}

/// Determinant of a constant matrix by exact Gaussian elimination.
pub fn scalar_determinant(a: &[Vec<GaussianRational>]) -> GaussianRational {
    let n = a.len();
    let mut m: Vec<Vec<GaussianRational>> = a.to_vec();
    let mut det = GaussianRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return GaussianRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = &det * &p;
        let pinv = p.inv().expect("pivot is nonzero");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &pinv;
            for c in col..n {
                let t = &factor * &m[col][c];
                m[r][c] -= &t;
            }
        }
    }
    det
}

/// Inverse of a constant matrix, `None` when singular.
pub fn scalar_inverse(a: &[Vec<GaussianRational>]) -> Option<Vec<Vec<GaussianRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<GaussianRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(piv, col);
        let pinv = m[col][col].inv()?;
        for c in 0..2 * n {
            m[col][c] = &m[col][c] * &pinv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in 0..2 * n {
                let t = &factor * &m[col][c];
                m[r][c] -= &t;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `p(A·z)`: variable `i` is replaced by `Σ_j A[i][j]·z_j`.
pub fn linear_coordinate_change(
    p: &Polynomial,
    matrix: &[Vec<GaussianRational>],
) -> Result<Polynomial, PolyError> {
    let n = p.nvars();
    if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(PolyError::DimensionMismatch(format!("expected a {n}×{n} matrix")));
    }
    if scalar_determinant(matrix).is_zero() {
        return Err(PolyError::SingularMatrix);
    }
    let ring = p.ring();
    let images: Vec<Polynomial> = matrix
        .iter()
        .map(|row| linear_form(ring, row))
        .collect();
    Ok(p.compose(&images))
}

/// `Σ_j coeffs[j]·z_j`.
pub fn linear_form(ring: &Arc<Ring>, coeffs: &[GaussianRational]) -> Polynomial {
    Polynomial::from_terms(
        ring,
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| (Monomial::var(ring.nvars(), j), c.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<Ring> {
        Ring::new(&["z", "w"]).unwrap()
    }

    fn p(s: &str) -> Polynomial {
        parse_poly(s, &ring()).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p("z+w") * &p("z-w"), p("z^2-w^2"));
    }

    #[test]
    fn additive_inverse_and_identity() {
        let q = p("3*z^2*w - 1/2*w + 7");
        assert!((&q + &(-&q)).is_zero());
        assert_eq!(q.scale(&GaussianRational::one()), q);
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("w^3 + w*z^5").derivative(1), p("3*w^2 + z^5"));
        assert_eq!(p("z^2").derivative(0), p("2*z"));
        assert!(p("w").derivative(0).is_zero());
        assert_eq!(partial_derivative(&p("z"), 2), Err(PolyError::VariableIndex(2)));
    }

    #[test]
    fn jacobians() {
        let j = jacobian_det(&[p("z^2"), p("w^3 + w*z^5")], &[0, 1]).unwrap();
        assert_eq!(j, p("2*z*(3*w^2 + z^5)"));
        assert!(jacobian_det(&[p("z"), p("w")], &[0, 1]).unwrap().is_one());
        assert_eq!(jacobian_det(&[p("z^2"), p("w^3")], &[0, 1]).unwrap(), p("6*z*w^2"));
        assert!(matches!(
            jacobian_det(&[p("z")], &[0, 1]),
            Err(PolyError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn vanishing_orders() {
        assert_eq!(p("6*z*w^2 + 2*z^6").vanishing_order(), Order::Finite(3));
        assert_eq!(p("1").vanishing_order(), Order::Finite(0));
        assert_eq!(p("0").vanishing_order(), Order::Infinite);
    }

    #[test]
    fn coordinate_changes() {
        let one = GaussianRational::one;
        let zero = GaussianRational::zero;
        let id = vec![vec![one(), zero()], vec![zero(), one()]];
        assert_eq!(linear_coordinate_change(&p("z"), &id).unwrap(), p("z"));
        let swap = vec![vec![zero(), one()], vec![one(), zero()]];
        assert_eq!(linear_coordinate_change(&p("z"), &swap).unwrap(), p("w"));
        let shear = vec![vec![one(), one()], vec![zero(), one()]];
        assert_eq!(linear_coordinate_change(&p("z*w"), &shear).unwrap(), p("z*w + w^2"));
        let singular = vec![vec![one(), one()], vec![one(), one()]];
        assert_eq!(
            linear_coordinate_change(&p("z"), &singular),
            Err(PolyError::SingularMatrix)
        );
    }

    #[test]
    fn exact_division() {
        assert_eq!(p("z^2 - w^2").div_exact(&p("z - w")), Some(p("z + w")));
        assert_eq!(p("z^2 + w").div_exact(&p("z")), None);
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let other = Ring::new(&["x", "y"]).unwrap();
        let q = Polynomial::var(&other, 0);
        assert_eq!(p("z").checked_add(&q), Err(PolyError::RingMismatch));
    }
}
