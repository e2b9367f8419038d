//! The effective Kohn algorithm on polynomial pre-multipliers: multiplier
//! bookkeeping with an exact subellipticity-order ledger, the allowable
//! procedures, the induction driver and an independent trace auditor.

mod audit;
mod classic;
mod driver;
mod procedures;
mod trace;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use self::audit::{audit_trace, AuditReport, Violation};
pub use self::classic::{classic_radical_step, compare_classic, ClassicComparison};
pub use self::driver::{induction_step, run_algorithm, AlgorithmState, Config, StageOutcome};
pub use self::procedures::{
    adjust_premultiplier, gen_jacobian, ideal_element, ideal_element_auto, ideal_element_with_unit,
    initial_multipliers, iterate_l_operator, root_taking, root_taking_explicit, weierstrass_extract,
    Derivation,
};
pub use self::trace::{
    AdjustWitness, EliminationWitness, IdealElementWitness, JacobianWitness, RootMode, RootWitness,
    Source, Status, Step, StepKind, Trace, TraceParseError, WeierstrassWitness, Witness,
    CoordinateChangeWitness,
};

use crate::groebner::GroebnerError;
use crate::poly::{PolyError, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KohnError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error("generator f{0} does not vanish at the origin")]
    NonVanishingGenerator(usize),
    #[error("need at least two variables")]
    TooFewVariables,
    #[error("no generators")]
    NoGenerators,
    #[error("Jacobian determinant is identically zero")]
    ZeroJacobian,
    #[error("all candidate Jacobians are identically zero")]
    DegenerateInput,
    #[error("cofactor identity does not hold")]
    IdentityFails,
    #[error("target is not in the ideal generated by the given multipliers")]
    NotInIdeal,
    #[error("target is the zero polynomial")]
    ZeroTarget,
    #[error("root taking needs a nonconstant multiplier")]
    ConstantInput,
    #[error("unit witness must not vanish at the origin")]
    NotAUnit,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("no Weierstrass polynomial of positive degree: {0}")]
    NoWeierstrass(String),
    #[error("genericity check failed: {0}")]
    Genericity(String),
}

/// An exact subellipticity order, printed as `num/den`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Epsilon(BigRational);

impl Epsilon {
    pub fn new(num: i64, den: i64) -> Self {
        Epsilon(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn one() -> Self {
        Epsilon(BigRational::one())
    }

    pub fn half() -> Self {
        Self::new(1, 2)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Epsilon(r)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// `½·self`.
    pub fn halved(&self) -> Self {
        Epsilon(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn divided_by(&self, m: u32) -> Self {
        Epsilon(&self.0 / BigRational::from_integer(BigInt::from(m)))
    }

    pub fn min(self, other: Self) -> Self {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    /// `0 < ε ≤ 1`.
    pub fn in_unit_interval(&self) -> bool {
        self.0.is_positive() && self.0 <= BigRational::one()
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Epsilon {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad numerator in `{s}`"))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad denominator in `{s}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        Ok(Epsilon(BigRational::new(n, d)))
    }
}

/// A polynomial certified as a multiplier by the step that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiplier {
    pub poly: Polynomial,
    pub epsilon: Epsilon,
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreKind {
    /// The generator `f_j` (0-based index).
    Initial(usize),
    /// Produced by the given `AdjustPreMultiplier` step.
    Adjusted(usize),
}

/// Raw material for Jacobian procedures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreMultiplier {
    pub poly: Polynomial,
    pub kind: PreKind,
    pub epsilon_cap: Epsilon,
}

impl PreMultiplier {
    pub fn source(&self) -> Source {
        match self.kind {
            PreKind::Initial(j) => Source::Generator(j),
            PreKind::Adjusted(s) => Source::Step(s),
        }
    }
}

/// An entry of a Jacobian procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Pre(PreMultiplier),
    Mult(Multiplier),
}

impl Item {
    pub fn poly(&self) -> &Polynomial {
        match self {
            Item::Pre(p) => &p.poly,
            Item::Mult(m) => &m.poly,
        }
    }

    /// Ledger contribution: the multiplier's ε or the pre-multiplier's cap.
    pub fn order(&self) -> &Epsilon {
        match self {
            Item::Pre(p) => &p.epsilon_cap,
            Item::Mult(m) => &m.epsilon,
        }
    }

    pub fn source(&self) -> Source {
        match self {
            Item::Pre(p) => p.source(),
            Item::Mult(m) => Source::Step(m.step),
        }
    }
}

impl From<Multiplier> for Item {
    fn from(m: Multiplier) -> Self {
        Item::Mult(m)
    }
}

impl From<PreMultiplier> for Item {
    fn from(p: PreMultiplier) -> Self {
        Item::Pre(p)
    }
}
