pub mod coeff;
pub mod groebner;
pub mod kohn;
pub mod oracle;
pub mod poly;

pub use coeff::GaussianRational;
pub use groebner::{GroebnerBasis, GroebnerError, Ideal, MonomialOrder, TypeReport};
pub use kohn::{audit_trace, run_algorithm, Config, Epsilon, KohnError, Multiplier, Trace};
pub use poly::{Monomial, Order, PolyError, Polynomial, Ring};
