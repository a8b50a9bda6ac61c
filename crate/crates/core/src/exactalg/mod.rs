//! Exact rational polynomials and rational functions on named charts.

mod chart;
mod compiled;
pub mod gcd;
mod parse;
mod poly;
mod ratfunc;

pub use chart::Chart;
pub(crate) use chart::is_identifier;
pub use compiled::CompiledFunction;
pub use parse::{parse_expression, parse_polynomial};
pub use poly::{Monomial, MultiPoly};
pub use ratfunc::RationalFunction;

pub type Rational = num_rational::BigRational;

/// Nearest double to an exact rational.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational equal to a finite double.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
