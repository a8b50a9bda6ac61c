use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::{Chart, MultiPoly, Rational};
use crate::error::{Error, Result};

/// Quotient of polynomials in normal form.
///
/// The numerator and denominator share no common factor and the denominator is
/// monic in graded-lex order, so two equal functions have equal representations.
/// Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        num.chart().ensure_same(den.chart())?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            let one = MultiPoly::one(num.chart());
            return RationalFunction { num, den: one };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
            }
        };
        Self::monic_den(num, den)
    }

    fn monic_den(num: MultiPoly, den: MultiPoly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lc.recip();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let one = MultiPoly::one(p.chart());
        RationalFunction { num: p, den: one }
    }

    pub fn zero(chart: &Chart) -> Self {
        Self::from_poly(MultiPoly::zero(chart))
    }

    pub fn one(chart: &Chart) -> Self {
        Self::from_poly(MultiPoly::one(chart))
    }

    pub fn constant(chart: &Chart, c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(chart, c))
    }

    pub fn from_i64(chart: &Chart, c: i64) -> Self {
        Self::constant(chart, Rational::from_integer(c.into()))
    }

    pub fn var(chart: &Chart, i: usize) -> Self {
        Self::from_poly(MultiPoly::var(chart, i))
    }

    pub fn var_named(chart: &Chart, name: &str) -> Result<Self> {
        Ok(Self::var(chart, chart.require(name)?))
    }

    pub fn chart(&self) -> &Chart {
        self.num.chart()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// True iff the function is identically zero.
    pub fn is_identically_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.chart());
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalFunction { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Exact quotient-rule derivative with respect to chart index `v`.
    pub fn derivative(&self, v: usize) -> Self {
        if self.den.is_constant() {
            return Self::from_poly(self.num.derivative(v)).scale(&self.den.leading_coeff().recip());
        }
        if !self.den.contains_var(v) {
            return Self::normalized(self.num.derivative(v), self.den.clone());
        }
        // with g = gcd(den, den'), the quotient below is already reduced
        let dd = self.den.derivative(v);
        let g = gcd(&self.den, &dd);
        let (q, dq) = if g.is_one() {
            (self.den.clone(), dd)
        } else {
            (self.den.div_exact(&g).expect("gcd divides"), dd.div_exact(&g).expect("gcd divides"))
        };
        let n = &(&self.num.derivative(v) * &q) - &(&self.num * &dq);
        if n.is_zero() {
            return Self::zero(self.chart());
        }
        Self::monic_den(n, &self.den * &q)
    }

    pub fn differentiate(&self, coordinate: &str) -> Result<Self> {
        Ok(self.derivative(self.chart().require(coordinate)?))
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.chart().len()).map(|v| self.derivative(v)).collect()
    }

    /// Exact value at a point given in chart order.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.chart().len() {
            return Err(Error::DimensionMismatch { expected: self.chart().len(), found: point.len() });
        }
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Exact value at a point given by coordinate name.
    pub fn evaluate_at(&self, point: &HashMap<String, Rational>) -> Result<Rational> {
        let values = self
            .chart()
            .names()
            .iter()
            .map(|n| point.get(n).cloned().ok_or_else(|| Error::MissingCoordinate(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.eval(&values)
    }

    /// Approximate value in double precision; `Err(Pole)` when the denominator is zero.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        let d = self.den.eval_f64(point);
        if d == 0.0 {
            return Err(Error::Pole);
        }
        Ok(self.num.eval_f64(point) / d)
    }

    /// Composition `self ∘ map`, where `map` gives one function on a new chart
    /// per coordinate of `self`'s chart.
    pub fn compose(&self, map: &[RationalFunction]) -> Result<Self> {
        if map.len() != self.chart().len() {
            return Err(Error::DimensionMismatch { expected: self.chart().len(), found: map.len() });
        }
        let target = map
            .first()
            .map(|f| f.chart().clone())
            .ok_or_else(|| Error::InvalidArgument("empty substitution".into()))?;
        for f in map {
            target.ensure_same(f.chart())?;
        }
        let num = subst_poly(&self.num, map, &target);
        let den = subst_poly(&self.den, map, &target);
        num.checked_div(&den)
    }

    /// Reinterprets the function on another chart that contains every variable it uses.
    pub fn rechart(&self, chart: &Chart) -> Result<Self> {
        let map = self
            .chart()
            .names()
            .iter()
            .map(|n| match chart.index_of(n) {
                Some(i) => Ok(Self::var(chart, i)),
                None => Ok(Self::zero(chart)),
            })
            .collect::<Result<Vec<_>>>()?;
        for v in 0..self.chart().len() {
            if (self.num.contains_var(v) || self.den.contains_var(v))
                && chart.index_of(self.chart().name(v)).is_none()
            {
                return Err(Error::NotInChart(self.chart().name(v).to_string()));
            }
        }
        if self.chart() == chart {
            return Ok(self.clone());
        }
        self.compose(&map)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self * &rhs.recip()?)
    }
}

fn subst_poly(p: &MultiPoly, map: &[RationalFunction], target: &Chart) -> RationalFunction {
    let mut powers: Vec<Vec<RationalFunction>> = map.iter().map(|f| vec![RationalFunction::one(f.chart()), f.clone()]).collect();
    let mut acc = RationalFunction::zero(target);
    let terms = p.map_terms(|m, c| (m.exponents().to_vec(), c.clone()));
    for (exps, c) in terms {
        let mut t = RationalFunction::constant(target, c);
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let e = e as usize;
            while powers[i].len() <= e {
                let next = &powers[i][powers[i].len() - 1] * &map[i];
                powers[i].push(next);
            }
            t = &t * &powers[i][e];
        }
        acc = &acc + &t;
    }
    acc
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let n = &self.num + &rhs.num;
            if self.den.is_one() {
                return RationalFunction::from_poly(n);
            }
            return RationalFunction::normalized(n, self.den.clone());
        }
        if self.den.is_constant() && rhs.den.is_constant() {
            let a = self.num.scale(&self.den.leading_coeff().recip());
            let b = rhs.num.scale(&rhs.den.leading_coeff().recip());
            return RationalFunction::from_poly(&a + &b);
        }
        let g = gcd(&self.den, &rhs.den);
        let ld = self.den.div_exact(&g).expect("gcd divides");
        let rd = rhs.den.div_exact(&g).expect("gcd divides");
        let n = &(&self.num * &rd) + &(&rhs.num * &ld);
        RationalFunction::normalized(n, &self.den * &rd)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.chart());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        // cross-cancel, then the product is already coprime
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = rhs.den.div_exact(&g1).expect("gcd divides");
        let c = rhs.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        RationalFunction::monic_den(&a * &c, &b * &d)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    /// Panics on division by zero; use [`RationalFunction::checked_div`] otherwise.
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_div(rhs).expect("division by the zero function")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &MultiPoly| {
            if p.num_terms() > 1 || p.leading_coeff() < Rational::zero() {
                format!("({p})")
            } else {
                format!("{p}")
            }
        };
        if self.den.is_constant() {
            return write!(f, "{}/{}", wrap(&self.num), self.den);
        }
        let den = if self.den.num_terms() > 1 || !self.den.leading_coeff().is_one() {
            format!("({})", self.den)
        } else {
            // single monic monomial, still parenthesised when it is a product or power
            let s = format!("{}", self.den);
            if s.contains('*') || s.contains('^') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), den)
    }
}
