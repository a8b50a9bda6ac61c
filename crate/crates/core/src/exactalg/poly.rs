use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{Chart, Rational};
use crate::error::{Error, Result};

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in a map keyed by graded-lex monomials, so the last entry is
/// the leading term and structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiPoly {
    chart: Chart,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(chart: &Chart) -> Self {
        MultiPoly { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn one(chart: &Chart) -> Self {
        Self::constant(chart, Rational::one())
    }

    pub fn constant(chart: &Chart, c: Rational) -> Self {
        let mut p = Self::zero(chart);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(chart.len()), c);
        }
        p
    }

    pub fn var(chart: &Chart, i: usize) -> Self {
        let mut p = Self::zero(chart);
        p.terms.insert(Monomial::var(chart.len(), i), Rational::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I>(chart: &Chart, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(chart);
        for (e, c) in terms {
            if e.len() != chart.len() {
                return Err(Error::DimensionMismatch { expected: chart.len(), found: e.len() });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        MultiPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &Rational) -> Self {
        MultiPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    /// Scales so the leading coefficient is one; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(&self.chart);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[v] -= 1;
            out.add_term(m2, c * Rational::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = super::rational_to_f64(c);
                for (x, &e) in point.iter().zip(&m.0) {
                    if e > 0 {
                        t *= x.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Coefficients with respect to variable `v`, indexed by degree.
    pub fn coeffs_in(&self, v: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(&self.chart); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[v] as usize;
            let mut m2 = m.clone();
            m2.0[v] = 0;
            out[e].terms.insert(m2, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(chart: &Chart, v: usize, coeffs: &[MultiPoly]) -> Self {
        let mut out = Self::zero(chart);
        for (d, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                let mut m2 = m.clone();
                m2.0[v] += d as u32;
                out.add_term(m2, x.clone());
            }
        }
        out
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        let (ld, lc) = d.leading()?;
        if d.is_constant() {
            return Some(self.scale(&lc.recip()));
        }
        let mut rem = self.clone();
        let mut quo = Self::zero(&self.chart);
        while let Some((lm, c)) = rem.leading() {
            let m = lm.div(ld)?;
            let coef = c / lc;
            rem = &rem - &d.mul_term(&m, &coef);
            quo.add_term(m, coef);
        }
        Some(quo)
    }

    /// Substitutes values for every variable, with arithmetic supplied by the caller.
    pub(crate) fn map_terms<T, F>(&self, mut f: F) -> Vec<T>
    where
        F: FnMut(&Monomial, &Rational) -> T,
    {
        self.terms.iter().map(|(m, c)| f(m, c)).collect()
    }

    fn check_chart(&self, other: &MultiPoly) {
        assert!(self.chart == other.chart, "polynomials on different charts");
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_chart(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_chart(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_chart(rhs);
        let mut out = MultiPoly::zero(&self.chart);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.chart.name(i).to_string()
                    } else {
                        format!("{}^{}", self.chart.name(i), e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}
