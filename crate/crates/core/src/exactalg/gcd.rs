//! Multivariate polynomial GCD over the rationals.
//!
//! Recursive content / primitive-part scheme: split off the content with
//! respect to the smallest variable present, then run a primitive pseudo-
//! remainder sequence in that variable. Results are monic in graded-lex order.

use num_traits::{One, Zero};

use super::{MultiPoly, Rational};

pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(a.chart());
    }
    if a == b {
        return a.monic();
    }
    if coprime_by_specialization(a, b) {
        return MultiPoly::one(a.chart());
    }
    let n = a.chart().len();
    let v = (0..n)
        .find(|&v| a.contains_var(v) || b.contains_var(v))
        .expect("non-constant polynomial has a variable");
    if !a.contains_var(v) {
        return gcd(a, &content_in(b, v));
    }
    if !b.contains_var(v) {
        return gcd(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = primitive_prs(pa, pb, v);
    (&c * &g).monic()
}

/// Sufficient test for `gcd(a, b) = 1`. A common factor of positive degree in
/// `v` keeps its degree under any specialization of the other variables that
/// leaves `lc_v(a)` nonzero, so a constant univariate gcd rules it out.
fn coprime_by_specialization(a: &MultiPoly, b: &MultiPoly) -> bool {
    let n = a.chart().len();
    for v in (0..n).filter(|&v| a.contains_var(v) && b.contains_var(v)) {
        let ca = a.coeffs_in(v);
        let cb = b.coeffs_in(v);
        let lead = ca.last().expect("nonzero");
        let Some(point) = (1..8i64).map(|s| specialization_point(n, s)).find(|p| !lead.eval(p).is_zero()) else {
            return false;
        };
        let ua: Vec<Rational> = ca.iter().map(|c| c.eval(&point)).collect();
        let ub: Vec<Rational> = cb.iter().map(|c| c.eval(&point)).collect();
        if univariate_gcd_degree(ua, ub) > 0 {
            return false;
        }
    }
    true
}

fn specialization_point(n: usize, seed: i64) -> Vec<Rational> {
    (0..n as i64).map(|i| Rational::from_integer(((seed * 7 + i * 13) % 23 - 11).into())).collect()
}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let inv = Rational::one() / b.last().expect("nonempty");
        while a.len() >= b.len() {
            let q = a.last().expect("nonempty") * &inv;
            let shift = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                a[i + shift] -= &q * bi;
            }
            a.pop();
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// GCD of the coefficients of `a` viewed as a polynomial in `v`.
pub fn content_in(a: &MultiPoly, v: usize) -> MultiPoly {
    let mut coeffs = a.coeffs_in(v).into_iter().filter(|c| !c.is_zero());
    let mut g = match coeffs.next() {
        Some(c) => c.monic(),
        None => return MultiPoly::zero(a.chart()),
    };
    for c in coeffs {
        if g.is_one() {
            break;
        }
        g = gcd(&g, &c);
    }
    g
}

pub fn primitive_part_in(a: &MultiPoly, v: usize) -> MultiPoly {
    if a.is_zero() {
        return a.clone();
    }
    let c = content_in(a, v);
    a.div_exact(&c).expect("content divides").monic()
}

fn primitive_prs(a: MultiPoly, b: MultiPoly, v: usize) -> MultiPoly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) { (a, b) } else { (b, a) };
    loop {
        let r = pseudo_remainder(&a, &b, v);
        if r.is_zero() {
            return primitive_part_in(&b, v);
        }
        if r.degree_in(v) == 0 {
            return MultiPoly::one(a.chart());
        }
        a = b;
        b = primitive_part_in(&r, v);
    }
}

/// lc(b)^k * a mod b in the variable `v`.
pub fn pseudo_remainder(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let chart = a.chart().clone();
    let bc = b.coeffs_in(v);
    let db = bc.len() - 1;
    let lb = &bc[db];
    let mut ac = a.coeffs_in(v);
    while ac.len() > db && !ac.is_empty() {
        let da = ac.len() - 1;
        let la = ac[da].clone();
        let shift = da - db;
        for c in ac.iter_mut() {
            *c = &*c * lb;
        }
        for (i, bi) in bc.iter().enumerate() {
            let t = &la * bi;
            ac[i + shift] = &ac[i + shift] - &t;
        }
        debug_assert!(ac[da].is_zero());
        while ac.last().is_some_and(MultiPoly::is_zero) {
            ac.pop();
        }
    }
    MultiPoly::from_coeffs_in(&chart, v, &ac)
}
