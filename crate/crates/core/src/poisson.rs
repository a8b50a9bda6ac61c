//! Poisson bivectors in coordinates.
//!
//! Conventions: `{F,G} = Σ π^{ij} ∂_iF ∂_jG`, `X_H(G) = {G,H}`, hence
//! `X_H^i = Σ_j π^{ij} ∂_jH`. With these, `X_{{f,g}} = -[X_f, X_g]`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::{Chart, RationalFunction};

/// Vector field with rational-function components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    chart: Chart,
    components: Vec<RationalFunction>,
}

impl VectorField {
    pub fn new(chart: &Chart, components: Vec<RationalFunction>) -> Result<Self> {
        if components.len() != chart.len() {
            return Err(Error::DimensionMismatch { expected: chart.len(), found: components.len() });
        }
        for c in &components {
            chart.ensure_same(c.chart())?;
        }
        Ok(VectorField { chart: chart.clone(), components })
    }

    pub fn zero(chart: &Chart) -> Self {
        VectorField { chart: chart.clone(), components: vec![RationalFunction::zero(chart); chart.len()] }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &RationalFunction {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(RationalFunction::is_zero)
    }

    /// Directional derivative `X(f) = Σ X^i ∂_i f`.
    pub fn apply(&self, f: &RationalFunction) -> Result<RationalFunction> {
        self.chart.ensure_same(f.chart())?;
        let mut acc = RationalFunction::zero(&self.chart);
        for (i, x) in self.components.iter().enumerate() {
            if !x.is_zero() {
                acc = &acc + &(x * &f.derivative(i));
            }
        }
        Ok(acc)
    }

    /// Commutator `[X,Y]^i = X(Y^i) - Y(X^i)`.
    pub fn commutator(&self, other: &VectorField) -> Result<VectorField> {
        self.chart.ensure_same(&other.chart)?;
        let components = (0..self.chart.len())
            .map(|i| Ok(&self.apply(&other.components[i])? - &other.apply(&self.components[i])?))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { chart: self.chart.clone(), components })
    }

    pub fn scale(&self, c: &crate::exactalg::Rational) -> VectorField {
        VectorField { chart: self.chart.clone(), components: self.components.iter().map(|x| x.scale(c)).collect() }
    }
}

impl std::ops::Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().zip(&rhs.components).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField { chart: self.chart.clone(), components: self.components.iter().map(|a| -a).collect() }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Jacobi residuals of a bivector, one per index triple `i<j<k` (0-based).
#[derive(Clone, Debug)]
pub struct JacobiReport {
    pub residuals: BTreeMap<(usize, usize, usize), RationalFunction>,
    pub is_poisson: bool,
}

impl JacobiReport {
    /// Triples whose residual is not identically zero.
    pub fn failures(&self) -> impl Iterator<Item = (&(usize, usize, usize), &RationalFunction)> {
        self.residuals.iter().filter(|(_, r)| !r.is_zero())
    }
}

/// Antisymmetric bivector `π^{ij}` on a chart. Need not satisfy Jacobi.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PoissonStructure {
    chart: Chart,
    matrix: Vec<Vec<RationalFunction>>,
}

impl PoissonStructure {
    /// Full matrix; fails unless exactly antisymmetric.
    pub fn new(chart: &Chart, matrix: Vec<Vec<RationalFunction>>) -> Result<Self> {
        let matrix = check_antisymmetric(chart, matrix)?;
        Ok(PoissonStructure { chart: chart.clone(), matrix })
    }

    /// Completes `π^{ij}` for `i<j` (or either order) to an antisymmetric matrix.
    pub fn from_entries<I>(chart: &Chart, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, RationalFunction)>,
    {
        Ok(PoissonStructure { chart: chart.clone(), matrix: complete_antisymmetric(chart, entries)? })
    }

    /// Canonical structure on `(q1..qn, p1..pn)` with `{q_i, p_i} = 1`.
    pub fn canonical(n: usize) -> Self {
        let chart = Chart::canonical(n);
        let entries = (0..n).map(|i| (i, n + i, RationalFunction::one(&chart)));
        Self::from_entries(&chart, entries.collect::<Vec<_>>()).expect("canonical entries are valid")
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalFunction {
        &self.matrix[i][j]
    }

    pub fn matrix(&self) -> &[Vec<RationalFunction>] {
        &self.matrix
    }

    /// `{f,g} = Σ π^{ij} ∂_if ∂_jg`.
    pub fn bracket(&self, f: &RationalFunction, g: &RationalFunction) -> Result<RationalFunction> {
        self.chart.ensure_same(f.chart())?;
        self.chart.ensure_same(g.chart())?;
        let df = f.gradient();
        let dg = g.gradient();
        let n = self.dim();
        let mut acc = RationalFunction::zero(&self.chart);
        for i in 0..n {
            if df[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if i == j || dg[j].is_zero() || self.matrix[i][j].is_zero() {
                    continue;
                }
                acc = &acc + &(&(&self.matrix[i][j] * &df[i]) * &dg[j]);
            }
        }
        Ok(acc)
    }

    /// `X_H^i = Σ_j π^{ij} ∂_jH`, so that `X_H(G) = {G,H}`.
    pub fn hamiltonian_vector_field(&self, h: &RationalFunction) -> Result<VectorField> {
        self.chart.ensure_same(h.chart())?;
        self.sharp_apply(&h.gradient())
    }

    /// `(π♯α)^i = Σ_j π^{ij} α_j`.
    pub fn sharp_apply(&self, alpha: &[RationalFunction]) -> Result<VectorField> {
        let n = self.dim();
        if alpha.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: alpha.len() });
        }
        for a in alpha {
            self.chart.ensure_same(a.chart())?;
        }
        let components = (0..n)
            .map(|i| {
                let mut acc = RationalFunction::zero(&self.chart);
                for (j, a) in alpha.iter().enumerate() {
                    if !a.is_zero() && !self.matrix[i][j].is_zero() {
                        acc = &acc + &(&self.matrix[i][j] * a);
                    }
                }
                acc
            })
            .collect();
        Ok(VectorField { chart: self.chart.clone(), components })
    }

    /// Residual `Σ_l (π^{il}∂_lπ^{jk} + π^{jl}∂_lπ^{ki} + π^{kl}∂_lπ^{ij})` for every `i<j<k`.
    pub fn jacobi_residual(&self) -> JacobiReport {
        let n = self.dim();
        // derivatives of upper entries, computed once
        let mut d: BTreeMap<(usize, usize), Vec<RationalFunction>> = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                d.insert((i, j), self.matrix[i][j].gradient());
            }
        }
        let dpi = |a: usize, b: usize, l: usize| -> RationalFunction {
            if a < b {
                d[&(a, b)][l].clone()
            } else {
                -&d[&(b, a)][l]
            }
        };
        let mut residuals = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc = RationalFunction::zero(&self.chart);
                    for l in 0..n {
                        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                            let p = &self.matrix[a][l];
                            if p.is_zero() {
                                continue;
                            }
                            let q = dpi(b, c, l);
                            if !q.is_zero() {
                                acc = &acc + &(p * &q);
                            }
                        }
                    }
                    residuals.insert((i, j, k), acc);
                }
            }
        }
        let is_poisson = residuals.values().all(RationalFunction::is_zero);
        JacobiReport { residuals, is_poisson }
    }

    /// True iff `{f, z_j} = 0` for every coordinate.
    pub fn casimir_check(&self, f: &RationalFunction) -> Result<bool> {
        Ok(self.hamiltonian_vector_field(f)?.is_zero())
    }

    /// Lie derivative of the bivector along `x`:
    /// `X(π^{ij}) - Σ_k π^{kj}∂_kX^i - Σ_k π^{ik}∂_kX^j`.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<Vec<Vec<RationalFunction>>> {
        self.chart.ensure_same(x.chart())?;
        let n = self.dim();
        let dx: Vec<Vec<RationalFunction>> = x.components().iter().map(RationalFunction::gradient).collect();
        let mut out = vec![vec![RationalFunction::zero(&self.chart); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let mut acc = x.apply(&self.matrix[i][j])?;
                for k in 0..n {
                    acc = &acc - &(&self.matrix[k][j] * &dx[i][k]);
                    acc = &acc - &(&self.matrix[i][k] * &dx[j][k]);
                }
                out[j][i] = -&acc;
                out[i][j] = acc;
            }
        }
        Ok(out)
    }
}

pub(crate) fn check_antisymmetric(chart: &Chart, matrix: Vec<Vec<RationalFunction>>) -> Result<Vec<Vec<RationalFunction>>> {
    let n = chart.len();
    if matrix.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: matrix.len() });
    }
    for row in &matrix {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        for f in row {
            chart.ensure_same(f.chart())?;
        }
    }
    for i in 0..n {
        for j in i..n {
            if !(&matrix[i][j] + &matrix[j][i]).is_zero() {
                return Err(Error::NotAntisymmetric(i, j));
            }
        }
    }
    Ok(matrix)
}

pub(crate) fn complete_antisymmetric<I>(chart: &Chart, entries: I) -> Result<Vec<Vec<RationalFunction>>>
where
    I: IntoIterator<Item = (usize, usize, RationalFunction)>,
{
    let n = chart.len();
    let mut m: Vec<Vec<Option<RationalFunction>>> = vec![vec![None; n]; n];
    for (i, j, f) in entries {
        if i >= n || j >= n {
            return Err(Error::DimensionMismatch { expected: n, found: i.max(j) + 1 });
        }
        chart.ensure_same(f.chart())?;
        if i == j {
            if !f.is_zero() {
                return Err(Error::NotAntisymmetric(i, j));
            }
            continue;
        }
        let neg = -&f;
        for (a, b, v) in [(i, j, f), (j, i, neg)] {
            match &m[a][b] {
                Some(old) if *old != v => return Err(Error::NotAntisymmetric(i.min(j), i.max(j))),
                _ => m[a][b] = Some(v),
            }
        }
    }
    Ok(m
        .into_iter()
        .map(|row| row.into_iter().map(|e| e.unwrap_or_else(|| RationalFunction::zero(chart))).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_expression;

    fn e(s: &str, c: &Chart) -> RationalFunction {
        parse_expression(s, c).unwrap()
    }

    fn so3() -> PoissonStructure {
        let c = Chart::new(&["x1", "x2", "x3"]).unwrap();
        PoissonStructure::from_entries(&c, [(0, 1, e("x3", &c)), (1, 2, e("x1", &c)), (2, 0, e("x2", &c))]).unwrap()
    }

    #[test]
    fn canonical_bracket() {
        let p = PoissonStructure::canonical(1);
        let c = p.chart().clone();
        assert_eq!(p.bracket(&e("q1", &c), &e("p1", &c)).unwrap(), e("1", &c));
        let h = e("(p1^2 + q1^2)/2", &c);
        assert!(p.bracket(&h, &h).unwrap().is_zero());
        let x = p.hamiltonian_vector_field(&h).unwrap();
        assert_eq!(x.components(), &[e("p1", &c), e("-q1", &c)]);
        let g = e("q1^3*p1", &c);
        assert_eq!(x.apply(&g).unwrap(), p.bracket(&g, &h).unwrap());
    }

    #[test]
    fn so3_bracket_and_field() {
        let p = so3();
        let c = p.chart().clone();
        assert_eq!(p.bracket(&e("x1", &c), &e("x2", &c)).unwrap(), e("x3", &c));
        let x = p.hamiltonian_vector_field(&e("x1", &c)).unwrap();
        assert_eq!(x.components(), &[e("0", &c), e("-x3", &c), e("x2", &c)]);
        let s = p.sharp_apply(&[e("1", &c), e("0", &c), e("0", &c)]).unwrap();
        assert_eq!(s, x);
    }

    #[test]
    fn jacobi_holds_for_so3_and_canonical() {
        assert!(so3().jacobi_residual().is_poisson);
        let r = PoissonStructure::canonical(2).jacobi_residual();
        assert!(r.is_poisson);
        assert_eq!(r.residuals.len(), 4);
    }

    #[test]
    fn jacobi_fails_on_broken_structure() {
        let c = Chart::new(&["x1", "x2", "x3"]).unwrap();
        let p = PoissonStructure::from_entries(&c, [(0, 1, e("x3", &c)), (1, 2, e("x1", &c)), (2, 0, e("x1", &c))]).unwrap();
        let r = p.jacobi_residual();
        assert!(!r.is_poisson);
        assert_eq!(r.residuals[&(0, 1, 2)], e("-x3", &c));
    }

    #[test]
    fn casimirs() {
        let p = so3();
        let c = p.chart().clone();
        assert!(p.casimir_check(&e("x1^2 + x2^2 + x3^2", &c)).unwrap());
        assert!(p.casimir_check(&e("5", &c)).unwrap());
        let q = PoissonStructure::canonical(1);
        assert!(!q.casimir_check(&e("q1", q.chart())).unwrap());
    }

    #[test]
    fn sharp_of_dq() {
        let p = PoissonStructure::canonical(1);
        let c = p.chart().clone();
        let s = p.sharp_apply(&[e("1", &c), e("0", &c)]).unwrap();
        assert_eq!(s.components(), &[e("0", &c), e("-1", &c)]);
        assert!(p.sharp_apply(&[e("0", &c), e("0", &c)]).unwrap().is_zero());
        assert!(matches!(p.sharp_apply(&[e("0", &c)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn construction_errors() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let bad = vec![vec![e("0", &c), e("x", &c)], vec![e("x", &c), e("0", &c)]];
        assert_eq!(PoissonStructure::new(&c, bad), Err(Error::NotAntisymmetric(0, 1)));
        let conflict = PoissonStructure::from_entries(&c, [(0, 1, e("x", &c)), (1, 0, e("x", &c))]);
        assert!(conflict.is_err());
        let other = Chart::new(&["a", "b"]).unwrap();
        assert!(matches!(PoissonStructure::canonical(1).bracket(&e("a", &other), &e("b", &other)), Err(Error::ChartMismatch { .. })));
    }

    #[test]
    fn lie_derivative_of_rotation_vanishes() {
        let p = so3();
        let c = p.chart().clone();
        let x = p.hamiltonian_vector_field(&e("x3", &c)).unwrap();
        let l = p.lie_derivative(&x).unwrap();
        assert!(l.iter().flatten().all(RationalFunction::is_zero));
    }
}
