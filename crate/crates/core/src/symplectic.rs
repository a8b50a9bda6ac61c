//! Two-forms in charts, bivector/form inversion, pullbacks and the stereographic sphere.
//!
//! The form paired with a bivector satisfies `X_H ⌟ ω = dH`, which makes
//! `ω = transpose(π⁻¹)`; the same formula maps a form back to its bivector.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactalg::{parse_expression, Chart, RationalFunction};
use crate::poisson::{check_antisymmetric, complete_antisymmetric, PoissonStructure};

type Matrix = Vec<Vec<RationalFunction>>;

/// Antisymmetric two-form `ω_{ij}` on a chart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoForm {
    chart: Chart,
    matrix: Matrix,
}

impl TwoForm {
    pub fn new(chart: &Chart, matrix: Matrix) -> Result<Self> {
        let matrix = check_antisymmetric(chart, matrix)?;
        Ok(TwoForm { chart: chart.clone(), matrix })
    }

    pub fn from_entries<I>(chart: &Chart, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, RationalFunction)>,
    {
        Ok(TwoForm { chart: chart.clone(), matrix: complete_antisymmetric(chart, entries)? })
    }

    pub fn zero(chart: &Chart) -> Self {
        TwoForm { chart: chart.clone(), matrix: vec![vec![RationalFunction::zero(chart); chart.len()]; chart.len()] }
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

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(RationalFunction::is_zero)
    }

    /// Contraction `(X ⌟ ω)_j = Σ_i X^i ω_{ij}`.
    pub fn contract(&self, x: &[RationalFunction]) -> Result<Vec<RationalFunction>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        Ok((0..n)
            .map(|j| {
                let mut acc = RationalFunction::zero(&self.chart);
                for (i, xi) in x.iter().enumerate() {
                    if !xi.is_zero() && !self.matrix[i][j].is_zero() {
                        acc = &acc + &(xi * &self.matrix[i][j]);
                    }
                }
                acc
            })
            .collect())
    }

    /// Closedness residuals and symbolic determinant.
    pub fn checks(&self) -> TwoFormReport {
        let n = self.dim();
        let mut closedness = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let r = &(&self.matrix[j][k].derivative(i) + &self.matrix[k][i].derivative(j))
                        + &self.matrix[i][j].derivative(k);
                    closedness.insert((i, j, k), r);
                }
            }
        }
        let closed = closedness.values().all(RationalFunction::is_zero);
        let determinant = determinant(&self.chart, &self.matrix);
        let nondegenerate = !determinant.is_zero();
        TwoFormReport { closedness, closed, determinant, nondegenerate }
    }

    /// The bivector paired with this form.
    pub fn to_poisson(&self) -> Result<PoissonStructure> {
        PoissonStructure::new(&self.chart, inverse_transpose(&self.chart, &self.matrix)?)
    }
}

/// Result of [`TwoForm::checks`].
#[derive(Clone, Debug)]
pub struct TwoFormReport {
    /// `∂_iω_{jk} + ∂_jω_{ki} + ∂_kω_{ij}` per triple `i<j<k` (0-based).
    pub closedness: BTreeMap<(usize, usize, usize), RationalFunction>,
    pub closed: bool,
    pub determinant: RationalFunction,
    pub nondegenerate: bool,
}

/// One-form `ρ_i dz^i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OneForm {
    chart: Chart,
    components: Vec<RationalFunction>,
}

impl OneForm {
    pub fn new(chart: &Chart, components: Vec<RationalFunction>) -> Result<Self> {
        if components.len() != chart.len() {
            return Err(Error::DimensionMismatch { expected: chart.len(), found: components.len() });
        }
        for c in &components {
            chart.ensure_same(c.chart())?;
        }
        Ok(OneForm { chart: chart.clone(), components })
    }

    /// `dF`.
    pub fn differential(f: &RationalFunction) -> Self {
        OneForm { chart: f.chart().clone(), components: f.gradient() }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    /// `(dρ)_{ij} = ∂_iρ_j - ∂_jρ_i`.
    pub fn exterior_derivative(&self) -> TwoForm {
        let n = self.chart.len();
        let mut m = vec![vec![RationalFunction::zero(&self.chart); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = &self.components[j].derivative(i) - &self.components[i].derivative(j);
                m[j][i] = -&v;
                m[i][j] = v;
            }
        }
        TwoForm { chart: self.chart.clone(), matrix: m }
    }
}

pub fn exterior_derivative_one_form(rho: &OneForm) -> TwoForm {
    rho.exterior_derivative()
}

/// Map between charts, one component per target coordinate in source variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMap {
    source: Chart,
    target: Chart,
    components: Vec<RationalFunction>,
}

impl RationalMap {
    pub fn new(source: &Chart, target: &Chart, components: Vec<RationalFunction>) -> Result<Self> {
        if components.len() != target.len() {
            return Err(Error::DimensionMismatch { expected: target.len(), found: components.len() });
        }
        for c in &components {
            source.ensure_same(c.chart())?;
        }
        Ok(RationalMap { source: source.clone(), target: target.clone(), components })
    }

    pub fn parse(source: &Chart, target: &Chart, components: &[&str]) -> Result<Self> {
        let comps = components.iter().map(|s| parse_expression(s, source)).collect::<Result<Vec<_>>>()?;
        Self::new(source, target, comps)
    }

    pub fn identity(chart: &Chart) -> Self {
        let components = (0..chart.len()).map(|i| RationalFunction::var(chart, i)).collect();
        RationalMap { source: chart.clone(), target: chart.clone(), components }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    /// `J[i][a] = ∂m_i/∂s_a`.
    pub fn jacobian(&self) -> Matrix {
        self.components.iter().map(RationalFunction::gradient).collect()
    }

    /// `f ∘ m` for `f` on the target chart.
    pub fn pull_function(&self, f: &RationalFunction) -> Result<RationalFunction> {
        self.target.ensure_same(f.chart())?;
        if self.target.is_empty() {
            return Ok(RationalFunction::constant(&self.source, f.constant_value().expect("constant on empty chart")));
        }
        f.compose(&self.components)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap> {
        inner.target.ensure_same(&self.source)?;
        let components = self.components.iter().map(|c| inner.pull_function(c)).collect::<Result<Vec<_>>>()?;
        RationalMap::new(&inner.source, &self.target, components)
    }

    pub fn pullback_one_form(&self, rho: &OneForm) -> Result<OneForm> {
        self.target.ensure_same(rho.chart())?;
        let jac = self.jacobian();
        let pulled = rho.components.iter().map(|c| self.pull_function(c)).collect::<Result<Vec<_>>>()?;
        let components = (0..self.source.len())
            .map(|a| {
                let mut acc = RationalFunction::zero(&self.source);
                for (i, p) in pulled.iter().enumerate() {
                    if !p.is_zero() && !jac[i][a].is_zero() {
                        acc = &acc + &(p * &jac[i][a]);
                    }
                }
                acc
            })
            .collect();
        Ok(OneForm { chart: self.source.clone(), components })
    }

    /// `(m*w)_{ab} = Σ_{i<j} w_{ij}∘m (J_{ia}J_{jb} - J_{ib}J_{ja})`.
    pub fn pullback_two_form(&self, w: &TwoForm) -> Result<TwoForm> {
        self.target.ensure_same(w.chart())?;
        let jac = self.jacobian();
        let n = self.target.len();
        let s = self.source.len();
        let mut pulled = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                if !w.matrix[i][j].is_zero() {
                    pulled.insert((i, j), self.pull_function(&w.matrix[i][j])?);
                }
            }
        }
        let mut m = vec![vec![RationalFunction::zero(&self.source); s]; s];
        for a in 0..s {
            for b in a + 1..s {
                let mut acc = RationalFunction::zero(&self.source);
                for (&(i, j), wij) in &pulled {
                    let minor = &(&jac[i][a] * &jac[j][b]) - &(&jac[i][b] * &jac[j][a]);
                    if !minor.is_zero() {
                        acc = &acc + &(wij * &minor);
                    }
                }
                m[b][a] = -&acc;
                m[a][b] = acc;
            }
        }
        Ok(TwoForm { chart: self.source.clone(), matrix: m })
    }
}

pub fn pullback_two_form(m: &RationalMap, w: &TwoForm) -> Result<TwoForm> {
    m.pullback_two_form(w)
}

/// Either side of the bivector/form correspondence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Structure {
    Poisson(PoissonStructure),
    Form(TwoForm),
}

/// Maps a non-degenerate bivector to its form and back.
pub fn invert_structure(input: &Structure) -> Result<Structure> {
    match input {
        Structure::Poisson(p) => Ok(Structure::Form(poisson_to_form(p)?)),
        Structure::Form(w) => Ok(Structure::Poisson(w.to_poisson()?)),
    }
}

pub fn poisson_to_form(p: &PoissonStructure) -> Result<TwoForm> {
    TwoForm::new(p.chart(), inverse_transpose(p.chart(), p.matrix())?)
}

pub fn two_form_checks(w: &TwoForm) -> TwoFormReport {
    w.checks()
}

/// `ρ = Σ p_i dq^i` on `(q1..qn, p1..pn)` and `ω = dρ`.
pub fn canonical_cotangent_structure(n: usize) -> Result<(OneForm, TwoForm)> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one degree of freedom is required".into()));
    }
    let chart = Chart::canonical(n);
    let mut comps = vec![RationalFunction::zero(&chart); 2 * n];
    for (i, c) in comps.iter_mut().take(n).enumerate() {
        *c = RationalFunction::var(&chart, n + i);
    }
    let rho = OneForm { chart, components: comps };
    let omega = rho.exterior_derivative();
    Ok((rho, omega))
}

fn inverse_transpose(chart: &Chart, m: &[Vec<RationalFunction>]) -> Result<Matrix> {
    let n = chart.len();
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let inv = invert(chart, m)?;
    Ok((0..n).map(|i| (0..n).map(|j| inv[j][i].clone()).collect()).collect())
}

/// Fraction-free Gauss–Jordan elimination on `[A | I]`.
///
/// Returns `(det, adj)` with `adj = det·A⁻¹` when `A` is invertible, `det = 0` otherwise.
fn bareiss(chart: &Chart, a: &[Vec<RationalFunction>]) -> (RationalFunction, Option<Matrix>) {
    let n = a.len();
    let zero = RationalFunction::zero(chart);
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { RationalFunction::one(chart) } else { zero.clone() }));
            r
        })
        .collect();
    let mut prev = RationalFunction::one(chart);
    let mut sign = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return (zero, None);
        };
        if p != k {
            m.swap(p, k);
            sign = !sign;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let v = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = &v / &prev;
            }
            m[i][k] = zero.clone();
        }
        prev = m[k][k].clone();
    }
    // after the last step every diagonal entry equals the last pivot
    let det = if sign { -&prev } else { prev.clone() };
    let adj = m.into_iter().map(|row| row[n..].to_vec()).collect();
    (det, Some(if sign { negate(adj) } else { adj }))
}

fn negate(m: Matrix) -> Matrix {
    m.into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect()
}

pub(crate) fn determinant(chart: &Chart, a: &[Vec<RationalFunction>]) -> RationalFunction {
    if a.is_empty() {
        return RationalFunction::one(chart);
    }
    bareiss(chart, a).0
}

pub(crate) fn invert(chart: &Chart, a: &[Vec<RationalFunction>]) -> Result<Matrix> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let (det, adj) = bareiss(chart, a);
    let adj = adj.ok_or(Error::Singular)?;
    let inv_det = det.recip()?;
    Ok(adj.into_iter().map(|r| r.into_iter().map(|x| &x * &inv_det).collect()).collect())
}

/// The two stereographic charts of the unit sphere in `(x,y,z)` with the area form
/// `ω̄ = x dy∧dz + y dz∧dx + z dx∧dy`.
#[derive(Clone, Debug)]
pub struct SphereFixture {
    pub ambient: TwoForm,
    /// Inverse projection from the north pole, `(u,v) ↦ (2u, 2v, u²+v²-1)/(1+u²+v²)`.
    pub north: RationalMap,
    /// Inverse projection from the south pole, `(u,v) ↦ (2u, 2v, 1-u²-v²)/(1+u²+v²)`.
    pub south: RationalMap,
    /// North coordinates to south coordinates on the overlap, `(u,v) ↦ (u,v)/(u²+v²)`.
    pub transition: RationalMap,
}

/// Outcome of the sphere computation.
#[derive(Clone, Debug)]
pub struct SphereReport {
    pub north_coefficient: RationalFunction,
    pub south_coefficient: RationalFunction,
    pub north_closed: bool,
    pub south_closed: bool,
    /// Both numerators are nonzero constants, so neither form vanishes on its chart.
    pub nonvanishing: bool,
    /// The south form transported through the transition map equals the north form.
    pub chart_compatible: bool,
    /// Frequently quoted chart coefficient `-4/(1+u²+v²)`.
    pub quoted_coefficient: RationalFunction,
    /// True when the derived north coefficient differs from the quoted one.
    pub quoted_mismatch: bool,
}

pub fn sphere_fixture() -> SphereFixture {
    let amb = Chart::new(&["x", "y", "z"]).expect("valid chart");
    let uv = Chart::new(&["u", "v"]).expect("valid chart");
    let e = |s: &str| parse_expression(s, &amb).expect("valid expression");
    let ambient = TwoForm::from_entries(&amb, [(1, 2, e("x")), (2, 0, e("y")), (0, 1, e("z"))]).expect("valid form");
    let north = RationalMap::parse(
        &uv,
        &amb,
        &["2*u/(1 + u^2 + v^2)", "2*v/(1 + u^2 + v^2)", "(u^2 + v^2 - 1)/(1 + u^2 + v^2)"],
    )
    .expect("valid map");
    let south = RationalMap::parse(
        &uv,
        &amb,
        &["2*u/(1 + u^2 + v^2)", "2*v/(1 + u^2 + v^2)", "(1 - u^2 - v^2)/(1 + u^2 + v^2)"],
    )
    .expect("valid map");
    let transition = RationalMap::parse(&uv, &uv, &["u/(u^2 + v^2)", "v/(u^2 + v^2)"]).expect("valid map");
    SphereFixture { ambient, north, south, transition }
}

impl SphereFixture {
    pub fn report(&self) -> Result<SphereReport> {
        let wn = self.north.pullback_two_form(&self.ambient)?;
        let ws = self.south.pullback_two_form(&self.ambient)?;
        let transported = self.transition.pullback_two_form(&ws)?;
        let north_coefficient = wn.entry(0, 1).clone();
        let south_coefficient = ws.entry(0, 1).clone();
        let nonvanishing = [&north_coefficient, &south_coefficient]
            .iter()
            .all(|c| !c.is_zero() && c.numerator().is_constant());
        let quoted_coefficient = parse_expression("-4/(1 + u^2 + v^2)", wn.chart())?;
        Ok(SphereReport {
            quoted_mismatch: north_coefficient != quoted_coefficient,
            north_closed: wn.checks().closed,
            south_closed: ws.checks().closed,
            chart_compatible: transported == wn,
            north_coefficient,
            south_coefficient,
            nonvanishing,
            quoted_coefficient,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str, c: &Chart) -> RationalFunction {
        parse_expression(s, c).unwrap()
    }

    #[test]
    fn canonical_inversion() {
        let p = PoissonStructure::canonical(1);
        let w = poisson_to_form(&p).unwrap();
        assert_eq!(w.entry(0, 1), &e("1", p.chart()));
        assert_eq!(w.to_poisson().unwrap(), p);
    }

    #[test]
    fn contraction_contract() {
        let c = Chart::new(&["a", "b", "c", "d"]).unwrap();
        let p = PoissonStructure::from_entries(
            &c,
            [(0, 1, e("1 + a", &c)), (0, 2, e("b", &c)), (2, 3, e("2", &c)), (1, 3, e("c - d", &c))],
        )
        .unwrap();
        let w = poisson_to_form(&p).unwrap();
        let h = e("a*b + c^2*d - b/(1 + d^2)", &c);
        let xh = p.hamiltonian_vector_field(&h).unwrap();
        assert_eq!(w.contract(xh.components()).unwrap(), h.gradient());
    }

    #[test]
    fn odd_and_singular() {
        let c = Chart::new(&["x1", "x2", "x3"]).unwrap();
        let so3 = PoissonStructure::from_entries(&c, [(0, 1, e("x3", &c)), (1, 2, e("x1", &c)), (2, 0, e("x2", &c))]).unwrap();
        assert_eq!(poisson_to_form(&so3), Err(Error::OddDimension(3)));
        let c4 = Chart::new(&["a", "b", "c", "d"]).unwrap();
        let sing = PoissonStructure::from_entries(&c4, [(0, 1, e("1", &c4))]).unwrap();
        assert_eq!(poisson_to_form(&sing), Err(Error::Singular));
    }

    #[test]
    fn form_checks() {
        let (_, w) = canonical_cotangent_structure(1).unwrap();
        let r = w.checks();
        assert!(r.closed && r.nondegenerate);
        assert_eq!(r.determinant, RationalFunction::one(w.chart()));
        let c = Chart::new(&["x", "y", "z"]).unwrap();
        let w = TwoForm::from_entries(&c, [(0, 1, e("z", &c))]).unwrap();
        let r = w.checks();
        assert!(!r.closed);
        assert_eq!(r.closedness[&(0, 1, 2)], e("1", &c));
    }

    #[test]
    fn liouville_form() {
        let (rho, w) = canonical_cotangent_structure(2).unwrap();
        let c = rho.chart().clone();
        assert_eq!(rho.components()[0], e("p1", &c));
        assert_eq!(rho.components()[2], e("0", &c));
        assert_eq!(w.entry(0, 2), &e("-1", &c));
        assert_eq!(w.entry(1, 3), &e("-1", &c));
        assert!(w.entry(0, 1).is_zero() && w.entry(0, 3).is_zero());
        assert_eq!(w.checks().determinant, RationalFunction::one(&c));
    }

    #[test]
    fn exterior_derivative_examples() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let rho = OneForm::new(&c, vec![e("-y/2", &c), e("x/2", &c)]).unwrap();
        assert_eq!(rho.exterior_derivative().entry(0, 1), &e("1", &c));
        let df = OneForm::differential(&e("x^3*y/(1 + y^2)", &c));
        assert!(df.exterior_derivative().is_zero());
    }

    #[test]
    fn pullback_basics() {
        let c = Chart::new(&["x", "y", "z"]).unwrap();
        let w = TwoForm::from_entries(&c, [(0, 1, e("z", &c)), (1, 2, e("x*y", &c))]).unwrap();
        assert_eq!(RationalMap::identity(&c).pullback_two_form(&w).unwrap(), w);
        let s = Chart::new(&["s", "t"]).unwrap();
        let k = RationalMap::parse(&s, &c, &["1", "2", "3/4"]).unwrap();
        assert!(k.pullback_two_form(&w).unwrap().is_zero());
    }

    #[test]
    fn sphere() {
        let f = sphere_fixture();
        let r = f.report().unwrap();
        let uv = r.north_coefficient.chart().clone();
        assert_eq!(r.north_coefficient, e("-4/(1 + u^2 + v^2)^2", &uv));
        assert_eq!(r.south_coefficient, e("4/(1 + u^2 + v^2)^2", &uv));
        assert!(r.north_closed && r.south_closed && r.nonvanishing && r.chart_compatible);
        assert!(r.quoted_mismatch);
        let w = f.north.pullback_two_form(&f.ambient).unwrap();
        let p = w.to_poisson().unwrap();
        assert_eq!(p.entry(0, 1), &e("-(1 + u^2 + v^2)^2/4", &uv));
        assert!(p.jacobi_residual().is_poisson);
    }
}
