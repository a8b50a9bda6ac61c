//! Pointwise checks of symplectic reduction on circle actions.
//!
//! The main fixture is `S¹` acting on `ℂⁿ` with `μ = ½|z|²`. The level set
//! `μ = c` is the sphere `S^{2n-1}` of radius `√(2c)`, and for `n = 2` the
//! quotient is identified with a 2-sphere of radius `2c` by the Hopf map.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{rational_to_f64, CompiledFunction, Rational};
use crate::moment::MomentumMap;
use crate::poisson::PoissonStructure;
use crate::symplectic::poisson_to_form;

pub const RANK_TOL: f64 = 1e-8;

/// Numeric evaluator for a momentum map and its Jacobian.
#[derive(Clone, Debug)]
pub struct NumericMomentum {
    values: Vec<CompiledFunction>,
    jacobian: Vec<Vec<CompiledFunction>>,
}

impl NumericMomentum {
    pub fn new(mu: &MomentumMap) -> Self {
        NumericMomentum {
            values: mu.compiled(),
            jacobian: mu.components().iter().map(|c| c.gradient().iter().map(CompiledFunction::new).collect()).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<DVector<f64>> {
        let v = self.values.iter().map(|f| f.eval(x)).collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(v))
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let rows = self.jacobian.len();
        let cols = x.len();
        let mut m = DMatrix::zeros(rows, cols);
        for (i, row) in self.jacobian.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                m[(i, j)] = f.eval(x)?;
            }
        }
        Ok(m)
    }
}

/// Seeded sampler of points on `μ⁻¹(c)` by Newton projection from Gaussian starts.
pub struct LevelSetSampler {
    mu: NumericMomentum,
    level: DVector<f64>,
    dim: usize,
    rng: ChaCha8Rng,
}

impl LevelSetSampler {
    pub fn new(mu: &MomentumMap, level: &[Rational], seed: u64) -> Result<Self> {
        if level.len() != mu.target().dim() {
            return Err(Error::DimensionMismatch { expected: mu.target().dim(), found: level.len() });
        }
        Ok(LevelSetSampler {
            mu: NumericMomentum::new(mu),
            level: DVector::from_iterator(level.len(), level.iter().map(rational_to_f64)),
            dim: mu.chart().len(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// One point with `|μ(x) - c| ≤ 1e-12`.
    pub fn sample(&mut self) -> Result<Vec<f64>> {
        for _ in 0..20 {
            let mut x: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(&mut self.rng)).collect();
            for _ in 0..100 {
                let r = self.mu.eval(&x)? - &self.level;
                if r.amax() <= 1e-12 {
                    return Ok(x);
                }
                let j = self.mu.jacobian(&x)?;
                let Some(inv) = (&j * j.transpose()).try_inverse() else { break };
                let step = j.transpose() * inv * r;
                for (xi, s) in x.iter_mut().zip(step.iter()) {
                    *xi -= s;
                }
                if x.iter().any(|v| !v.is_finite()) {
                    break;
                }
            }
        }
        Err(Error::NoConvergence(0))
    }

    pub fn sample_n(&mut self, n: usize) -> Result<Vec<Vec<f64>>> {
        (0..n).map(|_| self.sample()).collect()
    }
}

/// Outcome of [`level_set_regularity`].
#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub points: usize,
    pub target_dim: usize,
    pub min_rank: usize,
    pub min_singular_value: f64,
    pub rank_tol: f64,
}

/// Checks that `Tμ` has full rank at every point.
pub fn level_set_regularity(mu: &MomentumMap, level: &[Rational], points: &[Vec<f64>], rank_tol: f64) -> Result<RegularityReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let num = NumericMomentum::new(mu);
    let c = DVector::from_iterator(level.len(), level.iter().map(rational_to_f64));
    let d = mu.target().dim();
    let mut min_rank = d;
    let mut min_sv = f64::INFINITY;
    for p in points {
        let off = (num.eval(p)? - &c).amax();
        if off > 1e-9 {
            return Err(Error::InvalidArgument(format!("point is off the level set by {off:e}")));
        }
        let sv = num.jacobian(p)?.singular_values();
        let rank = sv.iter().filter(|s| **s > rank_tol).count();
        min_rank = min_rank.min(rank);
        min_sv = min_sv.min(sv.iter().copied().fold(f64::INFINITY, f64::min));
    }
    Ok(RegularityReport { regular: min_rank == d, points: points.len(), target_dim: d, min_rank, min_singular_value: min_sv, rank_tol })
}

/// Circle action fixtures with an ambient form, orbit direction and level-set tangents.
pub trait ReductionFixture {
    fn ambient_dim(&self) -> usize;
    fn omega(&self, x: &DVector<f64>) -> DMatrix<f64>;
    fn orbit_direction(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Orthonormal basis of `T_x M_c`.
    fn tangent_basis(&self, x: &DVector<f64>) -> Vec<DVector<f64>>;
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64>;

    fn omega_eval(&self, x: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(self.omega(x) * b))
    }
}

/// `S¹` on `ℂⁿ` at level `c`, chart `(q1..qn, p1..pn)`, `ω = Σ dq_k∧dp_k`.
#[derive(Clone, Debug)]
pub struct CircleOnCn {
    pub n: usize,
    pub c: f64,
    omega: DMatrix<f64>,
}

impl CircleOnCn {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("level must be positive, got {c}")));
        }
        let w = poisson_to_form(&PoissonStructure::canonical(n))?;
        let omega = DMatrix::from_fn(2 * n, 2 * n, |i, j| w.entry(i, j).eval_f64(&vec![0.0; 2 * n]).expect("constant"));
        Ok(CircleOnCn { n, c, omega })
    }

    /// Adds `eps·dq1∧dq2`, which is not invariant under the circle.
    pub fn perturbed(mut self, eps: f64) -> Self {
        if self.n >= 2 {
            self.omega[(0, 1)] += eps;
            self.omega[(1, 0)] -= eps;
        }
        self
    }

    pub fn level_set_dim(&self) -> usize {
        2 * self.n - 1
    }

    pub fn quotient_dim(&self) -> usize {
        2 * self.n - 2
    }

    /// `e^{iθ}` acting on every plane.
    pub fn rotate(&self, theta: f64, v: &DVector<f64>) -> DVector<f64> {
        let (s, c) = theta.sin_cos();
        let n = self.n;
        let mut out = v.clone();
        for k in 0..n {
            out[k] = c * v[k] - s * v[n + k];
            out[n + k] = s * v[k] + c * v[n + k];
        }
        out
    }

    fn hopf_check(&self) -> Result<()> {
        if self.n == 2 {
            Ok(())
        } else {
            Err(Error::InvalidArgument("the Hopf map needs n = 2".into()))
        }
    }

    /// `h(z1, z2) = (2 Re z1z̄2, 2 Im z1z̄2, |z1|² - |z2|²)`.
    pub fn hopf(&self, x: &DVector<f64>) -> Result<Vector3<f64>> {
        self.hopf_check()?;
        let (q1, q2, p1, p2) = (x[0], x[1], x[2], x[3]);
        Ok(Vector3::new(2.0 * (q1 * q2 + p1 * p2), 2.0 * (p1 * q2 - q1 * p2), q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2))
    }

    /// Differential of the Hopf map at `x`.
    pub fn hopf_differential(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.hopf_check()?;
        let (q1, q2, p1, p2) = (x[0], x[1], x[2], x[3]);
        Ok(DMatrix::from_row_slice(
            3,
            4,
            &[
                2.0 * q2, 2.0 * q1, 2.0 * p2, 2.0 * p1, //
                -2.0 * p2, 2.0 * p1, 2.0 * q2, -2.0 * q1, //
                2.0 * q1, -2.0 * q2, 2.0 * p1, -2.0 * p2,
            ],
        ))
    }

    /// Reduced form on the sphere of radius `2c`: `ω_c(y; a, b) = -y·(a×b) / (4|y|²)`.
    pub fn reduced_form(&self, y: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        -y.dot(&a.cross(b)) / (4.0 * y.norm_squared())
    }

    pub fn push(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<Vector3<f64>> {
        let d = self.hopf_differential(x)? * v;
        Ok(Vector3::new(d[0], d[1], d[2]))
    }
}

impl ReductionFixture for CircleOnCn {
    fn ambient_dim(&self) -> usize {
        2 * self.n
    }

    fn omega(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.omega.clone()
    }

    fn orbit_direction(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(2 * n, |i, _| if i < n { -x[n + i] } else { x[i - n] })
    }

    fn tangent_basis(&self, x: &DVector<f64>) -> Vec<DVector<f64>> {
        orthogonal_complement(x)
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let v = DVector::from_fn(2 * self.n, |_, _| StandardNormal.sample(rng));
        let r = (2.0 * self.c).sqrt();
        v.normalize() * r
    }
}

/// `S¹` on the sphere chart `(z, φ)` with `ω = dz∧dφ`, level `z = c`.
#[derive(Clone, Debug)]
pub struct SphereBand {
    pub c: f64,
}

impl ReductionFixture for SphereBand {
    fn ambient_dim(&self) -> usize {
        2
    }

    fn omega(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    }

    fn orbit_direction(&self, _x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![0.0, 1.0])
    }

    fn tangent_basis(&self, _x: &DVector<f64>) -> Vec<DVector<f64>> {
        vec![DVector::from_vec(vec![0.0, 1.0])]
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        DVector::from_vec(vec![self.c, Uniform::new(0.0, std::f64::consts::TAU).expect("range").sample(rng)])
    }
}

/// Orthonormal basis of the complement of `m`.
fn orthogonal_complement(m: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = m.len();
    let mut a = DMatrix::zeros(n, n + 1);
    a.set_column(0, &m.normalize());
    for i in 0..n {
        a[(i, i + 1)] = 1.0;
    }
    // Gram–Schmidt keeping the first n columns that survive
    let mut basis: Vec<DVector<f64>> = vec![a.column(0).into_owned()];
    for j in 1..=n {
        let mut v: DVector<f64> = a.column(j).into_owned();
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-6 {
            basis.push(v.normalize());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// `|ω(X, Y_orbit)|` at one point.
pub fn orbit_perp_residual<F: ReductionFixture>(f: &F, x: &DVector<f64>, tangent: &DVector<f64>) -> f64 {
    f.omega_eval(x, tangent, &f.orbit_direction(x)).abs()
}

/// Max of [`orbit_perp_residual`] over the tangent basis at every point.
pub fn orbit_perp_check<F: ReductionFixture>(f: &F, points: &[DVector<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        if x.len() != f.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: f.ambient_dim(), found: x.len() });
        }
        for t in f.tangent_basis(x) {
            worst = worst.max(orbit_perp_residual(f, x, &t));
        }
    }
    Ok(worst)
}

/// A point with two tangent vectors.
#[derive(Clone, Debug)]
pub struct LiftPair {
    pub point: DVector<f64>,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

/// Values of `ω` on two lift pairs.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReducedEval {
    pub first: f64,
    pub second: f64,
    pub residual: f64,
}

/// Evaluates `ω` on two lift pairs after checking that both project to the same
/// base point and the same quotient vectors under the Hopf differential.
pub fn reduced_form_eval(f: &CircleOnCn, a: &LiftPair, b: &LiftPair, tol: f64) -> Result<ReducedEval> {
    let scale = 1.0 + f.hopf(&a.point)?.norm();
    let mismatch = (f.hopf(&a.point)? - f.hopf(&b.point)?)
        .norm()
        .max((f.push(&a.point, &a.x)? - f.push(&b.point, &b.x)?).norm())
        .max((f.push(&a.point, &a.y)? - f.push(&b.point, &b.y)?).norm());
    if mismatch > tol * scale {
        return Err(Error::ProjectionMismatch(mismatch));
    }
    let first = f.omega_eval(&a.point, &a.x, &a.y);
    let second = f.omega_eval(&b.point, &b.x, &b.y);
    Ok(ReducedEval { first, second, residual: (first - second).abs() })
}

/// Summary of [`hopf_demo`].
#[derive(Clone, Debug, Serialize)]
pub struct ReducedFormReport {
    pub samples: usize,
    pub max_welldef_residual: f64,
    pub max_pullback_residual: f64,
    pub reduced_dimension: usize,
}

fn random_tangent<R: Rng + ?Sized>(basis: &[DVector<f64>], rng: &mut R) -> DVector<f64> {
    basis.iter().fold(DVector::zeros(basis[0].len()), |acc, b| {
        let w: f64 = StandardNormal.sample(rng);
        acc + b * w
    })
}

/// Reduction checks on `S³ ⊂ ℂ²` at level `c` with the given seed.
pub fn hopf_demo(c: f64, n_samples: usize, seed: u64) -> Result<ReducedFormReport> {
    hopf_demo_on(&CircleOnCn::new(2, c)?, n_samples, seed)
}

/// [`hopf_demo`] on a prepared fixture, e.g. a perturbed one.
pub fn hopf_demo_on(f: &CircleOnCn, n_samples: usize, seed: u64) -> Result<ReducedFormReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut welldef = 0.0f64;
    let mut pullback = 0.0f64;
    let mut dim = usize::MAX;
    for _ in 0..n_samples {
        let m = f.sample_point(&mut rng);
        let basis = f.tangent_basis(&m);
        let orbit = f.orbit_direction(&m);
        let x = random_tangent(&basis, &mut rng);
        let y = random_tangent(&basis, &mut rng);
        // lifts shifted along the orbit
        let (s, t): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        let a = LiftPair { point: m.clone(), x: x.clone(), y: y.clone() };
        let b = LiftPair { point: m.clone(), x: &x + &orbit * s, y: &y + &orbit * t };
        welldef = welldef.max(reduced_form_eval(f, &a, &b, 1e-9)?.residual);
        // lifts at another point of the same fibre
        let theta: f64 = Uniform::new(0.0, std::f64::consts::TAU).expect("range").sample(&mut rng);
        let b = LiftPair { point: f.rotate(theta, &m), x: f.rotate(theta, &x), y: f.rotate(theta, &y) };
        welldef = welldef.max(reduced_form_eval(f, &a, &b, 1e-9)?.residual);
        // ω on lifts against ω_c on their images
        let lhs = f.omega_eval(&m, &x, &y);
        let rhs = f.reduced_form(&f.hopf(&m)?, &f.push(&m, &x)?, &f.push(&m, &y)?);
        pullback = pullback.max((lhs - rhs).abs());
        // rank of dh on T M_c is the quotient dimension
        let mut t = DMatrix::zeros(4, basis.len());
        for (j, b) in basis.iter().enumerate() {
            t.set_column(j, b);
        }
        let rank = (f.hopf_differential(&m)? * t).singular_values().iter().filter(|s| **s > RANK_TOL).count();
        dim = dim.min(rank);
    }
    Ok(ReducedFormReport { samples: n_samples, max_welldef_residual: welldef, max_pullback_residual: pullback, reduced_dimension: dim })
}

/// Monte-Carlo estimate of the symplectic area of the quotient at level `c`.
///
/// Uniform points on `S³` push forward to uniform points on the image sphere,
/// so the area is the sphere area times the mean ratio of `|ω(X,Y)|` to the
/// Euclidean area spanned by `dh X, dh Y`.
pub fn hopf_area_estimate(c: f64, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let f = CircleOnCn::new(2, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 2.0 * c;
    let mut acc = 0.0;
    for _ in 0..n_samples {
        let m = f.sample_point(&mut rng);
        let basis = f.tangent_basis(&m);
        let x = random_tangent(&basis, &mut rng);
        let y = random_tangent(&basis, &mut rng);
        let area = f.push(&m, &x)?.cross(&f.push(&m, &y)?).norm();
        acc += f.omega_eval(&m, &x, &y).abs() / area;
    }
    Ok(acc / n_samples as f64 * 4.0 * std::f64::consts::PI * radius * radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational;
    use crate::moment::chart_fixture;

    fn pts(f: &CircleOnCn, n: usize, seed: u64) -> Vec<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| f.sample_point(&mut rng)).collect()
    }

    #[test]
    fn sampler_and_regularity() {
        let fx = chart_fixture("s1-on-c(2)").unwrap();
        let level = [rational(1, 2)];
        let mut s = LevelSetSampler::new(&fx.map, &level, 5).unwrap();
        let points = s.sample_n(20).unwrap();
        let r = level_set_regularity(&fx.map, &level, &points, RANK_TOL).unwrap();
        assert!(r.regular);
        let origin = vec![vec![0.0; 4]];
        let r = level_set_regularity(&fx.map, &[rational(0, 1)], &origin, RANK_TOL).unwrap();
        assert!(!r.regular && r.min_rank == 0);
        assert!(level_set_regularity(&fx.map, &level, &[], RANK_TOL).is_err());
        let band = chart_fixture("s1-on-s2").unwrap();
        let r = level_set_regularity(&band.map, &[rational(0, 1)], &[vec![0.0, 1.0]], RANK_TOL).unwrap();
        assert!(r.regular);
    }

    #[test]
    fn orbit_perpendicularity() {
        let f = CircleOnCn::new(2, 0.5).unwrap();
        let p = pts(&f, 50, 7);
        assert!(orbit_perp_check(&f, &p).unwrap() < 1e-10);
        let m = &p[0];
        let o = f.orbit_direction(m);
        assert_eq!(orbit_perp_residual(&f, m, &o), 0.0);
        let bad = &f.tangent_basis(m)[0] + m;
        assert!(orbit_perp_residual(&f, m, &bad) > 1e-3);
        let band = SphereBand { c: 0.25 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bp: Vec<_> = (0..5).map(|_| band.sample_point(&mut rng)).collect();
        assert_eq!(orbit_perp_check(&band, &bp).unwrap(), 0.0);
    }

    #[test]
    fn lift_evaluation() {
        let f = CircleOnCn::new(2, 0.5).unwrap();
        let m = pts(&f, 1, 3).remove(0);
        let b = f.tangent_basis(&m);
        let a = LiftPair { point: m.clone(), x: b[0].clone(), y: b[1].clone() };
        assert_eq!(reduced_form_eval(&f, &a, &a, 1e-9).unwrap().residual, 0.0);
        let off = LiftPair { point: m.clone(), x: b[1].clone(), y: b[0].clone() };
        assert!(matches!(reduced_form_eval(&f, &a, &off, 1e-9), Err(Error::ProjectionMismatch(_))));
    }

    #[test]
    fn hopf_report() {
        let r = hopf_demo(0.5, 50, 7).unwrap();
        assert!(r.max_welldef_residual < 1e-9, "{r:?}");
        assert!(r.max_pullback_residual < 1e-9, "{r:?}");
        assert_eq!(r.reduced_dimension, 2);
        assert!(hopf_demo(0.5, 0, 7).is_err());
        assert!(hopf_demo(0.0, 5, 7).is_err());
        let bad = CircleOnCn::new(2, 0.5).unwrap().perturbed(0.5);
        assert!(hopf_demo_on(&bad, 50, 7).unwrap().max_welldef_residual > 1e-3);
    }

    #[test]
    fn area_is_linear_in_level() {
        let a1 = hopf_area_estimate(0.5, 4000, 9).unwrap();
        let a2 = hopf_area_estimate(1.0, 4000, 9).unwrap();
        assert!((a2 / a1 - 2.0).abs() < 0.04);
        assert!((a1 - std::f64::consts::PI).abs() < 1e-9 * a1, "{a1}");
    }

    #[test]
    fn dimensions() {
        for n in 1..4 {
            let f = CircleOnCn::new(n, 1.0).unwrap();
            let m = pts(&f, 1, 2).remove(0);
            assert_eq!(f.tangent_basis(&m).len(), f.level_set_dim());
            assert_eq!(f.quotient_dim(), 2 * n - 2);
        }
    }
}
