//! Momentum maps as Poisson morphisms into a Lie–Poisson dual.
//!
//! Generators follow `λ*(e_k) = -X_{μ_k}`; with the bracket convention of
//! [`crate::poisson`] this makes `λ*` a Lie algebra homomorphism.

use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::exactalg::{parse_expression, Chart, CompiledFunction, RationalFunction};
use crate::liealg::{algebra_catalog, coadjoint_action_numeric, CoadjointGroup, LieAlgebra};
use crate::poisson::{PoissonStructure, VectorField};

/// `μ: M → g*` given by one component per basis element of `g`.
#[derive(Clone, Debug)]
pub struct MomentumMap {
    source: PoissonStructure,
    target: LieAlgebra,
    components: Vec<RationalFunction>,
}

impl MomentumMap {
    pub fn new(source: PoissonStructure, target: LieAlgebra, components: Vec<RationalFunction>) -> Result<Self> {
        if components.len() != target.dim() {
            return Err(Error::DimensionMismatch { expected: target.dim(), found: components.len() });
        }
        for c in &components {
            source.chart().ensure_same(c.chart())?;
        }
        Ok(MomentumMap { source, target, components })
    }

    pub fn parse(source: PoissonStructure, target: LieAlgebra, components: &[&str]) -> Result<Self> {
        let comps = components
            .iter()
            .map(|s| parse_expression(s, source.chart()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, comps)
    }

    pub fn source(&self) -> &PoissonStructure {
        &self.source
    }

    pub fn target(&self) -> &LieAlgebra {
        &self.target
    }

    pub fn chart(&self) -> &Chart {
        self.source.chart()
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    /// `residual_{ij} = {μ_i, μ_j} - Σ_k C^k_{ij} μ_k`.
    pub fn poisson_morphism_residual(&self) -> Result<Vec<Vec<RationalFunction>>> {
        let n = self.target.dim();
        let zero = RationalFunction::zero(self.chart());
        let mut out = vec![vec![zero; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let mut r = self.source.bracket(&self.components[i], &self.components[j])?;
                for (k, mu) in self.components.iter().enumerate() {
                    let c = self.target.c(i, j, k);
                    if !num_traits::Zero::is_zero(c) {
                        r = &r - &mu.scale(c);
                    }
                }
                out[j][i] = -&r;
                out[i][j] = r;
            }
        }
        Ok(out)
    }

    pub fn is_poisson_morphism(&self) -> Result<bool> {
        Ok(self.poisson_morphism_residual()?.iter().flatten().all(RationalFunction::is_zero))
    }

    /// `λ*(e_k) = -X_{μ_k}`.
    pub fn induced_generators(&self) -> Result<Vec<VectorField>> {
        self.components
            .iter()
            .map(|m| Ok(-&self.source.hamiltonian_vector_field(m)?))
            .collect()
    }

    /// Residual fields `gens_k + X_{μ_k}`.
    pub fn generator_consistency(&self, gens: &[VectorField]) -> Result<Vec<VectorField>> {
        if gens.len() != self.components.len() {
            return Err(Error::DimensionMismatch { expected: self.components.len(), found: gens.len() });
        }
        gens.iter()
            .zip(&self.components)
            .map(|(g, m)| {
                self.chart().ensure_same(g.chart())?;
                Ok(g + &self.source.hamiltonian_vector_field(m)?)
            })
            .collect()
    }

    /// Lie derivative of the source bivector along each generator.
    pub fn generator_invariance(&self, gens: &[VectorField]) -> Result<bool> {
        for g in gens {
            if !self.source.lie_derivative(g)?.iter().flatten().all(RationalFunction::is_zero) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn compiled(&self) -> Vec<CompiledFunction> {
        self.components.iter().map(CompiledFunction::new).collect()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval_f64(x)).collect()
    }
}

/// How a group acts on chart points for the equivariance sampler.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupAction {
    /// Rotations acting on each listed coordinate triple; `Ad*_g` is the same rotation.
    Rotation { triples: Vec<[usize; 3]> },
    /// `e^{iθ}` acting on each listed `(q, p)` plane; `Ad*` is trivial.
    CirclePlanes { planes: Vec<(usize, usize)> },
    /// `θ` shifting one coordinate; `Ad*` is trivial.
    CircleShift { coordinate: usize },
}

impl GroupAction {
    pub fn group_tag(&self) -> &'static str {
        match self {
            GroupAction::Rotation { .. } => "so3-exp",
            _ => "circle",
        }
    }

    /// Draws a group element: a rotation vector or an angle in the first slot.
    pub fn sample_element<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        match self {
            GroupAction::Rotation { .. } => {
                let v: [f64; 3] = [0; 3].map(|_| StandardNormal.sample(rng));
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(f64::MIN_POSITIVE);
                let angle: f64 = Uniform::new_inclusive(0.0, std::f64::consts::PI).expect("range").sample(rng);
                v.map(|c| c / n * angle)
            }
            _ => [Uniform::new(0.0, std::f64::consts::TAU).expect("range").sample(rng), 0.0, 0.0],
        }
    }

    pub fn act(&self, g: &[f64; 3], x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        match self {
            GroupAction::Rotation { triples } => {
                let r = Rotation3::from_scaled_axis(Vector3::from(*g));
                for t in triples {
                    let v = r * Vector3::new(x[t[0]], x[t[1]], x[t[2]]);
                    for (slot, val) in t.iter().zip(v.iter()) {
                        y[*slot] = *val;
                    }
                }
            }
            GroupAction::CirclePlanes { planes } => {
                let (s, c) = g[0].sin_cos();
                for &(q, p) in planes {
                    y[q] = c * x[q] - s * x[p];
                    y[p] = s * x[q] + c * x[p];
                }
            }
            GroupAction::CircleShift { coordinate } => y[*coordinate] += g[0],
        }
        y
    }

    /// `Ad*_g ξ`.
    pub fn coadjoint(&self, g: &[f64; 3], xi: &[f64]) -> Vec<f64> {
        match self {
            GroupAction::Rotation { .. } => coadjoint_action_numeric(CoadjointGroup::So3Exp, g, &[xi[0], xi[1], xi[2]]).to_vec(),
            _ => xi.to_vec(),
        }
    }
}

/// Outcome of [`equivariance_sample_check`].
#[derive(Clone, Debug)]
pub struct EquivarianceReport {
    pub group: &'static str,
    pub samples: usize,
    pub max_discrepancy: f64,
    pub tol: f64,
    pub passes: bool,
}

/// `max |μ(g·m) - Ad*_g μ(m)|` over sampled points and group elements.
pub fn equivariance_sample_check<R: Rng + ?Sized>(
    mu: &MomentumMap,
    action: &GroupAction,
    samples: usize,
    rng: &mut R,
    tol: f64,
) -> Result<EquivarianceReport> {
    if matches!(action, GroupAction::Rotation { .. }) && mu.target().dim() != 3 {
        return Err(Error::UnsupportedGroup(format!("so3-exp acting on a {}-dimensional dual", mu.target().dim())));
    }
    let f = mu.compiled();
    let n = mu.chart().len();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let g = action.sample_element(rng);
        let worst_here = discrepancy(&f, action, &g, &x)?;
        worst = worst.max(worst_here);
    }
    Ok(EquivarianceReport { group: action.group_tag(), samples, max_discrepancy: worst, tol, passes: worst <= tol })
}

/// [`equivariance_sample_check`] driven by `ChaCha8Rng::seed_from_u64(seed)`.
pub fn equivariance_seeded(mu: &MomentumMap, action: &GroupAction, samples: usize, seed: u64, tol: f64) -> Result<EquivarianceReport> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    equivariance_sample_check(mu, action, samples, &mut rng, tol)
}

/// `|μ(g·x) - Ad*_g μ(x)|` at one point.
pub fn discrepancy(f: &[CompiledFunction], action: &GroupAction, g: &[f64; 3], x: &[f64]) -> Result<f64> {
    let mu_x = f.iter().map(|c| c.eval(x)).collect::<Result<Vec<_>>>()?;
    let gx = action.act(g, x);
    let mu_gx = f.iter().map(|c| c.eval(&gx)).collect::<Result<Vec<_>>>()?;
    let rhs = action.coadjoint(g, &mu_x);
    Ok(mu_gx.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// Momentum maps of the cotangent lifts of left and right multiplication,
/// in the left trivialization `T*G ≅ G × g*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CotangentLift {
    /// `μ(h, ξ) = Ad*_h ξ`; `g` acts by `(h, ξ) ↦ (gh, ξ)`.
    Left,
    /// `μ(h, ξ) = -ξ`; `g` acts by `(h, ξ) ↦ (hg⁻¹, Ad*_g ξ)`.
    Right,
}

/// Cotangent-lift formula on a rotation-type group, elements given as rotation vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CotangentLiftFormula {
    pub side: CotangentLift,
    pub group: CoadjointGroup,
}

impl CotangentLiftFormula {
    pub fn eval(&self, h: &[f64; 3], xi: &[f64; 3]) -> [f64; 3] {
        match self.side {
            CotangentLift::Left => coadjoint_action_numeric(self.group, h, xi),
            CotangentLift::Right => xi.map(|v| -v),
        }
    }

    pub fn act(&self, g: &[f64; 3], h: &[f64; 3], xi: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
        let rg = Rotation3::from_scaled_axis(Vector3::from(*g));
        let rh = Rotation3::from_scaled_axis(Vector3::from(*h));
        match self.side {
            CotangentLift::Left => ((rg * rh).scaled_axis().into(), *xi),
            CotangentLift::Right => ((rh * rg.inverse()).scaled_axis().into(), coadjoint_action_numeric(self.group, g, xi)),
        }
    }

    /// [`Self::equivariance`] driven by `ChaCha8Rng::seed_from_u64(seed)`.
    pub fn equivariance_seeded(&self, samples: usize, seed: u64) -> f64 {
        self.equivariance(samples, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    /// `max |μ(g·(h,ξ)) - Ad*_g μ(h,ξ)|` over seeded samples.
    pub fn equivariance<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> f64 {
        let rot = GroupAction::Rotation { triples: vec![] };
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let g = rot.sample_element(rng);
            let h = rot.sample_element(rng);
            let xi: [f64; 3] = [0; 3].map(|_| StandardNormal.sample(rng));
            let (h2, xi2) = self.act(&g, &h, &xi);
            let lhs = self.eval(&h2, &xi2);
            let rhs = coadjoint_action_numeric(self.group, &g, &self.eval(&h, &xi));
            let d = lhs.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            worst = worst.max(d);
        }
        worst
    }
}

/// Chart-level momentum fixture.
#[derive(Clone, Debug)]
pub struct MomentumFixture {
    pub name: String,
    pub map: MomentumMap,
    pub generators: Vec<VectorField>,
    pub action: GroupAction,
    pub notes: Vec<String>,
}

/// Entry of [`example_catalog`].
#[derive(Clone, Debug)]
pub enum MomentumExample {
    Chart(Box<MomentumFixture>),
    Formula(CotangentLiftFormula),
    Documentation(&'static str),
}

pub const MOMENTUM_CATALOG_NAMES: &[&str] = &[
    "angular-momentum",
    "s1-on-c(n)",
    "s1-on-s2",
    "sun-cotangent(2)",
    "cotangent-left-formula",
    "cotangent-right-formula",
    "torus",
];

pub const TORUS_NOTE: &str = "The translation action of T² on itself preserves dθ1∧dθ2, but the generator ∂θ1 contracts \
to the closed, non-exact form dθ2, so no momentum map exists. Angle charts are outside the rational-function \
algebra, so this entry carries no computation.";

/// Looks up a momentum-map example by name.
pub fn example_catalog(name: &str) -> Result<MomentumExample> {
    let unknown = || Error::UnknownCatalog(name.to_string());
    let fixture = match name {
        "angular-momentum" => rotation_fixture(name, Chart::canonical(3), "so3", "q", "p")?,
        "sun-cotangent(2)" | "su2-cotangent" => {
            let chart = Chart::new(&["x1", "x2", "x3", "l1", "l2", "l3"])?;
            let mut f = rotation_fixture(name, chart, "su2", "x", "l")?;
            f.notes.push(
                "pairing bracket {x_a, l_b} = δ_ab; the trace pairing tr(XL) on E_a = -iσ_a/2 would give -2δ_ab".into(),
            );
            f
        }
        "s1-on-s2" => {
            let chart = Chart::new(&["z", "phi"])?;
            let source = PoissonStructure::from_entries(&chart, [(0, 1, RationalFunction::one(&chart))])?;
            let map = MomentumMap::parse(source, LieAlgebra::abelian(1)?, &["z"])?;
            let gen = VectorField::new(&chart, vec![RationalFunction::zero(&chart), RationalFunction::one(&chart)])?;
            MomentumFixture {
                name: name.into(),
                map,
                generators: vec![gen],
                action: GroupAction::CircleShift { coordinate: 1 },
                notes: vec!["cylindrical chart (z, φ) with ω = dz∧dφ, so {z, φ} = 1".into()],
            }
        }
        "cotangent-left-formula" => {
            return Ok(MomentumExample::Formula(CotangentLiftFormula { side: CotangentLift::Left, group: CoadjointGroup::So3Exp }))
        }
        "cotangent-right-formula" => {
            return Ok(MomentumExample::Formula(CotangentLiftFormula { side: CotangentLift::Right, group: CoadjointGroup::So3Exp }))
        }
        "torus" => return Ok(MomentumExample::Documentation(TORUS_NOTE)),
        _ => {
            let n = name
                .strip_prefix("s1-on-c(")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(unknown)?
                .parse::<usize>()
                .map_err(|_| unknown())?;
            circle_on_cn(n).map_err(|_| unknown())?
        }
    };
    Ok(MomentumExample::Chart(Box::new(fixture)))
}

/// Chart fixture by name; fails for formula and documentation entries.
pub fn chart_fixture(name: &str) -> Result<MomentumFixture> {
    match example_catalog(name)? {
        MomentumExample::Chart(f) => Ok(*f),
        _ => Err(Error::InvalidArgument(format!("`{name}` has no chart-level source"))),
    }
}

/// `S¹` acting on `ℂⁿ` by `e^{iθ}`, `z_k = q_k + i p_k`, `μ = ½Σ(q_k² + p_k²)`.
pub fn circle_on_cn(n: usize) -> Result<MomentumFixture> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let source = PoissonStructure::canonical(n);
    let chart = source.chart().clone();
    let terms: Vec<String> = (1..=n).map(|k| format!("q{k}^2 + p{k}^2")).collect();
    let mu = format!("({})/2", terms.join(" + "));
    let map = MomentumMap::parse(source, LieAlgebra::abelian(1)?, &[mu.as_str()])?;
    let mut comps = vec![RationalFunction::zero(&chart); 2 * n];
    for k in 0..n {
        comps[k] = -RationalFunction::var(&chart, n + k);
        comps[n + k] = RationalFunction::var(&chart, k);
    }
    Ok(MomentumFixture {
        name: format!("s1-on-c({n})"),
        map,
        generators: vec![VectorField::new(&chart, comps)?],
        action: GroupAction::CirclePlanes { planes: (0..n).map(|k| (k, n + k)).collect() },
        notes: vec![
            "normalized as ½Σ(q²+p²) so that the generator is exactly -X_μ; Σ|z_k|² and -½Σ(q²+p²) are also in use".into(),
        ],
    })
}

/// `μ = a × b` for the canonical pairing of `a` and `b`, target with `[e_1,e_2] = e_3` cyclic.
fn rotation_fixture(name: &str, chart: Chart, algebra: &str, a: &str, b: &str) -> Result<MomentumFixture> {
    let source = PoissonStructure::from_entries(&chart, (0..3).map(|k| (k, k + 3, RationalFunction::one(&chart))).collect::<Vec<_>>())?;
    let comps = [
        format!("{a}2*{b}3 - {a}3*{b}2"),
        format!("{a}3*{b}1 - {a}1*{b}3"),
        format!("{a}1*{b}2 - {a}2*{b}1"),
    ];
    let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
    let map = MomentumMap::parse(source, algebra_catalog(algebra)?, &refs)?;
    // generator of e_k: v ↦ -e_k × v on both triples
    let generators = (0..3)
        .map(|k| {
            let mut c = vec![RationalFunction::zero(&chart); 6];
            for off in [0, 3] {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                // (e_k × v)_j = v_i, (e_k × v)_i = -v_j
                c[off + j] = -RationalFunction::var(&chart, off + i);
                c[off + i] = RationalFunction::var(&chart, off + j);
            }
            VectorField::new(&chart, c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentumFixture {
        name: name.into(),
        map,
        generators,
        action: GroupAction::Rotation { triples: vec![[0, 1, 2], [3, 4, 5]] },
        notes: vec![format!("μ = {a} × {b}; generators λ*(e_k) = -e_k × v on both triples")],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::poisson_to_form;
    use rand_chacha::ChaCha8Rng;

    fn all_zero(v: &[VectorField]) -> bool {
        v.iter().all(VectorField::is_zero)
    }

    #[test]
    fn chart_fixtures_are_momentum_maps() {
        for name in ["angular-momentum", "s1-on-c(1)", "s1-on-c(2)", "s1-on-c(3)", "s1-on-s2", "sun-cotangent(2)"] {
            let f = chart_fixture(name).unwrap();
            assert!(f.map.is_poisson_morphism().unwrap(), "{name}");
            assert!(all_zero(&f.map.generator_consistency(&f.generators).unwrap()), "{name}");
            assert!(f.map.generator_invariance(&f.generators).unwrap(), "{name}");
        }
    }

    #[test]
    fn circle_momentum_values() {
        let f = chart_fixture("s1-on-c(1)").unwrap();
        let c = f.map.chart().clone();
        assert_eq!(f.map.components()[0], parse_expression("(q1^2 + p1^2)/2", &c).unwrap());
        // gens ⌟ ω = -dμ
        let w = poisson_to_form(f.map.source()).unwrap();
        let lhs = w.contract(f.generators[0].components()).unwrap();
        let rhs: Vec<_> = f.map.components()[0].gradient().iter().map(|g| -g).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn zero_momentum_leaves_generator() {
        let f = chart_fixture("s1-on-c(1)").unwrap();
        let zero = MomentumMap::new(f.map.source().clone(), LieAlgebra::abelian(1).unwrap(), vec![RationalFunction::zero(f.map.chart())]).unwrap();
        let r = zero.generator_consistency(&f.generators).unwrap();
        assert_eq!(r, f.generators);
    }

    #[test]
    fn generators_form_homomorphism() {
        let f = chart_fixture("angular-momentum").unwrap();
        let g = &f.generators;
        // [λ*e1, λ*e2] = λ*e3
        assert_eq!(g[0].commutator(&g[1]).unwrap(), g[2]);
        assert_eq!(f.map.induced_generators().unwrap(), f.generators);
    }

    #[test]
    fn equivariance_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for name in ["angular-momentum", "sun-cotangent(2)", "s1-on-c(2)", "s1-on-s2"] {
            let f = chart_fixture(name).unwrap();
            let r = equivariance_sample_check(&f.map, &f.action, 100, &mut rng, 1e-10).unwrap();
            assert!(r.passes, "{name}: {}", r.max_discrepancy);
            let x = vec![0.5; f.map.chart().len()];
            let d = discrepancy(&f.map.compiled(), &f.action, &[0.0; 3], &x).unwrap();
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn cotangent_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for name in ["cotangent-left-formula", "cotangent-right-formula"] {
            let MomentumExample::Formula(f) = example_catalog(name).unwrap() else { panic!() };
            assert!(f.equivariance(50, &mut rng) < 1e-12, "{name}");
        }
        let MomentumExample::Formula(r) = example_catalog("cotangent-right-formula").unwrap() else { panic!() };
        assert_eq!(r.eval(&[0.1, 0.2, 0.3], &[1.0, -2.0, 3.0]), [-1.0, 2.0, -3.0]);
        assert!(matches!(example_catalog("torus").unwrap(), MomentumExample::Documentation(_)));
        assert!(matches!(example_catalog("s1-on-c(x)"), Err(Error::UnknownCatalog(_))));
    }
}
