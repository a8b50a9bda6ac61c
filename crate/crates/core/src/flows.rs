//! Fixed-step integration of `ẋ = X_H(x)` with conservation reports.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{parse_expression, Chart, CompiledFunction, Rational, RationalFunction};
use crate::liealg::algebra_catalog;
use crate::poisson::PoissonStructure;

/// Poisson structure, Hamiltonian and named candidate invariants on one chart.
#[derive(Clone, Debug)]
pub struct DynamicalSystem {
    pub name: String,
    structure: PoissonStructure,
    hamiltonian: RationalFunction,
    conserved: Vec<(String, RationalFunction)>,
}

impl DynamicalSystem {
    pub fn new(
        name: impl Into<String>,
        structure: PoissonStructure,
        hamiltonian: RationalFunction,
        conserved: Vec<(String, RationalFunction)>,
    ) -> Result<Self> {
        structure.chart().ensure_same(hamiltonian.chart())?;
        for (_, f) in &conserved {
            structure.chart().ensure_same(f.chart())?;
        }
        Ok(DynamicalSystem { name: name.into(), structure, hamiltonian, conserved })
    }

    pub fn chart(&self) -> &Chart {
        self.structure.chart()
    }

    pub fn structure(&self) -> &PoissonStructure {
        &self.structure
    }

    pub fn hamiltonian(&self) -> &RationalFunction {
        &self.hamiltonian
    }

    pub fn conserved(&self) -> &[(String, RationalFunction)] {
        &self.conserved
    }

    /// Compiled components of `X_H`.
    pub fn vector_field(&self) -> Result<Vec<CompiledFunction>> {
        let x = self.structure.hamiltonian_vector_field(&self.hamiltonian)?;
        Ok(x.components().iter().map(CompiledFunction::new).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "rk4")]
    Rk4,
    #[serde(rename = "implicit-midpoint")]
    ImplicitMidpoint,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::ImplicitMidpoint => "implicit-midpoint",
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "implicit-midpoint" => Ok(Method::ImplicitMidpoint),
            _ => Err(Error::InvalidArgument(format!("unknown method `{s}`"))),
        }
    }
}

/// Uniformly stepped trajectory; `states[i]` is the state at `times[i]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub method: Method,
    pub dt: f64,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has the initial state")
    }

    /// CSV with the chart names as header and one row per state.
    pub fn to_csv(&self, chart: &Chart) -> String {
        let mut out = chart.names().join(",");
        out.push('\n');
        for s in &self.states {
            let row: Vec<String> = s.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

pub const MIDPOINT_TOL: f64 = 1e-13;
pub const MIDPOINT_MAX_ITER: usize = 50;

fn eval_field(f: &[CompiledFunction], x: &[f64], out: &mut [f64]) -> Result<()> {
    for (o, c) in out.iter_mut().zip(f) {
        *o = c.eval(x)?;
    }
    Ok(())
}

/// Number of steps and effective step so that the run ends exactly at `t_end`.
pub fn step_plan(dt: f64, t_end: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument("dt and t_end must be positive and finite".into()));
    }
    let ratio = t_end / dt;
    let n = if (ratio - ratio.round()).abs() <= 1e-9 * ratio { ratio.round() } else { ratio.ceil() };
    let n = (n as usize).max(1);
    Ok((n, t_end / n as f64))
}

pub fn integrate(sys: &DynamicalSystem, x0: &[f64], dt: f64, t_end: f64, method: Method) -> Result<Trajectory> {
    let dim = sys.chart().len();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(0));
    }
    let (steps, h) = step_plan(dt, t_end)?;
    let f = sys.vector_field()?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x0.to_vec());
    let mut x = x0.to_vec();
    let mut k = vec![vec![0.0; dim]; 4];
    let mut tmp = vec![0.0; dim];
    for step in 1..=steps {
        match method {
            Method::Rk4 => {
                eval_field(&f, &x, &mut k[0])?;
                for i in 0..dim {
                    tmp[i] = x[i] + 0.5 * h * k[0][i];
                }
                eval_field(&f, &tmp, &mut k[1])?;
                for i in 0..dim {
                    tmp[i] = x[i] + 0.5 * h * k[1][i];
                }
                eval_field(&f, &tmp, &mut k[2])?;
                for i in 0..dim {
                    tmp[i] = x[i] + h * k[2][i];
                }
                eval_field(&f, &tmp, &mut k[3])?;
                for i in 0..dim {
                    x[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
                }
            }
            Method::ImplicitMidpoint => {
                // x' = x + h f((x + x')/2), solved by fixed-point iteration
                eval_field(&f, &x, &mut k[0])?;
                let mut next: Vec<f64> = (0..dim).map(|i| x[i] + h * k[0][i]).collect();
                let mut converged = false;
                for _ in 0..MIDPOINT_MAX_ITER {
                    for i in 0..dim {
                        tmp[i] = 0.5 * (x[i] + next[i]);
                    }
                    eval_field(&f, &tmp, &mut k[1])?;
                    let mut delta = 0.0f64;
                    let mut scale = 1.0f64;
                    for i in 0..dim {
                        let v = x[i] + h * k[1][i];
                        delta = delta.max((v - next[i]).abs());
                        scale = scale.max(v.abs());
                        next[i] = v;
                    }
                    if converged {
                        break;
                    }
                    // one more sweep after reaching tolerance brings the residual to roundoff
                    converged = delta <= MIDPOINT_TOL * scale;
                    if delta == 0.0 {
                        break;
                    }
                }
                if !converged {
                    return Err(Error::NoConvergence(step));
                }
                x = next;
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(step));
        }
        times.push(step as f64 * h);
        states.push(x.clone());
    }
    Ok(Trajectory { times, states, method, dt: h })
}

/// Drift of one candidate along a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct QuantityDrift {
    pub name: String,
    pub initial: f64,
    pub max_abs_drift: f64,
    /// `max_abs_drift / |initial|`, or the absolute drift when the initial value is zero.
    pub relative_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservationReport {
    pub quantities: Vec<QuantityDrift>,
}

impl ConservationReport {
    pub fn get(&self, name: &str) -> Option<&QuantityDrift> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

pub fn conservation_report(sys: &DynamicalSystem, traj: &Trajectory) -> Result<ConservationReport> {
    let dim = sys.chart().len();
    if traj.states.first().is_some_and(|s| s.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: traj.states[0].len() });
    }
    let quantities = sys
        .conserved
        .iter()
        .map(|(name, f)| {
            let c = CompiledFunction::new(f);
            let initial = c.eval(&traj.states[0])?;
            let mut drift = 0.0f64;
            for s in &traj.states {
                drift = drift.max((c.eval(s)? - initial).abs());
            }
            let relative_drift = if initial != 0.0 { drift / initial.abs() } else { drift };
            Ok(QuantityDrift { name: name.clone(), initial, max_abs_drift: drift, relative_drift })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConservationReport { quantities })
}

pub const BUILTIN_SYSTEMS: &[&str] = &["harmonic(n)", "central-force(k)", "central-force-quartic(k)", "rigid-body(I1,I2,I3)"];

fn args_of<'a>(name: &'a str, prefix: &str) -> Option<&'a str> {
    if name == prefix {
        return Some("");
    }
    name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')
}

fn parse_rational(s: &str) -> Result<Rational> {
    let f = parse_expression(s.trim(), &Chart::new::<&str>(&[])?)?;
    f.constant_value().ok_or_else(|| Error::InvalidArgument(format!("`{s}` is not a constant")))
}

/// `harmonic(n)`, `central-force(k)`, `central-force-quartic(k)` or `rigid-body(I1,I2,I3)`.
pub fn builtin_system(name: &str) -> Result<DynamicalSystem> {
    let unknown = || Error::UnknownCatalog(name.to_string());
    if let Some(a) = args_of(name, "harmonic") {
        let n: usize = if a.is_empty() { 1 } else { a.trim().parse().map_err(|_| unknown())? };
        return harmonic(n);
    }
    if let Some(a) = args_of(name, "central-force-quartic") {
        let k = if a.is_empty() { Rational::from_integer(1.into()) } else { parse_rational(a)? };
        return central_force(&k, 2);
    }
    if let Some(a) = args_of(name, "central-force") {
        let k = if a.is_empty() { Rational::from_integer(1.into()) } else { parse_rational(a)? };
        return central_force(&k, 1);
    }
    if let Some(a) = args_of(name, "rigid-body") {
        let inertia = a.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        if inertia.len() != 3 {
            return Err(Error::InvalidArgument("rigid-body needs three inertia values".into()));
        }
        return rigid_body([&inertia[0], &inertia[1], &inertia[2]]);
    }
    Err(unknown())
}

/// `H = ½Σ(q_k² + p_k²)` on canonical `ℝ²ⁿ`.
pub fn harmonic(n: usize) -> Result<DynamicalSystem> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let p = PoissonStructure::canonical(n);
    let terms: Vec<String> = (1..=n).map(|k| format!("q{k}^2 + p{k}^2")).collect();
    let h = parse_expression(&format!("({})/2", terms.join(" + ")), p.chart())?;
    DynamicalSystem::new(format!("harmonic({n})"), p, h.clone(), vec![("H".into(), h)])
}

/// `H = ½|p|² + k|q|^{2m}` on canonical `ℝ⁶`, with energy and angular momentum as candidates.
pub fn central_force(k: &Rational, m: u32) -> Result<DynamicalSystem> {
    let p = PoissonStructure::canonical(3);
    let c = p.chart().clone();
    let e = |s: &str| parse_expression(s, &c);
    let r2 = e("q1^2 + q2^2 + q3^2")?;
    let u = r2.pow(m).scale(k);
    let h = &e("(p1^2 + p2^2 + p3^2)/2")? + &u;
    let conserved = vec![
        ("E".to_string(), h.clone()),
        ("L1".to_string(), e("q2*p3 - q3*p2")?),
        ("L2".to_string(), e("q3*p1 - q1*p3")?),
        ("L3".to_string(), e("q1*p2 - q2*p1")?),
    ];
    let name = if m == 1 { format!("central-force({k})") } else { format!("central-force-quartic({k})") };
    DynamicalSystem::new(name, p, h, conserved)
}

/// Lie–Poisson flow on `so(3)*` with `H = ½Σ x_i²/I_i`.
pub fn rigid_body(inertia: [&Rational; 3]) -> Result<DynamicalSystem> {
    if inertia.iter().any(|i| **i <= Rational::from_integer(0.into())) {
        return Err(Error::InvalidArgument("inertia values must be positive".into()));
    }
    let p = algebra_catalog("so3")?.lie_poisson_structure();
    let c = p.chart().clone();
    let mut h = RationalFunction::zero(&c);
    for (i, ii) in inertia.iter().enumerate() {
        h = &h + &RationalFunction::var(&c, i).pow(2).scale(&(ii.recip() / Rational::from_integer(2.into())));
    }
    let casimir = parse_expression("x1^2 + x2^2 + x3^2", &c)?;
    let name = format!("rigid-body({},{},{})", inertia[0], inertia[1], inertia[2]);
    DynamicalSystem::new(name, p, h.clone(), vec![("H".into(), h), ("C".into(), casimir)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_period() {
        let s = builtin_system("harmonic(1)").unwrap();
        let t = integrate(&s, &[1.0, 0.0], 1e-3, std::f64::consts::TAU, Method::Rk4).unwrap();
        let x = t.last();
        assert!(((x[0] - 1.0).powi(2) + x[1].powi(2)).sqrt() < 1e-9, "{x:?}");
        assert!((t.times.last().unwrap() - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn direction_matches_hamilton_equations() {
        let s = builtin_system("harmonic").unwrap();
        let t = integrate(&s, &[0.0, 1.0], 1e-3, 0.1, Method::Rk4).unwrap();
        // q' = p > 0 initially
        assert!(t.last()[0] > 0.0);
    }

    #[test]
    fn zero_hamiltonian_is_constant() {
        let p = PoissonStructure::canonical(1);
        let s = DynamicalSystem::new("zero", p.clone(), RationalFunction::zero(p.chart()), vec![]).unwrap();
        let t = integrate(&s, &[0.3, -0.2], 0.1, 1.0, Method::Rk4).unwrap();
        assert!(t.states.iter().all(|x| x == &[0.3, -0.2]));
    }

    #[test]
    fn rk4_conservation_and_order() {
        let s = builtin_system("harmonic(1)").unwrap();
        let t = integrate(&s, &[1.0, 0.0], 1e-3, 10.0, Method::Rk4).unwrap();
        assert_eq!(t.states.len(), 10001);
        let r = conservation_report(&s, &t).unwrap();
        assert!(r.get("H").unwrap().relative_drift < 1e-10);
        let drift = |dt| {
            let t = integrate(&s, &[1.0, 0.0], dt, 10.0, Method::Rk4).unwrap();
            conservation_report(&s, &t).unwrap().get("H").unwrap().max_abs_drift
        };
        let ratio = drift(0.1) / drift(0.05);
        assert!((8.0..=32.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn non_conserved_candidate_drifts() {
        let s = builtin_system("harmonic(1)").unwrap();
        let q = parse_expression("q1", s.chart()).unwrap();
        let s2 = DynamicalSystem::new("h", s.structure().clone(), s.hamiltonian().clone(), vec![("q".into(), q)]).unwrap();
        let t = integrate(&s2, &[1.0, 0.0], 1e-2, 10.0, Method::Rk4).unwrap();
        assert!(conservation_report(&s2, &t).unwrap().quantities[0].max_abs_drift > 0.5);
    }

    #[test]
    fn midpoint_preserves_quadratic_energy() {
        let s = builtin_system("harmonic(1)").unwrap();
        let t = integrate(&s, &[1.0, 0.0], 1e-2, 100.0, Method::ImplicitMidpoint).unwrap();
        assert!(conservation_report(&s, &t).unwrap().get("H").unwrap().max_abs_drift < 1e-12);
    }

    #[test]
    fn rigid_body_runs() {
        let s = builtin_system("rigid-body(1,2,3)").unwrap();
        let t = integrate(&s, &[1.0, 0.1, 0.0], 1e-3, 10.0, Method::Rk4).unwrap();
        let r = conservation_report(&s, &t).unwrap();
        assert!(r.get("H").unwrap().relative_drift < 1e-8);
        assert!(r.get("C").unwrap().relative_drift < 1e-8);
        let iso = builtin_system("rigid-body(1,1,1)").unwrap();
        let t = integrate(&iso, &[0.3, -0.4, 0.5], 1e-2, 1.0, Method::Rk4).unwrap();
        assert!(t.states.iter().all(|x| x == &[0.3, -0.4, 0.5]));
        assert!(builtin_system("rigid-body(1,0,3)").is_err());
    }

    #[test]
    fn central_force_angular_momentum() {
        let s = builtin_system("central-force(1/2)").unwrap();
        let t = integrate(&s, &[1.0, 0.2, -0.3, 0.1, 0.8, 0.4], 1e-3, 10.0, Method::Rk4).unwrap();
        let r = conservation_report(&s, &t).unwrap();
        for l in ["L1", "L2", "L3"] {
            assert!(r.get(l).unwrap().max_abs_drift < 1e-9, "{l}");
        }
        assert!(builtin_system("pendulum").is_err());
    }

    #[test]
    fn pole_is_reported() {
        let c = Chart::new(&["q", "p"]).unwrap();
        let p = PoissonStructure::from_entries(&c, [(0, 1, RationalFunction::one(&c))]).unwrap();
        let h = parse_expression("1/q + p^2/2", &c).unwrap();
        let s = DynamicalSystem::new("pole", p, h, vec![]).unwrap();
        assert_eq!(integrate(&s, &[0.0, 1.0], 0.1, 1.0, Method::Rk4).unwrap_err(), Error::Pole);
    }
}
