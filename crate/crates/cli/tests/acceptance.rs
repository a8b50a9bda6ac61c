//! Acceptance criteria 1-10, one PASS/FAIL line each. Runs without the libtest harness.

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use poisson_core::exactalg::{parse_expression, rational, Chart, Rational, RationalFunction};
use poisson_core::flows::{builtin_system, conservation_report, integrate, Method};
use poisson_core::liealg::{algebra_catalog, structure_jacobi_check, CoadjointGroup, LieAlgebra, StructureConstants};
use poisson_core::moment::{chart_fixture, equivariance_sample_check, GroupAction};
use poisson_core::plie::{
    cobracket_and_cocycle, cobracket_finite_difference, dual_structure_constants, is_ad_invariant, manin_double,
    multiplicativity_sample_check, schouten_square, RMatrix,
};
use poisson_core::poisson::PoissonStructure;
use poisson_core::reduction::{hopf_area_estimate, hopf_demo, orbit_perp_check, CircleOnCn, ReductionFixture};
use poisson_core::symplectic::sphere_fixture;

type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// Random polynomial with at most four terms of total degree ≤ 3 and small rational coefficients.
fn random_poly(chart: &Chart, rng: &mut ChaCha8Rng) -> RationalFunction {
    let mut f = RationalFunction::zero(chart);
    for _ in 0..rng.random_range(1..=4) {
        let c = rational(rng.random_range(-5..=5), rng.random_range(1..=3));
        let mut term = RationalFunction::constant(chart, c);
        let degree = rng.random_range(0..=3);
        for _ in 0..degree {
            term = &term * &RationalFunction::var(chart, rng.random_range(0..chart.len()));
        }
        f = &f + &term;
    }
    f
}

fn valid_structures() -> Vec<(String, PoissonStructure)> {
    let mut out: Vec<(String, PoissonStructure)> =
        (1..=2).map(|n| (format!("canonical R^{}", 2 * n), PoissonStructure::canonical(n))).collect();
    for name in ["so3", "sl2", "su2", "heisenberg3"] {
        out.push((format!("{name}*"), algebra_catalog(name).unwrap().lie_poisson_structure()));
    }
    out
}

fn criterion_1() -> Check {
    let start = Instant::now();
    for n in 1..=3 {
        ensure!(PoissonStructure::canonical(n).jacobi_residual().is_poisson, "canonical R^{} fails Jacobi", 2 * n);
    }
    for name in ["so3", "sl2", "su2", "heisenberg3"] {
        let p = algebra_catalog(name).unwrap().lie_poisson_structure();
        ensure!(p.jacobi_residual().is_poisson, "{name} Lie-Poisson fails Jacobi");
    }
    // π^{12} = x3, π^{23} = x1, π^{31} = x1: hand expansion gives -x3 on (1,2,3)
    let chart = Chart::new(&["x1", "x2", "x3"]).unwrap();
    let e = |s: &str| parse_expression(s, &chart).unwrap();
    let broken = PoissonStructure::from_entries(&chart, [(0, 1, e("x3")), (1, 2, e("x1")), (2, 0, e("x1"))]).unwrap();
    let rep = broken.jacobi_residual();
    ensure!(!rep.is_poisson, "perturbed structure passes Jacobi");
    ensure!(rep.residuals[&(0, 1, 2)] == e("-x3"), "residual is {}", rep.residuals[&(0, 1, 2)]);
    ensure!(start.elapsed() < Duration::from_secs(1), "took {:?}", start.elapsed());
    Ok(())
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = PoissonStructure::canonical(2);
    let chart = p.chart().clone();
    for t in 0..100 {
        let (f, g, h) = (random_poly(&chart, &mut rng), random_poly(&chart, &mut rng), random_poly(&chart, &mut rng));
        let (a, b) = (rational(rng.random_range(-4..=4), 1), rational(rng.random_range(1..=4), 3));
        let fg = p.bracket(&f, &g).unwrap();
        ensure!(fg == -&p.bracket(&g, &f).unwrap(), "antisymmetry fails on triple {t}");
        let lhs = p.bracket(&(&f.scale(&a) + &g.scale(&b)), &h).unwrap();
        let rhs = &p.bracket(&f, &h).unwrap().scale(&a) + &p.bracket(&g, &h).unwrap().scale(&b);
        ensure!(lhs == rhs, "bilinearity fails on triple {t}");
        let leibniz = &(&f * &p.bracket(&g, &h).unwrap()) + &(&g * &p.bracket(&f, &h).unwrap());
        ensure!(p.bracket(&(&f * &g), &h).unwrap() == leibniz, "Leibniz fails on triple {t}");
    }
    for (name, p) in valid_structures() {
        let chart = p.chart().clone();
        for t in 0..25 {
            let (f, g, h) = (random_poly(&chart, &mut rng), random_poly(&chart, &mut rng), random_poly(&chart, &mut rng));
            let b = |x: &RationalFunction, y: &RationalFunction| p.bracket(x, y).unwrap();
            let cyc = &(&b(&f, &b(&g, &h)) + &b(&g, &b(&h, &f))) + &b(&h, &b(&f, &g));
            ensure!(cyc.is_zero(), "Jacobi fails on {name} triple {t}");
        }
    }
    ensure!(start.elapsed() < Duration::from_secs(30), "took {:?}", start.elapsed());
    Ok(())
}

fn catalog_algebras() -> Vec<(&'static str, LieAlgebra)> {
    ["so3", "su2", "sl2", "heisenberg3", "abelian(3)"].into_iter().map(|n| (n, algebra_catalog(n).unwrap())).collect()
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, g) in catalog_algebras() {
        let p = g.lie_poisson_structure();
        let chart = p.chart().clone();
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                let lhs = p.bracket(&g.evaluation_function(&g.unit(i)), &g.evaluation_function(&g.unit(j))).unwrap();
                let rhs = g.evaluation_function(&g.bracket(&g.unit(i), &g.unit(j)));
                ensure!(lhs == rhs, "{name}: {{F_e{i}, F_e{j}}} differs from F_[e{i},e{j}]");
            }
        }
        for t in 0..50 {
            let mut low = || loop {
                let f = random_poly(&chart, &mut rng);
                if f.numerator().total_degree() <= 2 {
                    return f;
                }
            };
            let (f, h) = (low(), low());
            ensure!(g.gradient_bracket(&f, &h).unwrap() == p.bracket(&f, &h).unwrap(), "{name}: pair {t} disagrees");
        }
    }
    Ok(())
}

fn criterion_4() -> Check {
    let so3 = algebra_catalog("so3").unwrap().lie_poisson_structure();
    let c = parse_expression("x1^2 + x2^2 + x3^2", so3.chart()).unwrap();
    ensure!(so3.casimir_check(&c).unwrap(), "x1²+x2²+x3² is not a Casimir of so(3)*");
    let heis = algebra_catalog("heisenberg3").unwrap().lie_poisson_structure();
    let x3 = parse_expression("x3", heis.chart()).unwrap();
    ensure!(heis.casimir_check(&x3).unwrap(), "x3 is not a Casimir of the Heisenberg dual");
    let can = PoissonStructure::canonical(1);
    let q = parse_expression("q1", can.chart()).unwrap();
    ensure!(!can.casimir_check(&q).unwrap(), "q passes on canonical R²");
    Ok(())
}

fn criterion_5() -> Check {
    let rep = sphere_fixture().report().map_err(|e| e.to_string())?;
    let uv = Chart::new(&["u", "v"]).unwrap();
    // round area form pulled back by inverse stereographic projection, derived by hand
    let north = parse_expression("-4/(1 + u^2 + v^2)^2", &uv).unwrap();
    let south = parse_expression("4/(1 + u^2 + v^2)^2", &uv).unwrap();
    ensure!(rep.north_coefficient == north, "north coefficient {}", rep.north_coefficient);
    ensure!(rep.south_coefficient == south, "south coefficient {}", rep.south_coefficient);
    ensure!(rep.north_closed && rep.south_closed, "pullbacks not closed");
    ensure!(rep.nonvanishing, "pullback vanishes somewhere");
    ensure!(rep.chart_compatible, "charts disagree on the overlap");
    ensure!(rep.quoted_coefficient == parse_expression("-4/(1 + u^2 + v^2)", &uv).unwrap(), "quoted coefficient altered");
    ensure!(rep.quoted_mismatch, "discrepancy with the quoted coefficient not flagged");
    Ok(())
}

fn criterion_6() -> Check {
    let names = ["angular-momentum", "s1-on-c(1)", "s1-on-c(2)", "s1-on-c(3)", "s1-on-s2", "sun-cotangent(2)"];
    for name in names {
        let f = chart_fixture(name).map_err(|e| e.to_string())?;
        ensure!(f.map.is_poisson_morphism().unwrap(), "{name}: Poisson morphism residual nonzero");
        let cons = f.map.generator_consistency(&f.generators).unwrap();
        ensure!(cons.iter().all(|v| v.is_zero()), "{name}: generator consistency residual nonzero");
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rep = equivariance_sample_check(&f.map, &f.action, 200, &mut rng, 1e-10).unwrap();
        ensure!(rep.passes, "{name}: equivariance drift {:e}", rep.max_discrepancy);
        if name == "angular-momentum" || name == "sun-cotangent(2)" {
            ensure!(matches!(f.action, GroupAction::Rotation { .. }), "{name}: not a rotation action");
        }
    }
    Ok(())
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let rep = hopf_demo(0.5, 50, 7).map_err(|e| e.to_string())?;
    ensure!(rep.max_welldef_residual < 1e-9, "well-definedness residual {:e}", rep.max_welldef_residual);
    ensure!(rep.reduced_dimension == 2, "quotient dimension {}", rep.reduced_dimension);
    let f = CircleOnCn::new(2, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points: Vec<_> = (0..50).map(|_| f.sample_point(&mut rng)).collect();
    let perp = orbit_perp_check(&f, &points).unwrap();
    ensure!(perp < 1e-10, "orbit-perpendicularity residual {perp:e}");
    ensure!(f.quotient_dim() == 2, "declared quotient dimension {}", f.quotient_dim());
    let a1 = hopf_area_estimate(0.5, 2000, 7).unwrap();
    let a2 = hopf_area_estimate(1.0, 2000, 7).unwrap();
    ensure!((a2 / a1 - 2.0).abs() <= 0.04, "area ratio {}", a2 / a1);
    ensure!(start.elapsed() < Duration::from_secs(5), "took {:?}", start.elapsed());
    Ok(())
}

fn criterion_8() -> Check {
    let osc = builtin_system("harmonic(1)").unwrap();
    let drift = |dt: f64| {
        let t = integrate(&osc, &[1.0, 0.0], dt, 10.0, Method::Rk4).unwrap();
        conservation_report(&osc, &t).unwrap().get("H").unwrap().max_abs_drift
    };
    let ratio = drift(0.1) / drift(0.05);
    ensure!((8.0..=32.0).contains(&ratio), "rk4 drift ratio {ratio}");
    let rb = builtin_system("rigid-body(1,2,3)").unwrap();
    let t = integrate(&rb, &[1.0, 0.1, 0.0], 1e-3, 10.0, Method::Rk4).unwrap();
    let rep = conservation_report(&rb, &t).unwrap();
    ensure!(rep.get("C").unwrap().relative_drift < 1e-8, "Casimir drift {:e}", rep.get("C").unwrap().relative_drift);
    ensure!(rep.get("H").unwrap().relative_drift < 1e-8, "energy drift {:e}", rep.get("H").unwrap().relative_drift);
    let cf = builtin_system("central-force(1)").unwrap();
    let t = integrate(&cf, &[1.0, 0.2, -0.3, 0.1, 0.8, 0.4], 1e-3, 10.0, Method::Rk4).unwrap();
    let rep = conservation_report(&cf, &t).unwrap();
    for l in ["L1", "L2", "L3"] {
        let d = rep.get(l).unwrap().max_abs_drift;
        ensure!(d < 1e-9, "{l} drift {d:e}");
    }
    Ok(())
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, g) in catalog_algebras() {
        ensure!(schouten_square(&RMatrix::zero(g.clone())).is_zero(), "{name}: schouten_square(0) ≠ 0");
        for t in 0..50 {
            let rm = RMatrix::random(g.clone(), &mut rng, 5);
            let (cb, cocycle) = cobracket_and_cocycle(&rm);
            ensure!(cocycle.passes, "{name}: cocycle residual nonzero for r #{t}");
            if is_ad_invariant(&g, &schouten_square(&rm)).unwrap() {
                let dual = dual_structure_constants(&cb);
                ensure!(structure_jacobi_check(&dual).unwrap().passes, "{name}: dual Jacobi fails for r #{t}");
            }
        }
    }
    let so3 = algebra_catalog("so3").unwrap();
    let d = manin_double(&so3, &StructureConstants::zero(3)).map_err(|e| e.to_string())?;
    ensure!(d.check().passes(), "so(3) zero-δ double: {:?}", d.check());
    let ef = RMatrix::from_entries(algebra_catalog("sl2").unwrap(), [(1, 2, Rational::from_integer(1.into()))]).unwrap();
    let (cb, _) = cobracket_and_cocycle(&ef);
    let d = manin_double(ef.algebra(), &dual_structure_constants(&cb)).map_err(|e| e.to_string())?;
    ensure!(d.check().passes(), "sl(2) e∧f double: {:?}", d.check());
    let rm = RMatrix::random(so3, &mut ChaCha8Rng::seed_from_u64(3), 5);
    let rep = multiplicativity_sample_check(CoadjointGroup::So3Exp, &rm, 100, 3, 1e-9).unwrap();
    ensure!(rep.passes, "multiplicativity residual {:e}", rep.max_residual);
    let fd = cobracket_finite_difference(CoadjointGroup::So3Exp, &rm, 1e-5, 1e-6).unwrap();
    ensure!(fd.passes, "finite-difference δ error {:e}", fd.max_error);
    Ok(())
}

fn criterion_10() -> Check {
    let fx = fixtures();
    let f = |name: &str| fx.join(name).to_string_lossy().into_owned();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["check".into(), "jacobi".into(), "--structure".into(), f("so3.json")], 0),
        (vec!["check".into(), "jacobi".into(), "--structure".into(), f("broken.json")], 1),
        (vec!["check".into(), "jacobi".into(), "--structure".into(), f("malformed.json")], 2),
        (vec!["check".into(), "jacobi".into(), "--structure".into(), f("schema_violation.json")], 2),
        (vec!["check".into(), "closed".into(), "--form".into(), f("area_form.json")], 0),
        (vec!["check".into(), "closed".into(), "--form".into(), f("not_closed.json")], 1),
        (vec!["casimir".into(), "--structure".into(), f("so3.json"), "--f".into(), "x1^2+x2^2+x3^2".into()], 0),
        (vec!["casimir".into(), "--structure".into(), f("canonical2.json"), "--f".into(), "q".into()], 1),
        (vec!["lie-poisson".into(), "so3".into()], 0),
        (vec!["lie-poisson".into(), f("jacobi_fail_algebra.json")], 1),
        (vec!["lie-poisson".into(), "no-such-algebra".into()], 2),
        (vec!["moment".into(), "check".into(), "angular-momentum".into()], 0),
        (vec!["moment".into(), "check".into(), f("bad_moment.json")], 1),
        (vec!["cybe".into(), "--r".into(), f("sl2_ef.json")], 0),
        (vec!["cybe".into(), "--r".into(), f("solvable_r.json")], 1),
        (vec!["manin".into(), "--r".into(), f("sl2_ef.json")], 0),
        (vec!["reduce".into(), "hopf".into(), "--level".into(), "0.5".into(), "--samples".into(), "50".into(), "--seed".into(), "7".into()], 0),
        (vec!["reduce".into(), "hopf".into(), "--level".into(), "-1".into()], 2),
        (vec!["killing".into(), "sl2".into()], 0),
        (
            "flow --system rigid-body --inertia 1,2,3 --x0 1,0.1,0 --dt 0.001 --t-end 10 --method rk4"
                .split(' ')
                .map(String::from)
                .collect(),
            0,
        ),
        ("flow --system harmonic --x0 1,0 --dt 0.5 --t-end 100 --tol 1e-12".split(' ').map(String::from).collect(), 1),
        (vec!["no-such-command".into()], 2),
    ];
    ensure!(cases.len() >= 12, "fixture matrix too small");
    let bin = env!("CARGO_BIN_EXE_poisson");
    for (args, want) in &cases {
        let run = || Command::new(bin).args(args).output().expect("binary runs");
        let (a, b) = (run(), run());
        let code = a.status.code().unwrap_or(-1);
        ensure!(code == *want, "`{}` exited {code}, expected {want}", args.join(" "));
        ensure!(a.stdout == b.stdout, "`{}` output differs between runs", args.join(" "));
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| format!("`{}`: {e}", args.join(" ")))?;
        let status = ["pass", "fail", "error"][*want as usize];
        ensure!(v["status"] == status, "`{}` reported {}", args.join(" "), v["status"]);
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 Jacobi suite", criterion_1),
        ("2 bracket axioms", criterion_2),
        ("3 Lie-Poisson coherence", criterion_3),
        ("4 Casimirs", criterion_4),
        ("5 S2 example", criterion_5),
        ("6 momentum catalog", criterion_6),
        ("7 Hopf reduction", criterion_7),
        ("8 flows", criterion_8),
        ("9 Poisson-Lie suite", criterion_9),
        ("10 CLI contract", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {name}: PASS ({secs:.2}s)"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({secs:.2}s): {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
