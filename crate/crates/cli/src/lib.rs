//! Batch front end: every invocation prints one JSON report
//! `{command, status, details}` and exits 0 (pass), 1 (fail) or 2 (input error).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Number, Value};

use poisson_core::exactalg::parse_expression;
use poisson_core::flows::{builtin_system, conservation_report, integrate, DynamicalSystem, Method};
use poisson_core::formats::{
    algebra_from_ref, decode, lie_algebra_from_doc, lie_algebra_to_doc, momentum_from_doc, poisson_from_doc,
    poisson_to_doc, rmatrix_on, structure_constants_from_doc, two_form_from_doc, LieAlgebraDoc,
    RMatrixDoc,
};
use poisson_core::liealg::{algebra_catalog, structure_jacobi_check, LieAlgebra};
use poisson_core::moment::{equivariance_seeded, example_catalog, MomentumExample};
use poisson_core::plie::{
    cobracket_and_cocycle, dual_structure_constants, is_ad_invariant, manin_double, schouten_square, RMatrix,
};
use poisson_core::reduction::hopf_demo;
use poisson_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub details: Value,
}

impl Report {
    /// Pretty JSON with sorted keys and 17-significant-digit floats.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&fix_floats(v)).expect("value serializes");
        s.push('\n');
        s
    }
}

#[derive(Parser, Debug)]
#[command(name = "poisson", version, about = "Exact checks for Poisson, symplectic and Lie-theoretic structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Identity checks on structure documents.
    #[command(subcommand)]
    Check(CheckCommand),
    /// `{f, g}` for a structure document.
    Bracket {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Whether `f` Poisson-commutes with every coordinate.
    Casimir {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Lie–Poisson structure of a catalog algebra or algebra document.
    LiePoisson { algebra: String },
    #[command(subcommand)]
    Moment(MomentCommand),
    /// Integrate a Hamiltonian system and report drift of its candidate invariants.
    Flow(FlowArgs),
    /// Schouten square, ad-invariance, cocycle and dual Jacobi for an r-matrix.
    Cybe {
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long)]
        r: PathBuf,
    },
    /// Manin double of the bialgebra given by an r-matrix.
    Manin {
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long)]
        r: PathBuf,
    },
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Killing form of a catalog algebra or algebra document.
    Killing { algebra: String },
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Jacobi identity of a bivector document.
    Jacobi {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Closedness and nondegeneracy of a two-form document.
    Closed {
        #[arg(long)]
        form: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum MomentCommand {
    /// Morphism, generator and equivariance checks for a catalog example or document.
    Check {
        example: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ReduceCommand {
    /// Reduction of `C²` by the circle at `|z|² = 2c`.
    Hopf {
        #[arg(long, allow_hyphen_values = true)]
        level: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
struct FlowArgs {
    /// `harmonic`, `central-force`, `central-force-quartic`, `rigid-body`, or a full name like `rigid-body(1,2,3)`.
    #[arg(long)]
    system: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    inertia: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Structure document for a custom system; needs `--hamiltonian`.
    #[arg(long)]
    structure: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    hamiltonian: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    x0: Vec<f64>,
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    t_end: f64,
    #[arg(long, default_value = "rk4")]
    method: String,
    /// Largest accepted relative drift of every candidate invariant.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Input problems map to exit 2; everything else raised by a check is a mathematical failure.
fn is_input_error(e: &Error) -> bool {
    !matches!(
        e,
        Error::JacobiViolated | Error::Pole | Error::NonFinite(_) | Error::NoConvergence(_) | Error::ProjectionMismatch(_)
    )
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float parses"))
    } else {
        Value::String(x.to_string())
    }
}

/// Rewrites every non-integer number as `{:.16e}`.
fn fix_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.as_i64().is_none() && n.as_u64().is_none() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(fix_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, fix_floats(v))).collect()),
        other => other,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

fn key(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn algebra_arg(s: &str) -> Result<LieAlgebra> {
    let path = Path::new(s);
    if path.is_file() {
        let doc: LieAlgebraDoc = decode(read_json(path)?)?;
        lie_algebra_from_doc(&doc)
    } else {
        algebra_catalog(s)
    }
}

fn rmatrix_arg(algebra: Option<&str>, path: &Path) -> Result<RMatrix> {
    let doc: RMatrixDoc = decode(read_json(path)?)?;
    let g = match algebra {
        Some(a) => algebra_arg(a)?,
        None => algebra_from_ref(&doc.algebra)?,
    };
    rmatrix_on(g, &doc.r_upper)
}

type Outcome = Result<(Status, Value)>;

fn check_jacobi(structure: &Path) -> Outcome {
    let p = poisson_from_doc(&decode(read_json(structure)?)?)?;
    let rep = p.jacobi_residual();
    let failures: Map<String, Value> =
        rep.failures().map(|((i, j, k), r)| (key(&[*i, *j, *k]), Value::String(r.to_string()))).collect();
    let details = json!({
        "coordinates": p.chart().names(),
        "triples_checked": rep.residuals.len(),
        "nonzero_residuals": failures,
    });
    Ok((Status::from_bool(rep.is_poisson), details))
}

fn check_closed(form: &Path) -> Outcome {
    let w = two_form_from_doc(&decode(read_json(form)?)?)?;
    let rep = w.checks();
    let nonzero: Map<String, Value> = rep
        .closedness
        .iter()
        .filter(|(_, r)| !r.is_zero())
        .map(|((i, j, k), r)| (key(&[*i, *j, *k]), Value::String(r.to_string())))
        .collect();
    let details = json!({
        "coordinates": w.chart().names(),
        "closed": rep.closed,
        "nonzero_d_omega": nonzero,
        "determinant": rep.determinant.to_string(),
        "nondegenerate": rep.nondegenerate,
    });
    Ok((Status::from_bool(rep.closed), details))
}

fn bracket(structure: &Path, f: &str, g: &str) -> Outcome {
    let p = poisson_from_doc(&decode(read_json(structure)?)?)?;
    let ff = parse_expression(f, p.chart())?;
    let gg = parse_expression(g, p.chart())?;
    let b = p.bracket(&ff, &gg)?;
    Ok((Status::Pass, json!({"f": ff.to_string(), "g": gg.to_string(), "bracket": b.to_string()})))
}

fn casimir(structure: &Path, f: &str) -> Outcome {
    let p = poisson_from_doc(&decode(read_json(structure)?)?)?;
    let ff = parse_expression(f, p.chart())?;
    let x = p.hamiltonian_vector_field(&ff)?;
    let comps: Vec<String> = x.components().iter().map(ToString::to_string).collect();
    let ok = p.casimir_check(&ff)?;
    Ok((Status::from_bool(ok), json!({"f": ff.to_string(), "is_casimir": ok, "hamiltonian_vector_field": comps})))
}

fn lie_poisson(target: &str) -> Outcome {
    let path = Path::new(target);
    let g = if path.is_file() {
        let doc: LieAlgebraDoc = decode(read_json(path)?)?;
        let (basis, c) = structure_constants_from_doc(&doc)?;
        let rep = structure_jacobi_check(&c)?;
        if !rep.passes {
            let res: Map<String, Value> =
                rep.residuals.iter().map(|((i, j, k, l), v)| (key(&[*i, *j, *k, *l]), Value::String(v.to_string()))).collect();
            return Ok((Status::Fail, json!({"basis": basis, "structure_jacobi": false, "jacobi_residuals": res})));
        }
        LieAlgebra::new(&basis, c)?
    } else {
        algebra_catalog(target)?
    };
    let p = g.lie_poisson_structure();
    let rep = p.jacobi_residual();
    let details = json!({
        "basis": g.basis(),
        "structure_jacobi": true,
        "structure": poisson_to_doc(&p),
        "bivector_jacobi": rep.is_poisson,
    });
    Ok((Status::from_bool(rep.is_poisson), details))
}

fn nonzero_fields(fields: &[poisson_core::poisson::VectorField]) -> usize {
    fields.iter().filter(|f| !f.is_zero()).count()
}

fn morphism_details(mu: &poisson_core::moment::MomentumMap) -> Result<(bool, Value)> {
    let res = mu.poisson_morphism_residual()?;
    let mut nonzero = Map::new();
    for (i, row) in res.iter().enumerate() {
        for (j, r) in row.iter().enumerate().skip(i + 1) {
            if !r.is_zero() {
                nonzero.insert(key(&[i, j]), Value::String(r.to_string()));
            }
        }
    }
    let gens = mu.induced_generators()?;
    let invariant = mu.generator_invariance(&gens)?;
    let ok = nonzero.is_empty();
    Ok((ok && invariant, json!({"morphism_residuals": nonzero, "generators_preserve_structure": invariant})))
}

fn moment_check(example: &str, samples: usize, seed: u64, tol: f64) -> Outcome {
    let path = Path::new(example);
    if path.is_file() {
        let mu = momentum_from_doc(&decode(read_json(path)?)?)?;
        let (ok, details) = morphism_details(&mu)?;
        return Ok((Status::from_bool(ok), details));
    }
    match example_catalog(example)? {
        MomentumExample::Chart(f) => {
            let (ok, mut details) = morphism_details(&f.map)?;
            let consistency = nonzero_fields(&f.map.generator_consistency(&f.generators)?);
            let eq = equivariance_seeded(&f.map, &f.action, samples, seed, tol)?;
            let obj = details.as_object_mut().expect("object");
            obj.insert("example".into(), json!(f.name));
            obj.insert("generator_consistency_nonzero".into(), json!(consistency));
            obj.insert(
                "equivariance".into(),
                json!({"group": eq.group, "samples": eq.samples, "max_discrepancy": num(eq.max_discrepancy), "tol": num(tol)}),
            );
            obj.insert("notes".into(), json!(f.notes));
            Ok((Status::from_bool(ok && consistency == 0 && eq.passes), details))
        }
        MomentumExample::Formula(formula) => {
            let worst = formula.equivariance_seeded(samples, seed);
            let details = json!({
                "example": example,
                "equivariance": {"samples": samples, "max_discrepancy": num(worst), "tol": num(tol)},
            });
            Ok((Status::from_bool(worst <= tol), details))
        }
        MomentumExample::Documentation(note) => Ok((Status::Pass, json!({"example": example, "documentation": note}))),
    }
}

fn flow_system(a: &FlowArgs) -> Result<DynamicalSystem> {
    if let Some(path) = &a.structure {
        let p = poisson_from_doc(&decode(read_json(path)?)?)?;
        let h_text = a.hamiltonian.as_deref().ok_or_else(|| Error::InvalidArgument("--structure needs --hamiltonian".into()))?;
        let h = parse_expression(h_text, p.chart())?;
        return DynamicalSystem::new("custom", p, h.clone(), vec![("H".into(), h)]);
    }
    let sys = a.system.as_deref().ok_or_else(|| Error::InvalidArgument("--system or --structure is required".into()))?;
    let name = if sys.contains('(') {
        sys.to_string()
    } else {
        let arg = match sys {
            "rigid-body" => a.inertia.clone(),
            "central-force" | "central-force-quartic" => a.k.clone(),
            "harmonic" => a.n.map(|n| n.to_string()),
            _ => None,
        };
        match arg {
            Some(arg) => format!("{sys}({arg})"),
            None => sys.to_string(),
        }
    };
    builtin_system(&name)
}

fn flow(a: &FlowArgs) -> Outcome {
    let sys = flow_system(a)?;
    let method = Method::from_str(&a.method)?;
    let params = json!({
        "system": sys.name,
        "method": method.tag(),
        "dt": num(a.dt),
        "t_end": num(a.t_end),
        "x0": a.x0.iter().map(|v| num(*v)).collect::<Vec<_>>(),
        "tol": num(a.tol),
    });
    let traj = match integrate(&sys, &a.x0, a.dt, a.t_end, method) {
        Ok(t) => t,
        Err(e) if !is_input_error(&e) => {
            let mut d = params;
            d["integration_error"] = json!(e.to_string());
            return Ok((Status::Fail, d));
        }
        Err(e) => return Err(e),
    };
    if let Some(path) = &a.csv {
        write_atomic(path, &traj.to_csv(sys.chart()))?;
    }
    let rep = conservation_report(&sys, &traj)?;
    let mut drift = Map::new();
    let mut ok = true;
    for q in &rep.quantities {
        ok &= q.relative_drift <= a.tol;
        drift.insert(
            q.name.clone(),
            json!({"initial": num(q.initial), "max_abs_drift": num(q.max_abs_drift), "relative_drift": num(q.relative_drift)}),
        );
    }
    let mut d = params;
    d["coordinates"] = json!(sys.chart().names());
    d["steps"] = json!(traj.states.len() - 1);
    d["dt_effective"] = num(traj.dt);
    d["final_state"] = json!(traj.last().iter().map(|v| num(*v)).collect::<Vec<_>>());
    d["drift"] = Value::Object(drift);
    Ok((Status::from_bool(ok), d))
}

fn rational_matrix(m: &poisson_core::liealg::QMatrix) -> Vec<Vec<String>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect()).collect()
}

fn cybe(algebra: Option<&str>, r: &Path) -> Outcome {
    let rm = rmatrix_arg(algebra, r)?;
    let g = rm.algebra();
    let t = schouten_square(&rm);
    let invariant = is_ad_invariant(g, &t)?;
    let (cb, cocycle) = cobracket_and_cocycle(&rm);
    let dual = dual_structure_constants(&cb);
    let dual_jacobi = structure_jacobi_check(&dual)?.passes;
    let square: Map<String, Value> =
        t.components().iter().map(|((a, b, c), v)| (key(&[*a, *b, *c]), Value::String(v.to_string()))).collect();
    let delta: Map<String, Value> =
        (0..g.dim()).map(|a| (g.basis()[a].clone(), json!(rational_matrix(cb.delta(a))))).collect();
    let details = json!({
        "basis": g.basis(),
        "schouten_square": square,
        "ad_invariant": invariant,
        "cocycle_residual_zero": cocycle.passes,
        "cobracket": delta,
        "dual_jacobi": dual_jacobi,
    });
    Ok((Status::from_bool(invariant && cocycle.passes && dual_jacobi), details))
}

fn manin(algebra: Option<&str>, r: &Path) -> Outcome {
    let rm = rmatrix_arg(algebra, r)?;
    let cb = poisson_core::plie::cobracket(&rm);
    let dual = dual_structure_constants(&cb);
    let d = match manin_double(rm.algebra(), &dual) {
        Ok(d) => d,
        Err(Error::JacobiViolated) => return Ok((Status::Fail, json!({"dual_jacobi": false}))),
        Err(e) => return Err(e),
    };
    let rep = d.check();
    let details = json!({
        "dual_jacobi": true,
        "dimension": d.algebra().dim(),
        "double": lie_algebra_to_doc(d.algebra()),
        "checks": rep,
    });
    Ok((Status::from_bool(rep.passes()), details))
}

fn reduce_hopf(level: f64, samples: usize, seed: u64, tol: f64) -> Outcome {
    let rep = match hopf_demo(level, samples, seed) {
        Ok(r) => r,
        Err(e @ Error::ProjectionMismatch(_)) => {
            return Ok((Status::Fail, json!({"level": num(level), "seed": seed, "tol": num(tol), "error": e.to_string()})))
        }
        Err(e) => return Err(e),
    };
    let ok = rep.max_welldef_residual <= tol && rep.max_pullback_residual <= tol && rep.reduced_dimension == 2;
    let details = json!({
        "level": num(level),
        "seed": seed,
        "tol": num(tol),
        "reduced_form": rep,
    });
    Ok((Status::from_bool(ok), details))
}

fn killing(target: &str) -> Outcome {
    let g = algebra_arg(target)?;
    let k = g.killing_form();
    Ok((Status::Pass, json!({"basis": g.basis(), "killing_form": rational_matrix(&k)})))
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Check(CheckCommand::Jacobi { .. }) => "check jacobi",
        Command::Check(CheckCommand::Closed { .. }) => "check closed",
        Command::Bracket { .. } => "bracket",
        Command::Casimir { .. } => "casimir",
        Command::LiePoisson { .. } => "lie-poisson",
        Command::Moment(_) => "moment check",
        Command::Flow(_) => "flow",
        Command::Cybe { .. } => "cybe",
        Command::Manin { .. } => "manin",
        Command::Reduce(_) => "reduce hopf",
        Command::Killing { .. } => "killing",
    }
    .to_string()
}

fn dispatch(c: &Command) -> Outcome {
    match c {
        Command::Check(CheckCommand::Jacobi { structure }) => check_jacobi(structure),
        Command::Check(CheckCommand::Closed { form }) => check_closed(form),
        Command::Bracket { structure, f, g } => bracket(structure, f, g),
        Command::Casimir { structure, f } => casimir(structure, f),
        Command::LiePoisson { algebra } => lie_poisson(algebra),
        Command::Moment(MomentCommand::Check { example, samples, seed, tol }) => moment_check(example, *samples, *seed, *tol),
        Command::Flow(a) => flow(a),
        Command::Cybe { algebra, r } => cybe(algebra.as_deref(), r),
        Command::Manin { algebra, r } => manin(algebra.as_deref(), r),
        Command::Reduce(ReduceCommand::Hopf { level, samples, seed, tol }) => reduce_hopf(*level, *samples, *seed, *tol),
        Command::Killing { algebra } => killing(algebra),
    }
}

fn error_report(command: String, message: String) -> Report {
    Report { command, status: Status::Error, details: json!({"message": message}) }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let command = args.get(1).map(|a| a.to_string_lossy().into_owned()).unwrap_or_default();
            return error_report(command, e.render().to_string().trim_end().to_string());
        }
    };
    let command = command_name(&cli.command);
    let report = match dispatch(&cli.command) {
        Ok((status, details)) => Report { command, status, details },
        Err(e) if is_input_error(&e) => error_report(command, e.to_string()),
        Err(e) => Report { command, status: Status::Fail, details: json!({"error": e.to_string()}) },
    };
    if let Command::Flow(FlowArgs { report: Some(path), .. }) = &cli.command {
        if let Err(e) = write_atomic(path, &report.to_json()) {
            return error_report(report.command, e.to_string());
        }
    }
    report
}

/// `--help` and `--version` bypass the report.
pub fn help_or_version<T: Into<std::ffi::OsString> + Clone>(args: &[T]) -> Option<String> {
    match Cli::try_parse_from(args.iter().cloned().map(Into::into).collect::<Vec<std::ffi::OsString>>()) {
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            Some(e.render().to_string())
        }
        _ => None,
    }
}
