//! JSON documents for structures, forms, maps, algebras and r-matrices.
//!
//! Index keys such as `"1,2"` and constant slots are 1-based. Expression values are
//! strings in the expression grammar; plain integers are accepted as well.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactalg::{parse_expression, Chart, Rational, RationalFunction};
use crate::liealg::{algebra_catalog, LieAlgebra, StructureConstants};
use crate::moment::MomentumMap;
use crate::plie::RMatrix;
use crate::poisson::PoissonStructure;
use crate::symplectic::{RationalMap, TwoForm};

/// Expression literal: a string, or an integer for convenience.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Literal {
    Text(String),
    Int(i64),
}

impl Literal {
    fn text(&self) -> String {
        match self {
            Literal::Text(s) => s.clone(),
            Literal::Int(i) => i.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonDoc {
    pub coordinates: Vec<String>,
    #[serde(default)]
    pub bivector_upper: BTreeMap<String, Literal>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoFormDoc {
    pub coordinates: Vec<String>,
    #[serde(default)]
    pub form_upper: BTreeMap<String, Literal>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalMapDoc {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub components: Vec<Literal>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConstantDoc {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Literal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraDoc {
    pub dim: usize,
    #[serde(default)]
    pub basis: Option<Vec<String>>,
    #[serde(default)]
    pub constants: Vec<ConstantDoc>,
}

/// Catalog name or inline algebra document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Name(String),
    Doc(LieAlgebraDoc),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumDoc {
    pub source: PoissonDoc,
    pub target: AlgebraRef,
    pub components: Vec<Literal>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RMatrixDoc {
    pub algebra: AlgebraRef,
    #[serde(default)]
    pub r_upper: BTreeMap<String, Literal>,
}

fn doc_err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| doc_err(e.to_string()))
}

fn from_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| doc_err(e.to_string()))
}

/// `"i,j"` with 1-based indices up to `n`.
fn parse_pair(key: &str, n: usize) -> Result<(usize, usize)> {
    let bad = || doc_err(format!("bad index key `{key}`"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 || a > n || b > n {
        return Err(doc_err(format!("index key `{key}` out of range 1..{n}")));
    }
    Ok((a - 1, b - 1))
}

fn upper_entries(chart: &Chart, upper: &BTreeMap<String, Literal>) -> Result<Vec<(usize, usize, RationalFunction)>> {
    upper
        .iter()
        .map(|(key, v)| {
            let (i, j) = parse_pair(key, chart.len())?;
            Ok((i, j, parse_expression(&v.text(), chart)?))
        })
        .collect()
}

fn parse_rational(lit: &Literal) -> Result<Rational> {
    let f = parse_expression(&lit.text(), &Chart::new::<&str>(&[])?)?;
    f.constant_value().ok_or_else(|| doc_err(format!("`{}` is not a rational literal", lit.text())))
}

fn upper_map(n: usize, get: impl Fn(usize, usize) -> Option<String>) -> BTreeMap<String, Literal> {
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(s) = get(i, j) {
                out.insert(format!("{},{}", i + 1, j + 1), Literal::Text(s));
            }
        }
    }
    out
}

pub fn poisson_from_doc(doc: &PoissonDoc) -> Result<PoissonStructure> {
    let chart = Chart::new(&doc.coordinates)?;
    PoissonStructure::from_entries(&chart, upper_entries(&chart, &doc.bivector_upper)?)
}

pub fn poisson_from_json(s: &str) -> Result<PoissonStructure> {
    poisson_from_doc(&from_str(s)?)
}

pub fn poisson_to_doc(p: &PoissonStructure) -> PoissonDoc {
    let upper = upper_map(p.dim(), |i, j| {
        let e = p.entry(i, j);
        (!e.is_zero()).then(|| e.to_string())
    });
    PoissonDoc { coordinates: p.chart().names().to_vec(), bivector_upper: upper }
}

pub fn two_form_from_doc(doc: &TwoFormDoc) -> Result<TwoForm> {
    let chart = Chart::new(&doc.coordinates)?;
    TwoForm::from_entries(&chart, upper_entries(&chart, &doc.form_upper)?)
}

pub fn two_form_from_json(s: &str) -> Result<TwoForm> {
    two_form_from_doc(&from_str(s)?)
}

pub fn rational_map_from_doc(doc: &RationalMapDoc) -> Result<RationalMap> {
    let source = Chart::new(&doc.source)?;
    let target = Chart::new(&doc.target)?;
    let comps = doc.components.iter().map(|c| parse_expression(&c.text(), &source)).collect::<Result<Vec<_>>>()?;
    RationalMap::new(&source, &target, comps)
}

pub fn rational_map_from_json(s: &str) -> Result<RationalMap> {
    rational_map_from_doc(&from_str(s)?)
}

/// Raw constants and basis names, without the Jacobi check.
pub fn structure_constants_from_doc(doc: &LieAlgebraDoc) -> Result<(Vec<String>, StructureConstants)> {
    let n = doc.dim;
    if n == 0 {
        return Err(doc_err("dim must be positive"));
    }
    let basis = match &doc.basis {
        Some(b) if b.len() != n => return Err(Error::DimensionMismatch { expected: n, found: b.len() }),
        Some(b) => b.clone(),
        None => (1..=n).map(|i| format!("e{i}")).collect(),
    };
    let entries = doc
        .constants
        .iter()
        .map(|c| {
            if [c.i, c.j, c.k].iter().any(|&x| x == 0 || x > n) {
                return Err(doc_err(format!("constant slot ({},{},{}) out of range 1..{n}", c.i, c.j, c.k)));
            }
            Ok((c.i - 1, c.j - 1, c.k - 1, parse_rational(&c.value)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((basis, StructureConstants::from_brackets(n, entries)?))
}

pub fn lie_algebra_from_doc(doc: &LieAlgebraDoc) -> Result<LieAlgebra> {
    let (basis, c) = structure_constants_from_doc(doc)?;
    LieAlgebra::new(&basis, c)
}

pub fn lie_algebra_from_json(s: &str) -> Result<LieAlgebra> {
    lie_algebra_from_doc(&from_str(s)?)
}

pub fn lie_algebra_to_doc(g: &LieAlgebra) -> LieAlgebraDoc {
    let n = g.dim();
    let mut constants = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let v = g.c(i, j, k);
                if *v != Rational::from_integer(0.into()) {
                    constants.push(ConstantDoc { i: i + 1, j: j + 1, k: k + 1, value: Literal::Text(v.to_string()) });
                }
            }
        }
    }
    LieAlgebraDoc { dim: n, basis: Some(g.basis().to_vec()), constants }
}

pub fn algebra_from_ref(r: &AlgebraRef) -> Result<LieAlgebra> {
    match r {
        AlgebraRef::Name(name) => algebra_catalog(name),
        AlgebraRef::Doc(doc) => lie_algebra_from_doc(doc),
    }
}

pub fn momentum_from_doc(doc: &MomentumDoc) -> Result<MomentumMap> {
    let source = poisson_from_doc(&doc.source)?;
    let target = algebra_from_ref(&doc.target)?;
    let comps =
        doc.components.iter().map(|c| parse_expression(&c.text(), source.chart())).collect::<Result<Vec<_>>>()?;
    MomentumMap::new(source, target, comps)
}

pub fn momentum_from_json(s: &str) -> Result<MomentumMap> {
    momentum_from_doc(&from_str(s)?)
}

/// r-matrix on a given algebra; the document's own `algebra` field is ignored.
pub fn rmatrix_on(algebra: LieAlgebra, upper: &BTreeMap<String, Literal>) -> Result<RMatrix> {
    let n = algebra.dim();
    let entries = upper
        .iter()
        .map(|(key, v)| {
            let (a, b) = parse_pair(key, n)?;
            Ok((a, b, parse_rational(v)?))
        })
        .collect::<Result<Vec<_>>>()?;
    RMatrix::from_entries(algebra, entries)
}

pub fn rmatrix_from_doc(doc: &RMatrixDoc) -> Result<RMatrix> {
    rmatrix_on(algebra_from_ref(&doc.algebra)?, &doc.r_upper)
}

pub fn rmatrix_from_json(s: &str) -> Result<RMatrix> {
    rmatrix_from_doc(&from_str(s)?)
}

pub fn rmatrix_to_doc(r: &RMatrix) -> RMatrixDoc {
    let m = r.matrix();
    let upper = upper_map(m.nrows(), |a, b| {
        let v = &m[(a, b)];
        (*v != Rational::from_integer(0.into())).then(|| v.to_string())
    });
    RMatrixDoc { algebra: AlgebraRef::Doc(lie_algebra_to_doc(r.algebra())), r_upper: upper }
}

/// Parses any document type from an already-decoded value.
pub fn decode<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    from_value(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational;

    const SO3: &str = r#"{"coordinates": ["x1","x2","x3"], "bivector_upper": {"1,2": "x3", "2,3": "x1", "3,1": "x2"}}"#;

    #[test]
    fn poisson_cyclic_keys() {
        let p = poisson_from_json(SO3).unwrap();
        assert_eq!(p.entry(0, 2).to_string(), "-x2");
        assert!(p.jacobi_residual().is_poisson);
        let again = poisson_from_doc(&poisson_to_doc(&p)).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn schema_violations() {
        assert!(matches!(poisson_from_json("{"), Err(Error::Document(_))));
        assert!(matches!(poisson_from_json(r#"{"coordinates": ["x"], "extra": 1}"#), Err(Error::Document(_))));
        let bad_key = r#"{"coordinates": ["x","y"], "bivector_upper": {"1,3": "1"}}"#;
        assert!(matches!(poisson_from_json(bad_key), Err(Error::Document(_))));
        let conflict = r#"{"coordinates": ["x","y"], "bivector_upper": {"1,2": "1", "2,1": "1"}}"#;
        assert_eq!(poisson_from_json(conflict).unwrap_err(), Error::NotAntisymmetric(0, 1));
        let unknown = r#"{"coordinates": ["x","y"], "bivector_upper": {"1,2": "z"}}"#;
        assert!(matches!(poisson_from_json(unknown), Err(Error::UnknownIdentifier(_))));
    }

    #[test]
    fn lie_algebra_docs() {
        let s = r#"{"dim": 3, "basis": ["X1","X2","X3"], "constants": [
            {"i":1,"j":2,"k":3,"value":"1"}, {"i":2,"j":3,"k":1,"value":1}, {"i":3,"j":1,"k":2,"value":"1"}]}"#;
        let g = lie_algebra_from_json(s).unwrap();
        assert_eq!(g, algebra_catalog("so3").unwrap());
        assert_eq!(lie_algebra_from_doc(&lie_algebra_to_doc(&g)).unwrap(), g);
        let broken = r#"{"dim": 3, "constants": [{"i":1,"j":2,"k":3,"value":"1"}, {"i":2,"j":3,"k":2,"value":"1"}]}"#;
        assert_eq!(lie_algebra_from_json(broken).unwrap_err(), Error::JacobiViolated);
        assert!(lie_algebra_from_json(r#"{"dim": 2, "constants": [{"i":1,"j":2,"k":3,"value":"1"}]}"#).is_err());
    }

    #[test]
    fn rmatrix_docs() {
        let r = rmatrix_from_json(r#"{"algebra": "sl2", "r_upper": {"2,3": "1"}}"#).unwrap();
        assert_eq!(r.entry(2, 1), &rational(-1, 1));
        assert_eq!(rmatrix_from_doc(&rmatrix_to_doc(&r)).unwrap(), r);
        assert!(rmatrix_from_json(r#"{"algebra": "sl2", "r_upper": {"2,3": "x"}}"#).is_err());
    }

    #[test]
    fn momentum_and_maps() {
        let s = r#"{"source": {"coordinates": ["q1","p1"], "bivector_upper": {"1,2": "1"}},
                    "target": {"dim": 1}, "components": ["(q1^2 + p1^2)/2"]}"#;
        let mu = momentum_from_json(s).unwrap();
        assert!(mu.is_poisson_morphism().unwrap());
        let m = rational_map_from_json(r#"{"source": ["u"], "target": ["x","y"], "components": ["u", "u^2"]}"#).unwrap();
        assert_eq!(m.components().len(), 2);
        let w = two_form_from_json(r#"{"coordinates": ["q","p"], "form_upper": {"1,2": "1"}}"#).unwrap();
        assert!(w.checks().nondegenerate);
    }
}
