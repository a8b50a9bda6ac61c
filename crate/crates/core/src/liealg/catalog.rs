use crate::error::{Error, Result};
use crate::exactalg::{rational, Rational};

use super::{LieAlgebra, StructureConstants};

pub const CATALOG_NAMES: &[&str] = &["so3", "su2", "sl2", "heisenberg3", "abelian(n)"];

/// Catalog algebra with its matrix-trace normalization.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieAlgebra,
    /// `λ` with `κ(X,Y) = λ·tr(XY)` in the built-in matrix realization, when that form is nonzero.
    pub trace_form_factor: Option<Rational>,
    pub realization: &'static str,
}

fn levi_civita() -> Vec<(usize, usize, usize, Rational)> {
    vec![(0, 1, 2, rational(1, 1)), (1, 2, 0, rational(1, 1)), (2, 0, 1, rational(1, 1))]
}

pub fn catalog_entry(name: &str) -> Result<CatalogEntry> {
    let unknown = || Error::UnknownCatalog(name.to_string());
    let (algebra, factor, realization) = match name {
        "so3" => (
            LieAlgebra::from_brackets(&["X1", "X2", "X3"], levi_civita())?,
            Some(rational(1, 1)),
            "real antisymmetric 3x3 matrices, X_a v = e_a × v",
        ),
        "su2" => (
            LieAlgebra::from_brackets(&["E1", "E2", "E3"], levi_civita())?,
            Some(rational(4, 1)),
            "anti-Hermitian traceless 2x2 matrices, E_a = -i·σ_a/2",
        ),
        "sl2" => (
            LieAlgebra::from_brackets(
                &["h", "e", "f"],
                [(0, 1, 1, rational(2, 1)), (0, 2, 2, rational(-2, 1)), (1, 2, 0, rational(1, 1))],
            )?,
            Some(rational(4, 1)),
            "real traceless 2x2 matrices, h = diag(1,-1), e = E12, f = E21",
        ),
        "heisenberg3" => (
            LieAlgebra::from_brackets(&["e1", "e2", "e3"], [(0, 1, 2, rational(1, 1))])?,
            None,
            "strictly upper-triangular 3x3 matrices, e1 = E12, e2 = E23, e3 = E13",
        ),
        _ => {
            let n = name
                .strip_prefix("abelian(")
                .and_then(|s| s.strip_suffix(')'))
                .or_else(|| name.strip_prefix("abelian"))
                .ok_or_else(unknown)?;
            let n: usize = n.parse().map_err(|_| unknown())?;
            if n == 0 {
                return Err(unknown());
            }
            (LieAlgebra::new(&(1..=n).map(|i| format!("e{i}")).collect::<Vec<_>>(), StructureConstants::zero(n))?, None, "none")
        }
    };
    Ok(CatalogEntry { name: name.to_string(), algebra, trace_form_factor: factor, realization })
}

/// Looks up `so3`, `su2`, `sl2`, `heisenberg3` or `abelian(n)`.
pub fn algebra_catalog(name: &str) -> Result<LieAlgebra> {
    Ok(catalog_entry(name)?.algebra)
}
