//! Lie algebras given by structure constants `[e_i, e_j] = Σ_k C^k_{ij} e_k`.

mod catalog;
mod numeric;

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{is_identifier, Chart, Rational, RationalFunction};
use crate::poisson::PoissonStructure;

pub use catalog::{algebra_catalog, catalog_entry, CatalogEntry, CATALOG_NAMES};
pub(crate) use numeric::frobenius_coords;
pub use numeric::{coadjoint_action_numeric, coadjoint_exp, matrix_basis, rodrigues, CoadjointGroup};

/// Exact `n×n` matrix.
pub type QMatrix = DMatrix<Rational>;

/// Dense constant tensor `c[(i*n + j)*n + k] = C^k_{ij}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<Rational>,
}

impl StructureConstants {
    pub fn zero(dim: usize) -> Self {
        StructureConstants { dim, c: vec![Rational::zero(); dim * dim * dim] }
    }

    /// Raw tensor with no completion; `value(i,j,k)` is `C^k_{ij}`.
    pub fn from_fn(dim: usize, mut value: impl FnMut(usize, usize, usize) -> Rational) -> Self {
        let mut s = Self::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    s.c[(i * dim + j) * dim + k] = value(i, j, k);
                }
            }
        }
        s
    }

    /// Sets `C^k_{ij}` and `C^k_{ji}` together; conflicting repeats are rejected.
    pub fn from_brackets<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, Rational)>,
    {
        let mut s = Self::zero(dim);
        let mut seen = std::collections::BTreeSet::new();
        for (i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: i.max(j).max(k) + 1 });
            }
            if i == j {
                if !v.is_zero() {
                    return Err(Error::NotAntisymmetric(i, j));
                }
                continue;
            }
            let key = (i.min(j), i.max(j), k);
            let oriented = if i < j { v.clone() } else { -v.clone() };
            if !seen.insert(key) && s.get(key.0, key.1, k) != &oriented {
                return Err(Error::NotAntisymmetric(key.0, key.1));
            }
            s.set(key.0, key.1, k, oriented.clone());
            s.set(key.1, key.0, k, -oriented);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Rational) {
        let n = self.dim;
        self.c[(i * n + j) * n + k] = v;
    }

    pub fn check_antisymmetric(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    if !(self.get(i, j, k) + self.get(j, i, k)).is_zero() {
                        return Err(Error::NotAntisymmetric(i, j));
                    }
                }
            }
        }
        Ok(())
    }

    /// Nonzero `Σ_m (C^m_{ij}C^l_{mk} + C^m_{jk}C^l_{mi} + C^m_{ki}C^l_{mj})` for `i<j<k`, every `l`.
    pub fn jacobi_residuals(&self) -> Vec<((usize, usize, usize, usize), Rational)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in 0..n {
                        let mut acc = Rational::zero();
                        for m in 0..n {
                            acc += self.get(i, j, m) * self.get(m, k, l);
                            acc += self.get(j, k, m) * self.get(m, i, l);
                            acc += self.get(k, i, m) * self.get(m, j, l);
                        }
                        if !acc.is_zero() {
                            out.push(((i, j, k, l), acc));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Outcome of [`structure_jacobi_check`].
#[derive(Clone, Debug)]
pub struct StructureJacobiReport {
    pub passes: bool,
    /// Nonzero residuals keyed by `(i, j, k, l)`, 0-based, `i<j<k`.
    pub residuals: Vec<((usize, usize, usize, usize), Rational)>,
}

/// Jacobi identity for raw constants; non-antisymmetric input is rejected.
pub fn structure_jacobi_check(c: &StructureConstants) -> Result<StructureJacobiReport> {
    c.check_antisymmetric()?;
    let residuals = c.jacobi_residuals();
    Ok(StructureJacobiReport { passes: residuals.is_empty(), residuals })
}

/// Validated Lie algebra.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieAlgebra {
    basis: Vec<String>,
    constants: StructureConstants,
}

impl LieAlgebra {
    pub fn new<S: AsRef<str>>(basis: &[S], constants: StructureConstants) -> Result<Self> {
        let basis: Vec<String> = basis.iter().map(|s| s.as_ref().to_string()).collect();
        if basis.len() != constants.dim() {
            return Err(Error::DimensionMismatch { expected: constants.dim(), found: basis.len() });
        }
        if basis.is_empty() {
            return Err(Error::InvalidArgument("a Lie algebra needs a positive dimension".into()));
        }
        for (i, b) in basis.iter().enumerate() {
            if !is_identifier(b) || basis[..i].contains(b) {
                return Err(Error::InvalidArgument(format!("bad basis name `{b}`")));
            }
        }
        if !structure_jacobi_check(&constants)?.passes {
            return Err(Error::JacobiViolated);
        }
        Ok(LieAlgebra { basis, constants })
    }

    pub fn from_brackets<S, I>(basis: &[S], entries: I) -> Result<Self>
    where
        S: AsRef<str>,
        I: IntoIterator<Item = (usize, usize, usize, Rational)>,
    {
        Self::new(basis, StructureConstants::from_brackets(basis.len(), entries)?)
    }

    /// Abelian algebra `e1..en`.
    pub fn abelian(n: usize) -> Result<Self> {
        let basis: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
        Self::new(&basis, StructureConstants::zero(n))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    /// `C^k_{ij}`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Rational {
        self.constants.get(i, j, k)
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.c.iter().all(Zero::is_zero)
    }

    /// `[x, y]` in basis coordinates.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        out
    }

    pub fn unit(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::from_integer(1.into());
        v
    }

    /// `ad(x)_{kj} = Σ_i x^i C^k_{ij}`.
    pub fn ad(&self, x: &[Rational]) -> QMatrix {
        let n = self.dim();
        QMatrix::from_fn(n, n, |k, j| {
            let mut acc = Rational::zero();
            for (i, xi) in x.iter().enumerate() {
                if !xi.is_zero() {
                    acc += xi * self.c(i, j, k);
                }
            }
            acc
        })
    }

    /// `ad*(x) = -ad(x)ᵀ`, i.e. `(ad*(x)ξ)(y) = -ξ([x,y])`.
    pub fn ad_star(&self, x: &[Rational]) -> QMatrix {
        -self.ad(x).transpose()
    }

    pub fn rep_matrices(&self) -> RepMatrices {
        let (ad, ad_star) = (0..self.dim()).map(|i| (self.ad(&self.unit(i)), self.ad_star(&self.unit(i)))).unzip();
        RepMatrices { ad, ad_star }
    }

    /// `κ_{ab} = tr(ad(e_a) ad(e_b))`.
    pub fn killing_form(&self) -> QMatrix {
        let ads = self.rep_matrices().ad;
        let n = self.dim();
        QMatrix::from_fn(n, n, |a, b| (&ads[a] * &ads[b]).trace())
    }

    /// `⟨ξ, [x, y]⟩`.
    pub fn kks_eval(&self, xi: &[Rational], x: &[Rational], y: &[Rational]) -> Rational {
        self.bracket(x, y).iter().zip(xi).map(|(a, b)| a * b).sum()
    }

    /// Linear coordinates `x1..xn` on the dual.
    pub fn dual_chart(&self) -> Chart {
        Chart::numbered("x", self.dim())
    }

    /// `π^{ij} = Σ_k C^k_{ij} x_k` on the dual chart.
    pub fn lie_poisson_structure(&self) -> PoissonStructure {
        let chart = self.dual_chart();
        let n = self.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let coeffs: Vec<Rational> = (0..n).map(|k| self.c(i, j, k).clone()).collect();
                entries.push((i, j, linear_function(&chart, &coeffs)));
            }
        }
        PoissonStructure::from_entries(&chart, entries).expect("constants are antisymmetric")
    }

    /// Evaluation function `F_X(ξ) = ⟨ξ, X⟩ = Σ X^i x_i` on the dual chart.
    pub fn evaluation_function(&self, x: &[Rational]) -> RationalFunction {
        linear_function(&self.dual_chart(), x)
    }

    /// `⟨ξ, [∇F(ξ), ∇G(ξ)]⟩` with `∇F = Σ ∂_iF e_i`, as a function of `ξ`.
    pub fn gradient_bracket(&self, f: &RationalFunction, g: &RationalFunction) -> Result<RationalFunction> {
        let chart = self.dual_chart();
        chart.ensure_same(f.chart())?;
        chart.ensure_same(g.chart())?;
        let (df, dg) = (f.gradient(), g.gradient());
        let n = self.dim();
        let mut acc = RationalFunction::zero(&chart);
        for i in 0..n {
            for j in 0..n {
                if df[i].is_zero() || dg[j].is_zero() {
                    continue;
                }
                let coeffs: Vec<Rational> = (0..n).map(|k| self.c(i, j, k).clone()).collect();
                let lin = linear_function(&chart, &coeffs);
                if !lin.is_zero() {
                    acc = &acc + &(&(&df[i] * &dg[j]) * &lin);
                }
            }
        }
        Ok(acc)
    }
}

fn linear_function(chart: &Chart, coeffs: &[Rational]) -> RationalFunction {
    let mut acc = RationalFunction::zero(chart);
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            acc = &acc + &RationalFunction::var(chart, k).scale(c);
        }
    }
    acc
}

/// `ad(e_i)` and `ad*(e_i)` for every basis element.
#[derive(Clone, Debug)]
pub struct RepMatrices {
    pub ad: Vec<QMatrix>,
    pub ad_star: Vec<QMatrix>,
}

pub fn lie_poisson_structure(g: &LieAlgebra) -> PoissonStructure {
    g.lie_poisson_structure()
}

pub fn killing_form(g: &LieAlgebra) -> QMatrix {
    g.killing_form()
}

pub fn rep_matrices(g: &LieAlgebra) -> RepMatrices {
    g.rep_matrices()
}

pub fn kks_eval(xi: &[Rational], x: &[Rational], y: &[Rational], g: &LieAlgebra) -> Rational {
    g.kks_eval(xi, x, y)
}
