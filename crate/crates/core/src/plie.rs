//! Poisson–Lie layer: r-matrices, their Schouten square, co-brackets and Manin doubles.
//!
//! `r = Σ_{a<b} r^{ab} e_a∧e_b` with `e_a∧e_b = e_a⊗e_b − e_b⊗e_a`, so the full
//! tensor of `r` in `g⊗g` is the antisymmetric matrix `r^{ab}` itself.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{rational_to_f64, Rational};
use crate::liealg::{
    algebra_catalog, frobenius_coords, matrix_basis, structure_jacobi_check, CoadjointGroup, LieAlgebra, QMatrix,
    StructureConstants,
};

type CMatrix = DMatrix<Complex64>;

/// Classical r-matrix `r ∈ Λ²g`.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix {
    algebra: LieAlgebra,
    r: QMatrix,
}

impl RMatrix {
    pub fn new(algebra: LieAlgebra, r: QMatrix) -> Result<Self> {
        let n = algebra.dim();
        if r.nrows() != n || r.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.nrows().max(r.ncols()) });
        }
        for a in 0..n {
            for b in a..n {
                if !(&r[(a, b)] + &r[(b, a)]).is_zero() {
                    return Err(Error::NotAntisymmetric(a, b));
                }
            }
        }
        Ok(RMatrix { algebra, r })
    }

    /// From `(a, b, r^{ab})` entries; each unordered pair is completed antisymmetrically.
    pub fn from_entries<I>(algebra: LieAlgebra, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let n = algebra.dim();
        let mut r = QMatrix::from_element(n, n, Rational::zero());
        let mut seen = BTreeMap::new();
        for (a, b, v) in entries {
            if a >= n || b >= n {
                return Err(Error::DimensionMismatch { expected: n, found: a.max(b) + 1 });
            }
            if a == b {
                if !v.is_zero() {
                    return Err(Error::NotAntisymmetric(a, b));
                }
                continue;
            }
            let v = if a < b { v } else { -v };
            let (a, b) = (a.min(b), a.max(b));
            if let Some(old) = seen.insert((a, b), v.clone()) {
                if old != v {
                    return Err(Error::NotAntisymmetric(a, b));
                }
            }
            r[(b, a)] = -v.clone();
            r[(a, b)] = v;
        }
        Ok(RMatrix { algebra, r })
    }

    pub fn zero(algebra: LieAlgebra) -> Self {
        let n = algebra.dim();
        RMatrix { algebra, r: QMatrix::from_element(n, n, Rational::zero()) }
    }

    /// Entries `p/q` with `|p| ≤ height`, `1 ≤ q ≤ height`.
    pub fn random<R: Rng + ?Sized>(algebra: LieAlgebra, rng: &mut R, height: i64) -> Self {
        let n = algebra.dim();
        let h = height.max(1);
        let mut entries = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let p = rng.random_range(-h..=h);
                let q = rng.random_range(1..=h);
                entries.push((a, b, Rational::new(p.into(), q.into())));
            }
        }
        Self::from_entries(algebra, entries).expect("upper entries are consistent")
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.r
    }

    pub fn entry(&self, a: usize, b: usize) -> &Rational {
        &self.r[(a, b)]
    }

    fn f64_matrix(&self) -> DMatrix<f64> {
        self.r.map(|q| rational_to_f64(&q))
    }
}

/// Fully antisymmetric rank-3 tensor, nonzero components kept on `a<b<c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriVector {
    dim: usize,
    comps: BTreeMap<(usize, usize, usize), Rational>,
}

fn sort3(i: usize, j: usize, k: usize) -> Option<((usize, usize, usize), bool)> {
    if i == j || j == k || i == k {
        return None;
    }
    let mut v = [i, j, k];
    let mut odd = false;
    for p in 0..2 {
        for q in 0..2 - p {
            if v[q] > v[q + 1] {
                v.swap(q, q + 1);
                odd = !odd;
            }
        }
    }
    Some(((v[0], v[1], v[2]), odd))
}

const PERMS: [([usize; 3], bool); 6] = [
    ([0, 1, 2], false),
    ([1, 2, 0], false),
    ([2, 0, 1], false),
    ([1, 0, 2], true),
    ([0, 2, 1], true),
    ([2, 1, 0], true),
];

impl TriVector {
    pub fn zero(dim: usize) -> Self {
        TriVector { dim, comps: BTreeMap::new() }
    }

    /// From values on `a<b<c`.
    pub fn from_upper<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize, usize), Rational)>,
    {
        let mut t = Self::zero(dim);
        for ((a, b, c), v) in entries {
            if !(a < b && b < c) {
                return Err(Error::InvalidArgument(format!("trivector index ({a},{b},{c}) is not increasing")));
            }
            if c >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c + 1 });
            }
            if !v.is_zero() {
                t.comps.insert((a, b, c), v);
            }
        }
        Ok(t)
    }

    /// Antisymmetric projection `(1/6) Σ_σ sgn(σ) T^{σ(ijk)}` of a full tensor.
    pub fn project(dim: usize, full: impl Fn(usize, usize, usize) -> Rational) -> Self {
        let sixth = Rational::new(1.into(), 6.into());
        let mut t = Self::zero(dim);
        for a in 0..dim {
            for b in a + 1..dim {
                for c in b + 1..dim {
                    let idx = [a, b, c];
                    let mut acc = Rational::zero();
                    for (p, odd) in PERMS {
                        let v = full(idx[p[0]], idx[p[1]], idx[p[2]]);
                        if odd {
                            acc -= v;
                        } else {
                            acc += v;
                        }
                    }
                    acc *= &sixth;
                    if !acc.is_zero() {
                        t.comps.insert((a, b, c), acc);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Rational {
        match sort3(i, j, k) {
            None => Rational::zero(),
            Some((key, odd)) => {
                let v = self.comps.get(&key).cloned().unwrap_or_else(Rational::zero);
                if odd {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Nonzero components on `a<b<c`.
    pub fn components(&self) -> &BTreeMap<(usize, usize, usize), Rational> {
        &self.comps
    }
}

/// `F(i; j, k) = Σ_{s,t} C^i_{st} r^{sj} r^{tk}`.
fn f_term(rm: &RMatrix, i: usize, j: usize, k: usize) -> Rational {
    let n = rm.algebra.dim();
    let mut acc = Rational::zero();
    for s in 0..n {
        if rm.r[(s, j)].is_zero() {
            continue;
        }
        for t in 0..n {
            let c = rm.algebra.c(s, t, i);
            if c.is_zero() || rm.r[(t, k)].is_zero() {
                continue;
            }
            acc += c * &rm.r[(s, j)] * &rm.r[(t, k)];
        }
    }
    acc
}

/// `⟦r,r⟧ = [r₁₂,r₁₃] + [r₁₂,r₂₃] + [r₁₃,r₂₃]`, via its cyclic component formula.
pub fn schouten_square(rm: &RMatrix) -> TriVector {
    let n = rm.algebra.dim();
    let mut t = TriVector::zero(n);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let v = f_term(rm, a, b, c) + f_term(rm, b, c, a) + f_term(rm, c, a, b);
                if !v.is_zero() {
                    t.comps.insert((a, b, c), v);
                }
            }
        }
    }
    t
}

/// The three embedded brackets expanded in `g⊗g⊗g`; entry `[(i*n + j)*n + k]`.
pub fn schouten_expansion(rm: &RMatrix) -> Vec<Rational> {
    let n = rm.algebra.dim();
    let c = |i, j, k| rm.algebra.c(i, j, k);
    let r = &rm.r;
    let mut out = vec![Rational::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = Rational::zero();
                for x in 0..n {
                    for y in 0..n {
                        // [r12, r13]: Σ r^{xj} r^{yk} [e_x, e_y] ⊗ e_j ⊗ e_k
                        acc += c(x, y, i) * &r[(x, j)] * &r[(y, k)];
                        // [r12, r23]: Σ r^{ix} r^{yk} e_i ⊗ [e_x, e_y] ⊗ e_k
                        acc += &r[(i, x)] * c(x, y, j) * &r[(y, k)];
                        // [r13, r23]: Σ r^{ix} r^{jy} e_i ⊗ e_j ⊗ [e_x, e_y]
                        acc += &r[(i, x)] * &r[(j, y)] * c(x, y, k);
                    }
                }
                out[(i * n + j) * n + k] = acc;
            }
        }
    }
    out
}

/// `(ad_x⊗1⊗1 + 1⊗ad_x⊗1 + 1⊗1⊗ad_x) T` for each basis element `x = e_p`.
pub fn ad_invariance_residual(g: &LieAlgebra, t: &TriVector) -> Result<Vec<TriVector>> {
    let n = g.dim();
    if t.dim != n {
        return Err(Error::DimensionMismatch { expected: n, found: t.dim });
    }
    Ok((0..n)
        .map(|p| {
            TriVector::project(n, |i, j, k| {
                let mut acc = Rational::zero();
                for m in 0..n {
                    acc += g.c(p, m, i) * t.get(m, j, k);
                    acc += g.c(p, m, j) * t.get(i, m, k);
                    acc += g.c(p, m, k) * t.get(i, j, m);
                }
                acc
            })
        })
        .collect())
}

pub fn is_ad_invariant(g: &LieAlgebra, t: &TriVector) -> Result<bool> {
    Ok(ad_invariance_residual(g, t)?.iter().all(TriVector::is_zero))
}

/// Modified classical Yang–Baxter condition: `⟦r,r⟧` is ad-invariant.
pub fn satisfies_mcybe(rm: &RMatrix) -> bool {
    is_ad_invariant(&rm.algebra, &schouten_square(rm)).expect("same algebra")
}

/// `δ: g → Λ²g`, stored as `δ(e_a)` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct CoBracket {
    algebra: LieAlgebra,
    delta: Vec<QMatrix>,
}

impl CoBracket {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn delta(&self, a: usize) -> &QMatrix {
        &self.delta[a]
    }

    pub fn is_zero(&self) -> bool {
        self.delta.iter().all(|m| m.iter().all(Zero::is_zero))
    }

    /// `δ(x)` for a general element.
    pub fn apply(&self, x: &[Rational]) -> QMatrix {
        let n = self.algebra.dim();
        let mut out = QMatrix::from_element(n, n, Rational::zero());
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (o, d) in out.iter_mut().zip(self.delta[a].iter()) {
                *o += xa * d;
            }
        }
        out
    }
}

/// `ad_x` acting on `Λ²g` by the Leibniz rule: `A M + M Aᵀ`.
fn ad_on_bivector(g: &LieAlgebra, x: &[Rational], m: &QMatrix) -> QMatrix {
    let n = g.dim();
    let a = g.ad(x);
    QMatrix::from_fn(n, n, |b, c| {
        let mut acc = Rational::zero();
        for s in 0..n {
            acc += &a[(b, s)] * &m[(s, c)] + &m[(b, s)] * &a[(c, s)];
        }
        acc
    })
}

/// `δ(e_a)^{bc} = Σ_s (C^b_{as} r^{sc} + C^c_{as} r^{bs})`.
pub fn cobracket(rm: &RMatrix) -> CoBracket {
    let g = &rm.algebra;
    let delta = (0..g.dim()).map(|a| ad_on_bivector(g, &g.unit(a), &rm.r)).collect();
    CoBracket { algebra: g.clone(), delta }
}

/// Nonzero `δ([e_a,e_b]) − (ad_{e_a}·δ(e_b) − ad_{e_b}·δ(e_a))` for `a<b`.
#[derive(Clone, Debug)]
pub struct CocycleReport {
    pub passes: bool,
    pub residuals: Vec<((usize, usize), QMatrix)>,
}

pub fn cocycle_residual(cb: &CoBracket) -> CocycleReport {
    let g = &cb.algebra;
    let n = g.dim();
    let mut residuals = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let lhs = cb.apply(&g.bracket(&g.unit(a), &g.unit(b)));
            let r1 = ad_on_bivector(g, &g.unit(a), &cb.delta[b]);
            let r2 = ad_on_bivector(g, &g.unit(b), &cb.delta[a]);
            let res = QMatrix::from_fn(n, n, |i, j| &lhs[(i, j)] - (&r1[(i, j)] - &r2[(i, j)]));
            if res.iter().any(|v| !v.is_zero()) {
                residuals.push(((a, b), res));
            }
        }
    }
    CocycleReport { passes: residuals.is_empty(), residuals }
}

pub fn cobracket_and_cocycle(rm: &RMatrix) -> (CoBracket, CocycleReport) {
    let cb = cobracket(rm);
    let report = cocycle_residual(&cb);
    (cb, report)
}

/// `C*^c_{ab} = δ(e_c)^{ab}`.
pub fn dual_structure_constants(cb: &CoBracket) -> StructureConstants {
    StructureConstants::from_fn(cb.algebra.dim(), |a, b, c| cb.delta[c][(a, b)].clone())
}

/// `g ⋈ g*` on the basis `e_1..e_n, f^1..f^n` with the off-diagonal pairing.
#[derive(Clone, Debug)]
pub struct ManinDouble {
    algebra: LieAlgebra,
    pairing: QMatrix,
    half: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManinReport {
    pub jacobi: bool,
    pub isotropic: bool,
    pub pairing_invariant: bool,
    pub halves_closed: bool,
}

impl ManinReport {
    pub fn passes(&self) -> bool {
        self.jacobi && self.isotropic && self.pairing_invariant && self.halves_closed
    }
}

impl ManinDouble {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn pairing(&self) -> &QMatrix {
        &self.pairing
    }

    /// Dimension of `g`.
    pub fn half(&self) -> usize {
        self.half
    }

    pub fn check(&self) -> ManinReport {
        let n = self.half;
        let d = 2 * n;
        let jacobi = structure_jacobi_check(self.algebra.constants()).map(|r| r.passes).unwrap_or(false);
        let isotropic = (0..n).all(|i| (0..n).all(|j| self.pairing[(i, j)].is_zero() && self.pairing[(n + i, n + j)].is_zero()));
        let mut pairing_invariant = true;
        for u in 0..d {
            for v in 0..d {
                for w in 0..d {
                    let mut acc = Rational::zero();
                    for m in 0..d {
                        acc += self.algebra.c(u, v, m) * &self.pairing[(m, w)];
                        acc += self.algebra.c(u, w, m) * &self.pairing[(v, m)];
                    }
                    if !acc.is_zero() {
                        pairing_invariant = false;
                    }
                }
            }
        }
        let closed = |lo: usize| {
            let other = n - lo;
            (lo..lo + n).all(|u| (lo..lo + n).all(|v| (other..other + n).all(|m| self.algebra.c(u, v, m).is_zero())))
        };
        let halves_closed = closed(0) && closed(n);
        ManinReport { jacobi, isotropic, pairing_invariant, halves_closed }
    }
}

/// Brackets: `[e,e]` from `C`, `[f,f]` from `C*`, and
/// `[e_i, f^j] = Σ_m δ(e_i)^{jm} e_m − Σ_m C^j_{im} f^m`.
pub fn manin_double(g: &LieAlgebra, dual: &StructureConstants) -> Result<ManinDouble> {
    let n = g.dim();
    if dual.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: dual.dim() });
    }
    if !structure_jacobi_check(dual)?.passes {
        return Err(Error::JacobiViolated);
    }
    let d = 2 * n;
    let mut c = StructureConstants::zero(d);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c.set(i, j, k, g.c(i, j, k).clone());
                c.set(n + i, n + j, n + k, dual.get(i, j, k).clone());
                let e_part = dual.get(j, k, i).clone();
                let f_part = -g.c(i, k, j).clone();
                c.set(i, n + j, k, e_part.clone());
                c.set(n + j, i, k, -e_part);
                c.set(i, n + j, n + k, f_part.clone());
                c.set(n + j, i, n + k, -f_part);
            }
        }
    }
    let mut names: Vec<String> = g.basis().to_vec();
    names.extend(g.basis().iter().map(|b| format!("{b}_dual")));
    let pairing = QMatrix::from_fn(d, d, |a, b| {
        if a + n == b || b + n == a {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let algebra = LieAlgebra::new(&names, c)?;
    Ok(ManinDouble { algebra, pairing, half: n })
}

/// Matrix realization of a rotation-type group whose algebra matches the catalog entry.
struct Realization {
    basis: Vec<CMatrix>,
}

impl Realization {
    fn for_group(group: CoadjointGroup, g: &LieAlgebra) -> Result<Self> {
        let name = match group {
            CoadjointGroup::So3Exp => "so3",
            CoadjointGroup::Su2Exp => "su2",
        };
        if algebra_catalog(name)?.constants() != g.constants() {
            return Err(Error::UnsupportedGroup(format!("{name}-exp for an algebra other than {name}")));
        }
        let basis = matrix_basis(name).expect("catalog realization");
        Ok(Realization { basis })
    }

    fn exp(&self, x: &[f64]) -> CMatrix {
        let m = self.basis[0].nrows();
        let mut a = CMatrix::zeros(m, m);
        for (e, xa) in self.basis.iter().zip(x) {
            a += e * Complex64::new(*xa, 0.0);
        }
        a.exp()
    }

    /// `Ad_g` in basis coordinates.
    fn ad_group(&self, g: &CMatrix) -> DMatrix<f64> {
        let inv = g.clone().try_inverse().expect("group element");
        let n = self.basis.len();
        let mut out = DMatrix::zeros(n, n);
        for (a, e) in self.basis.iter().enumerate() {
            let col = frobenius_coords(&self.basis, &(g * e * &inv));
            for (b, v) in col.into_iter().enumerate() {
                out[(b, a)] = v;
            }
        }
        out
    }

    /// `π(g) = Λ²(L_g)_* r − Λ²(R_g)_* r` as an `m²×m²` tensor on column-major `vec`.
    fn pi(&self, r: &DMatrix<f64>, g: &CMatrix) -> CMatrix {
        let m = g.nrows();
        let vec_of = |x: &CMatrix| CMatrix::from_column_slice(m * m, 1, x.as_slice());
        let n = self.basis.len();
        let left: Vec<CMatrix> = self.basis.iter().map(|e| vec_of(&(g * e))).collect();
        let right: Vec<CMatrix> = self.basis.iter().map(|e| vec_of(&(e * g))).collect();
        let mut out = CMatrix::zeros(m * m, m * m);
        for a in 0..n {
            for b in 0..n {
                if r[(a, b)] == 0.0 {
                    continue;
                }
                let w = Complex64::new(r[(a, b)], 0.0);
                out += (&left[a] * left[b].transpose() - &right[a] * right[b].transpose()) * w;
            }
        }
        out
    }
}

/// Right-trivialized `π`: `R_{g⁻¹} π(g) = Ad_g r Ad_gᵀ − r` in `Λ²g` coordinates.
pub fn pi_right_trivialized(group: CoadjointGroup, rm: &RMatrix, x: &[f64]) -> Result<DMatrix<f64>> {
    let real = Realization::for_group(group, &rm.algebra)?;
    if x.len() != rm.algebra.dim() {
        return Err(Error::DimensionMismatch { expected: rm.algebra.dim(), found: x.len() });
    }
    let ad = real.ad_group(&real.exp(x));
    let r = rm.f64_matrix();
    Ok(&ad * &r * ad.transpose() - r)
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplicativityReport {
    pub group: String,
    pub samples: usize,
    /// `max |π(e)|`, zero when the identity is handled exactly.
    pub identity_residual: f64,
    pub max_residual: f64,
    pub tol: f64,
    pub passes: bool,
}

fn group_tag(group: CoadjointGroup) -> &'static str {
    match group {
        CoadjointGroup::So3Exp => "so3-exp",
        CoadjointGroup::Su2Exp => "su2-exp",
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `π(gh) = Λ²(L_g)_* π(h) + Λ²(R_h)_* π(g)` at sampled pairs `g = exp(X)`, `h = exp(Y)`.
pub fn multiplicativity_sample_check(
    group: CoadjointGroup,
    rm: &RMatrix,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<MultiplicativityReport> {
    let real = Realization::for_group(group, &rm.algebra)?;
    let n = rm.algebra.dim();
    let m = real.basis[0].nrows();
    let r = rm.f64_matrix();
    let id = CMatrix::identity(m, m);
    let identity_residual = max_abs(&real.pi(&r, &id));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(rng)).collect() };
    // vec(A X B) = (Bᵀ ⊗ A) vec(X)
    let left = |g: &CMatrix| id.kronecker(g);
    let right = |h: &CMatrix| h.transpose().kronecker(&id);
    let mut max_residual = identity_residual;
    for _ in 0..samples {
        let g = real.exp(&sample(&mut rng));
        let h = real.exp(&sample(&mut rng));
        let lhs = real.pi(&r, &(&g * &h));
        let lg = left(&g);
        let rh = right(&h);
        let rhs = &lg * real.pi(&r, &h) * lg.transpose() + &rh * real.pi(&r, &g) * rh.transpose();
        max_residual = max_residual.max(max_abs(&(lhs - rhs)));
    }
    Ok(MultiplicativityReport {
        group: group_tag(group).to_string(),
        samples,
        identity_residual,
        max_residual,
        tol,
        passes: max_residual <= tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CobracketFdReport {
    pub step: f64,
    pub max_error: f64,
    pub tol: f64,
    pub passes: bool,
}

/// Central difference `(π_R(exp(hx)) − π_R(exp(−hx)))/2h` against `δ(x)` on every basis element.
pub fn cobracket_finite_difference(group: CoadjointGroup, rm: &RMatrix, step: f64, tol: f64) -> Result<CobracketFdReport> {
    let n = rm.algebra.dim();
    let cb = cobracket(rm);
    let mut max_error = 0.0f64;
    for a in 0..n {
        let mut x = vec![0.0; n];
        x[a] = step;
        let plus = pi_right_trivialized(group, rm, &x)?;
        x[a] = -step;
        let minus = pi_right_trivialized(group, rm, &x)?;
        let fd = (plus - minus) / (2.0 * step);
        let exact = cb.delta[a].map(|q| rational_to_f64(&q));
        max_error = max_error.max((fd - exact).abs().max());
    }
    Ok(CobracketFdReport { step, max_error, tol, passes: max_error <= tol })
}
