use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;

use super::LieAlgebra;
use crate::error::{Error, Result};
use crate::exactalg::rational_to_f64;

type CMatrix = DMatrix<Complex64>;

/// Groups with a closed-form coadjoint action.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoadjointGroup {
    So3Exp,
    Su2Exp,
}

impl FromStr for CoadjointGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "so3-exp" | "so3" => Ok(CoadjointGroup::So3Exp),
            "su2-exp" | "su2" => Ok(CoadjointGroup::Su2Exp),
            _ => Err(Error::UnsupportedGroup(s.to_string())),
        }
    }
}

/// Rotation of `v` by the rotation vector `w` (axis `w/|w|`, angle `|w|`).
pub fn rodrigues(w: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
    let w = Vector3::from(*w);
    let v = Vector3::from(*v);
    let theta = w.norm();
    if theta == 0.0 {
        return v.into();
    }
    let k = w / theta;
    let r = v * theta.cos() + k.cross(&v) * theta.sin() + k * k.dot(&v) * (1.0 - theta.cos());
    r.into()
}

/// `Ad*_{exp X} ξ` for `X` in basis coordinates.
pub fn coadjoint_action_numeric(group: CoadjointGroup, x: &[f64; 3], xi: &[f64; 3]) -> [f64; 3] {
    match group {
        // ad*(X) = [X]× for so(3), so the action is a rotation
        CoadjointGroup::So3Exp => rodrigues(x, xi),
        CoadjointGroup::Su2Exp => {
            let basis = su2_basis();
            let g = su2_exp(x);
            let g_inv = g.adjoint();
            // (Ad*_g ξ)_j = Σ_k ξ_k (Ad_{g⁻¹})_{kj}
            let mut out = [0.0; 3];
            for (j, ej) in basis.iter().enumerate() {
                let m = &g_inv * ej * &g;
                let coords = frobenius_coords(&basis, &m);
                out[j] = coords.iter().zip(xi).map(|(a, b)| a * b).sum();
            }
            out
        }
    }
}

/// `exp(X)` for `X = Σ x_a E_a`, `E_a = -iσ_a/2`: `cos(θ/2) I - i sin(θ/2) n·σ`.
fn su2_exp(x: &[f64; 3]) -> CMatrix {
    let theta = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let id = CMatrix::identity(2, 2);
    if theta == 0.0 {
        return id;
    }
    let sig = pauli();
    let mut ns = CMatrix::zeros(2, 2);
    for (s, c) in sig.iter().zip(x) {
        ns += s * Complex64::new(c / theta, 0.0);
    }
    id * Complex64::new((theta / 2.0).cos(), 0.0) - ns * Complex64::new(0.0, (theta / 2.0).sin())
}

fn pauli() -> [CMatrix; 3] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    ]
}

fn su2_basis() -> Vec<CMatrix> {
    pauli().iter().map(|s| s * Complex64::new(0.0, -0.5)).collect()
}

/// Coordinates of `m` in an orthogonal basis under `Re tr(A† B)`.
pub(crate) fn frobenius_coords(basis: &[CMatrix], m: &CMatrix) -> Vec<f64> {
    basis
        .iter()
        .map(|e| (e.adjoint() * m).trace().re / (e.adjoint() * e).trace().re)
        .collect()
}

/// Built-in matrix realization of a catalog algebra, basis in catalog order.
pub fn matrix_basis(name: &str) -> Option<Vec<CMatrix>> {
    let r = |n: usize, v: &[f64]| CMatrix::from_iterator(n, n, v.iter().map(|&x| Complex64::new(x, 0.0))).transpose();
    match name {
        "so3" => Some(vec![
            r(3, &[0., 0., 0., 0., 0., -1., 0., 1., 0.]),
            r(3, &[0., 0., 1., 0., 0., 0., -1., 0., 0.]),
            r(3, &[0., -1., 0., 1., 0., 0., 0., 0., 0.]),
        ]),
        "su2" => Some(su2_basis()),
        "sl2" => Some(vec![r(2, &[1., 0., 0., -1.]), r(2, &[0., 1., 0., 0.]), r(2, &[0., 0., 1., 0.])]),
        "heisenberg3" => Some(vec![
            r(3, &[0., 1., 0., 0., 0., 0., 0., 0., 0.]),
            r(3, &[0., 0., 0., 0., 0., 1., 0., 0., 0.]),
            r(3, &[0., 0., 1., 0., 0., 0., 0., 0., 0.]),
        ]),
        _ => None,
    }
}

/// `exp(ad*(X)) ξ` for any algebra, by the matrix exponential.
pub fn coadjoint_exp(g: &LieAlgebra, x: &[f64], xi: &[f64]) -> Vec<f64> {
    let n = g.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (i, xi_) in x.iter().enumerate() {
        let a = g.ad_star(&g.unit(i)).map(|q| rational_to_f64(&q));
        m += a * *xi_;
    }
    let e = m.exp();
    (e * DVector::from_column_slice(xi)).iter().copied().collect()
}
