//! Cross-checks against independent computations in matrix realizations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use poisson_core::exactalg::{parse_expression, rational, rational_to_f64, Chart};
use poisson_core::liealg::{algebra_catalog, catalog_entry, matrix_basis};
use poisson_core::plie::{cobracket, schouten_square, RMatrix};
use poisson_core::poisson::PoissonStructure;

type C = DMatrix<Complex64>;

fn kron3(a: &C, b: &C, c: &C) -> C {
    a.kronecker(b).kronecker(c)
}

fn cplx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `[r₁₂,r₁₃] + [r₁₂,r₂₃] + [r₁₃,r₂₃]` computed with genuine commutators in `End(V⊗V⊗V)`.
fn cube_commutators(basis: &[C], r: &DMatrix<f64>) -> C {
    let m = basis[0].nrows();
    let id = C::identity(m, m);
    let n = basis.len();
    let mut r12 = C::zeros(m * m * m, m * m * m);
    let mut r13 = r12.clone();
    let mut r23 = r12.clone();
    for a in 0..n {
        for b in 0..n {
            let w = cplx(r[(a, b)]);
            r12 += kron3(&basis[a], &basis[b], &id) * w;
            r13 += kron3(&basis[a], &id, &basis[b]) * w;
            r23 += kron3(&id, &basis[a], &basis[b]) * w;
        }
    }
    let br = |x: &C, y: &C| x * y - y * x;
    br(&r12, &r13) + br(&r12, &r23) + br(&r13, &r23)
}

#[test]
fn schouten_square_matches_tensor_cube() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for name in ["sl2", "so3", "su2", "heisenberg3"] {
        let g = algebra_catalog(name).unwrap();
        let basis = matrix_basis(name).unwrap();
        for trial in 0..4 {
            let rm = if name == "sl2" && trial == 0 {
                RMatrix::from_entries(g.clone(), [(1, 2, rational(1, 1))]).unwrap()
            } else {
                RMatrix::random(g.clone(), &mut rng, 5)
            };
            let r = rm.matrix().map(|q| rational_to_f64(&q));
            let oracle = cube_commutators(&basis, &r);
            let t = schouten_square(&rm);
            let m = basis[0].nrows();
            let mut ours = C::zeros(m * m * m, m * m * m);
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        ours += kron3(&basis[a], &basis[b], &basis[c]) * cplx(rational_to_f64(&t.get(a, b, c)));
                    }
                }
            }
            let err = (oracle - ours).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-9, "{name} trial {trial}: {err}");
        }
    }
}

#[test]
fn sl2_ef_square_coefficient() {
    // in the 2×2 realization, the commutator cube of e∧f equals the full antisymmetrization of h⊗e⊗f
    let g = algebra_catalog("sl2").unwrap();
    let basis = matrix_basis("sl2").unwrap();
    let rm = RMatrix::from_entries(g, [(1, 2, rational(1, 1))]).unwrap();
    let oracle = cube_commutators(&basis, &rm.matrix().map(|q| rational_to_f64(&q)));
    let mut wedge = C::zeros(8, 8);
    for (p, s) in [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([1, 0, 2], -1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0)] {
        wedge += kron3(&basis[p[0]], &basis[p[1]], &basis[p[2]]) * cplx(s);
    }
    assert!((oracle - wedge).iter().all(|z| z.norm() < 1e-12));
    assert_eq!(schouten_square(&rm).get(0, 1, 2), rational(1, 1));
}

#[test]
fn cobracket_matches_commutators_on_tensor_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for name in ["sl2", "so3", "heisenberg3"] {
        let g = algebra_catalog(name).unwrap();
        let basis = matrix_basis(name).unwrap();
        let m = basis[0].nrows();
        let rm = RMatrix::random(g.clone(), &mut rng, 5);
        let cb = cobracket(&rm);
        for (x, ex) in basis.iter().enumerate() {
            let mut oracle = C::zeros(m * m, m * m);
            for b in 0..3 {
                for c in 0..3 {
                    let w = cplx(rational_to_f64(rm.entry(b, c)));
                    let lhs = (ex * &basis[b] - &basis[b] * ex).kronecker(&basis[c]);
                    let rhs = basis[b].kronecker(&(ex * &basis[c] - &basis[c] * ex));
                    oracle += (lhs + rhs) * w;
                }
            }
            let mut ours = C::zeros(m * m, m * m);
            for b in 0..3 {
                for c in 0..3 {
                    ours += basis[b].kronecker(&basis[c]) * cplx(rational_to_f64(&cb.delta(x)[(b, c)]));
                }
            }
            assert!((oracle - ours).iter().all(|z| z.norm() < 1e-9), "{name} e{x}");
        }
    }
}

#[test]
fn killing_form_matches_trace_form() {
    for name in ["so3", "su2", "sl2"] {
        let entry = catalog_entry(name).unwrap();
        let basis = matrix_basis(name).unwrap();
        let k = entry.algebra.killing_form();
        let factor = rational_to_f64(entry.trace_form_factor.as_ref().unwrap());
        for a in 0..3 {
            for b in 0..3 {
                let tr = (&basis[a] * &basis[b]).trace().re;
                assert!((rational_to_f64(&k[(a, b)]) - factor * tr).abs() < 1e-12, "{name} ({a},{b})");
            }
        }
    }
}

#[test]
fn structure_constants_match_realizations() {
    for name in ["so3", "su2", "sl2", "heisenberg3"] {
        let g = algebra_catalog(name).unwrap();
        let basis = matrix_basis(name).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let comm = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                let mut expect = C::zeros(basis[0].nrows(), basis[0].ncols());
                for k in 0..3 {
                    expect += &basis[k] * cplx(rational_to_f64(g.c(i, j, k)));
                }
                assert!((comm - expect).iter().all(|z| z.norm() < 1e-12), "{name} [{i},{j}]");
            }
        }
    }
}

#[test]
fn broken_structure_hand_expansion() {
    // Σ_l (π^{1l}∂_lπ^{23} + π^{2l}∂_lπ^{31} + π^{3l}∂_lπ^{12}) with π^{12}=x3, π^{23}=x1, π^{31}=x1;
    // the only nonzero derivatives are ∂_1π^{23}, ∂_1π^{31}, ∂_3π^{12}, giving π^{11} + π^{21} + π^{33} = -x3
    let chart = Chart::new(&["x1", "x2", "x3"]).unwrap();
    let e = |s: &str| parse_expression(s, &chart).unwrap();
    let p = PoissonStructure::from_entries(&chart, [(0, 1, e("x3")), (1, 2, e("x1")), (2, 0, e("x1"))]).unwrap();
    assert_eq!(p.jacobi_residual().residuals[&(0, 1, 2)], e("-x3"));
}
