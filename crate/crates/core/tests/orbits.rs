mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use skewharmonic::liegroups::{GlElement, GlKind};
use skewharmonic::nilgroup::{gl_action, NilElement};
use skewharmonic::orbits::*;
use skewharmonic::skewlin::{block_j, inner, SymplecticForm};


fn random_sp_embedded(r: &mut ChaCha8Rng, q: usize) -> DMatrix<f64> {
    let k = 2 * (q - 1);
    let s = random_matrix(r, k) * 0.4;
    let s = &s + s.transpose();
    let j = SymplecticForm::new(q - 1).matrix.into_matrix();
    let a = (j * s).exp();
    let mut g = DMatrix::identity(k + 1, k + 1);
    g.view_mut((0, 0), (k, k)).copy_from(&a);
    g
}

#[test]
fn base_points() {
    for q in 1..5 {
        let o = base_point(q).unwrap();
        assert_eq!(o.m(), SymplecticForm::new(q).matrix);
        let m = o.m();
        assert_eq!(inner(&m, &m).unwrap(), q as f64);
        let pt = membership(&o);
        assert!(pt.in_o && pt.in_omega);
    }
    let o2 = base_point(2).unwrap();
    assert_eq!(o2.z, block_j(1, 3));
    assert_eq!(o2.v.as_slice(), &[0.0, 0.0, 2.0]);
}

#[test]
fn membership_flags() {
    let mut n = base_point(2).unwrap();
    n.v = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    // M(z_o, e_1) = J e_1 ... has zero last row: det M = 0 with v in the range of z
    let pt = membership(&n);
    assert!(!pt.in_o);
    let mut n = base_point(2).unwrap();
    n.v[0] = 1.0;
    let pt = membership(&n);
    assert!(pt.in_omega && !pt.in_o);
    let n = NilElement::new(block_j(1, 3), DVector::zeros(3)).unwrap();
    let pt = membership(&n);
    assert!(!pt.in_omega && !pt.in_o && pt.det_m == 0.0);
}

#[test]
fn solver_on_base_point_and_diagonal_images() {
    for q in 1..5 {
        let o = base_point(q).unwrap();
        assert!(orbit_solve(&o).unwrap().residual <= 1e-12);
        let p = 2 * q - 1;
        let mut d = DMatrix::identity(p, p);
        for i in 0..q - 1 {
            d[(2 * i, 2 * i)] = 0.5 + i as f64;
            d[(2 * i + 1, 2 * i + 1)] = 0.5 + i as f64;
        }
        d[(p - 1, p - 1)] = -1.7;
        let n = gl_action(&GlElement::new(d, GlKind::P).unwrap(), &o).unwrap();
        let sol = orbit_solve(&n).unwrap();
        assert!(sol.residual <= 1e-12);
        let check = gl_action(&sol.g, &n).unwrap();
        assert!((check.v - &o.v).amax() < 1e-12);
    }
}

#[test]
fn solver_on_random_points_of_omega() {
    let mut r = rng(41);
    for p in [3, 5] {
        let mut worst: f64 = 0.0;
        for _ in 0..500 {
            let n = NilElement::new(random_skew(&mut r, p), random_vector(&mut r, p)).unwrap();
            let sol = orbit_solve(&n).unwrap();
            worst = worst.max(sol.residual);
        }
        assert!(worst <= 1e-9, "p={p} worst residual {worst:e}");
    }
}

#[test]
fn solver_rejects_points_outside_omega() {
    let n = NilElement::new(block_j(1, 3), DVector::zeros(3)).unwrap();
    assert!(orbit_solve(&n).is_err());
    let even = NilElement::identity(4);
    assert!(orbit_solve(&even).is_err());
}

#[test]
fn det_m_equivariance() {
    let mut r = rng(42);
    for p in [3, 5] {
        for _ in 0..100 {
            let n = NilElement::new(random_skew(&mut r, p), random_vector(&mut r, p)).unwrap();
            let g = GlElement::new(random_matrix(&mut r, p) + DMatrix::identity(p, p), GlKind::P).unwrap();
            let lhs = membership(&gl_action(&g, &n).unwrap()).det_m;
            let rhs = g.det().powi(2) * membership(&n).det_m;
            assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }
}

#[test]
fn stabilizer_examples() {
    let id = stabilizer_check(&DMatrix::identity(3, 3)).unwrap();
    assert!(id.pass && id.agree);
    let a = 1.7;
    let g = DMatrix::from_diagonal(&DVector::from_vec(vec![a, 1.0 / a, 1.0]));
    assert!(stabilizer_check(&g).unwrap().pass);
    let mut g = DMatrix::identity(3, 3);
    g[(0, 0)] = 2.0;
    let c = stabilizer_check(&g).unwrap();
    assert!(!c.pass && c.agree);
    // fixes the form block but moves v_o
    let mut g = DMatrix::identity(3, 3);
    g[(0, 2)] = 0.3;
    let c = stabilizer_check(&g).unwrap();
    assert!(!c.pass && c.agree);
}

#[test]
fn random_symplectic_elements_stabilize() {
    let mut r = rng(43);
    for q in [2, 3] {
        let mut prev = DMatrix::identity(2 * q - 1, 2 * q - 1);
        for _ in 0..50 {
            let g = random_sp_embedded(&mut r, q);
            let c = stabilizer_check(&g).unwrap();
            assert!(c.pass && c.agree, "{c:?}");
            let prod = &prev * &g;
            assert!(stabilizer_check(&prod).unwrap().pass);
            assert!(stabilizer_check(&g.clone().try_inverse().unwrap()).unwrap().pass);
            prev = g;
        }
    }
}

#[test]
fn strict_inclusion() {
    for q in 2..5 {
        let w = strict_inclusion_witness(q).unwrap();
        let pt = membership(&w);
        assert!(pt.in_omega && !pt.in_o);
        assert!((w.z.matrix() * &w.v).norm() >= 1.0);
        let sol = orbit_solve(&w).unwrap();
        assert!(sol.residual <= 1e-12);
    }
    let w = strict_inclusion_witness(2).unwrap();
    assert_eq!(w.v.as_slice(), &[1.0, 0.0, 2.0]);
}
