use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use skewharmonic::gausspoly::GaussPoly;
use skewharmonic::nilgroup::{multiply, NilElement, NilGridFunction};
use skewharmonic::numerics::{Axis, GridSpec, RngStream};
use skewharmonic::orbits::{base_point, membership};
use skewharmonic::repsim::*;
use skewharmonic::{Complex, Error};

fn axis() -> Axis {
    Axis::new(256, 8.0).unwrap()
}

fn c(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

fn el(c: [f64; 6]) -> NilElement {
    NilElement::from_coords(3, &c).unwrap()
}

fn nil_fn(f: GaussPoly) -> NilGridFunction {
    NilGridFunction::from_gauss(3, GridSpec::uniform(6, 8, 4.0).unwrap(), f).unwrap()
}

fn random_el(rng: &mut impl Rng) -> NilElement {
    let mut x = [0.0; 6];
    for v in x.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    el(x)
}

#[test]
fn heisenberg_split_q2() {
    let s = heisenberg_split(2).unwrap();
    assert_eq!(s.h_basis.len(), 3);
    assert_eq!(s.n0_basis.len(), 3);
    assert!(s.orthogonality_residual() < 1e-15);
    assert_eq!(s.radical_residual(), 0.0);
    assert!(s.pairing.determinant().abs() > 0.5);
    assert_eq!(s.pairing, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    assert!(heisenberg_split(1).is_err());
}

#[test]
fn heisenberg_split_higher_q() {
    for q in [3, 4] {
        let s = heisenberg_split(q).unwrap();
        let p = 2 * q - 1;
        assert_eq!(s.h_basis.len() + s.n0_basis.len(), p * (p - 1) / 2 + p);
        assert!(s.orthogonality_residual() < 1e-14);
        assert_eq!(s.radical_residual(), 0.0);
        let d = s.pairing.determinant();
        assert!((d.abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lambda_o_identity_and_characters() {
    let ax = axis();
    assert!(lambda_o(&NilElement::identity(3), ax).unwrap().identity_residual() < 1e-13);
    // z = z_o is central with <M(z_o, 0), J_2> = 1
    let zo = lambda_o(&el([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), ax).unwrap();
    assert!(zo.identity_residual() < 1e-12);
    for t in [0.1, 0.37, -0.8] {
        let o = lambda_o(&el([t, 0.0, 0.0, 0.0, 0.0, 2.0 * t]), ax).unwrap();
        let expect = OperatorOnGrid::identity(ax).scale(Complex::from_polar(1.0, 2.0 * PI * 2.0 * t));
        assert!(o.probe_residual(&expect).unwrap() < 1e-12);
    }
    // z13, z23 act trivially
    assert!(lambda_o(&el([0.0, 0.7, -0.4, 0.0, 0.0, 0.0]), ax).unwrap().identity_residual() < 1e-13);
}

#[test]
fn lambda_o_is_unitary() {
    let ax = axis();
    for n in [
        el([0.5, 0.0, 0.0, 0.0, 0.0, 0.0]),
        el([0.0, 0.0, 0.0, 0.9, 0.0, 0.0]),
        el([0.0, 0.0, 0.0, 0.0, -0.7, 0.0]),
        el([0.0, 0.0, 0.0, 0.0, 0.0, 0.3]),
        el([0.2, 0.1, 0.3, -0.6, 0.4, 0.5]),
    ] {
        assert!(lambda_o(&n, ax).unwrap().unitarity_residual() <= 1e-8);
    }
}

#[test]
fn lambda_o_homomorphism() {
    let ax = axis();
    let mut rng = RngStream::new(17, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = (random_el(&mut rng), random_el(&mut rng));
        let lhs = lambda_o(&a, ax).unwrap().compose(&lambda_o(&b, ax).unwrap()).unwrap();
        let rhs = lambda_o(&multiply(&a, &b).unwrap(), ax).unwrap();
        worst = worst.max(lhs.probe_residual(&rhs).unwrap());
    }
    assert!(worst <= 1e-6, "{worst:e}");
}

#[test]
fn lambda_o_rejects_long_translations() {
    assert!(matches!(lambda_o(&el([0.0, 0.0, 0.0, 3.0, 0.0, 0.0]), axis()), Err(Error::SupportEscape(_))));
    let p5 = NilElement::identity(5);
    assert!(matches!(lambda_o(&p5, axis()), Err(Error::Unsupported(_))));
}

#[test]
fn reflection() {
    let u = reflection_u(axis()).unwrap();
    assert_eq!(u.compose(&u).unwrap(), OperatorOnGrid::identity(axis()));
    assert_eq!(u.unitarity_residual(), 0.0);
    let g = sample(&axis(), |x| c((-PI * x * x).exp()));
    assert_eq!(u.apply(&g), g);
}

#[test]
fn metaplectic_generators() {
    let ax = axis();
    assert_eq!(metaplectic(SlGenerator::Identity, ax).unwrap(), OperatorOnGrid::identity(ax));
    assert!(metaplectic(SlGenerator::Dilation(1.0), ax).unwrap().identity_residual() < 1e-12);
    assert!(metaplectic(SlGenerator::Rotation, ax).unwrap().unitarity_residual() < 1e-12);
    assert!(metaplectic(SlGenerator::Shear(0.7), ax).unwrap().unitarity_residual() < 1e-13);
    // dilation keeps the norm of localized vectors
    let d = metaplectic(SlGenerator::Dilation(1.7), ax).unwrap();
    for p in probes(&ax) {
        assert!((d.apply(&p).norm() - p.norm()).abs() / p.norm() < 1e-10);
    }
    // J^4 = 1 and J^2 = U
    let j = metaplectic(SlGenerator::Rotation, ax).unwrap();
    let j2 = j.compose(&j).unwrap();
    assert!(j2.probe_residual(&reflection_u(ax).unwrap()).unwrap() < 1e-12);
    assert!(metaplectic(SlGenerator::Rotation, Axis::new(256, 6.0).unwrap()).is_err());
}

#[test]
fn metaplectic_covariance() {
    let ax = axis();
    let gens = [
        SlGenerator::Identity,
        SlGenerator::Dilation(2.0),
        SlGenerator::Dilation(0.7),
        SlGenerator::Shear(0.8),
        SlGenerator::Shear(-1.3),
        SlGenerator::Rotation,
    ];
    let ns = [
        el([0.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
        el([0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        el([0.4, 0.2, -0.3, 0.5, -0.6, 0.7]),
        el([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ];
    for g in gens {
        for n in &ns {
            let r = covariance_check(g, n, ax).unwrap();
            assert!(r <= 1e-5, "{g:?} {n:?}: {r:e}");
            if g == SlGenerator::Identity {
                assert!(r < 1e-13);
            }
        }
    }
    let central = covariance_check(SlGenerator::Rotation, &ns[3], ax).unwrap();
    assert!(central <= 1e-6);
}

#[test]
fn general_sl2_elements() {
    let ax = axis();
    let n = el([0.2, 0.0, 0.0, 0.6, -0.4, 0.3]);
    for a in [
        [1.2, 0.5, -0.3, 0.7083333333333334],
        [0.1, -1.1, 0.9, 0.0],
        [0.8, 0.0, 0.4, 1.25],
    ] {
        let a = DMatrix::<f64>::from_row_slice(2, 2, &a);
        let a = &a / a.determinant().sqrt();
        let t = metaplectic_sl2(&a, ax).unwrap();
        let lhs = t.compose(&lambda_o(&n, ax).unwrap()).unwrap().compose(&t.adjoint()).unwrap();
        let mut g = DMatrix::identity(3, 3);
        g.view_mut((0, 0), (2, 2)).copy_from(&a);
        let gn = skewharmonic::nilgroup::gl_action(
            &skewharmonic::liegroups::GlElement::new(g, skewharmonic::liegroups::GlKind::P).unwrap(),
            &n,
        )
        .unwrap();
        let r = lhs.probe_residual(&lambda_o(&gn, ax).unwrap()).unwrap();
        assert!(r < 1e-5, "{a}: {r:e}");
    }
    assert!(metaplectic_sl2(&DMatrix::identity(2, 2).scale(2.0), ax).is_err());
}

#[test]
fn covariance_requires_the_stabilizer() {
    // generators embed into the stabilizer, anything else is refused upstream
    let g = SlGenerator::Dilation(2.0).embed();
    assert!(skewharmonic::orbits::stabilizer_check(&g).unwrap().pass);
}

#[test]
fn parity_is_preserved() {
    let r = parity_check(
        &[SlGenerator::Identity, SlGenerator::Dilation(2.0), SlGenerator::Dilation(0.6), SlGenerator::Shear(0.9), SlGenerator::Rotation],
        axis(),
    )
    .unwrap();
    assert_eq!(r[0], 0.0);
    assert!(r[1] <= 1e-8 && r[2] <= 1e-8, "{r:?}");
    assert!(r[3] <= 1e-8, "{r:?}");
    assert!(r[4] <= 1e-6, "{r:?}");
}

fn gauss6(a: [f64; 6]) -> GaussPoly {
    GaussPoly::gaussian(a.to_vec()).unwrap()
}

#[test]
fn partial_integrals() {
    let f = gauss6([1.0, 2.0, 0.5, 1.5, 0.8, 4.0]);
    let big = partial_integral(&nil_fn(f.clone())).unwrap();
    assert_eq!(big.widths(), &[1.0, 1.5, 0.8]);
    // int e^{-pi a x^2} = a^{-1/2}
    let k = (2.0f64 * 0.5 * 4.0).powf(-0.5);
    assert!((big.eval(&[0.1, 0.2, -0.3]) - f.evaluate_axis(5, 0.0).evaluate_axis(2, 0.0).evaluate_axis(1, 0.0).eval(&[0.1, 0.2, -0.3]) * k).norm() < 1e-14);
    assert!((big.integral() - f.integral()).norm() < 1e-14);
    let odd = f.mul_coordinate(1, 1);
    assert!(partial_integral(&nil_fn(odd)).unwrap().is_zero());
    // the twisted version picks up exp(-pi (1/2)^2 / 4) from v3
    let tw = partial_integral_twisted(&nil_fn(f.clone())).unwrap();
    let damp = (-PI * 0.25 / 4.0).exp();
    assert!((tw.integral() - f.integral() * damp).norm() < 1e-14);
    let grid = NilGridFunction::from_samples(3, skewharmonic::numerics::GridFunction::zeros(GridSpec::uniform(6, 4, 2.0).unwrap())).unwrap();
    assert!(matches!(partial_integral(&grid), Err(Error::Unsupported(_))));
}

#[test]
fn weyl_kernel_shape() {
    let ax = axis();
    let f = GaussPoly::gaussian(vec![1.0, 1.3, 0.9]).unwrap();
    let k = weyl_kernel(&f, ax).unwrap();
    // real even F in the second slot gives a symmetric kernel
    assert!((&k.matrix - k.matrix.transpose()).iter().all(|z| z.norm() < 1e-15));
    // Gaussian in (x + y, x - y): K(x, x) decays like exp(-pi (2x)^2 / (4 * 0.9))
    let h = ax.spacing();
    let mid = ax.n / 2;
    let j = mid + 16;
    let x = ax.point(j);
    let ratio = (k.matrix[(j, j)] / k.matrix[(mid, mid)]).re;
    assert!((ratio - (-PI * x * x / 0.9).exp()).abs() < 1e-12, "{ratio}");
    assert!(k.matrix[(mid, mid)].re / h > 0.0);
}

#[test]
fn group_fourier_matches_weyl_kernel() {
    let ax = axis();
    let o = membership(&base_point(2).unwrap());
    for f in [
        gauss6([1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
        gauss6([0.7, 1.2, 0.9, 1.4, 0.6, 1.1]),
        gauss6([1.0, 1.0, 1.0, 1.2, 0.8, 1.0]).add(&GaussPoly::monomial(vec![1.0, 1.0, 1.0, 1.2, 0.8, 1.0], vec![0, 0, 0, 1, 1, 0], c(0.7)).unwrap()).unwrap(),
    ] {
        let nf = nil_fn(f);
        let a = group_fourier(&nf, &o, ax).unwrap();
        let b = weyl_kernel(&partial_integral_twisted(&nf).unwrap(), ax).unwrap();
        let rel = a.sub(&b).unwrap().hs_norm() / b.hs_norm();
        assert!(rel <= 1e-5, "{rel:e}");
    }
}

#[test]
fn group_fourier_sanity() {
    let ax = axis();
    let o = membership(&base_point(2).unwrap());
    // a narrow bump approximates the identity times its mass
    let a = 4000.0;
    let f = gauss6([a, 1.0, 1.0, a, a, a]).scale(c(a * a));
    let fh = group_fourier(&nil_fn(f), &o, ax).unwrap();
    let r = fh.probe_residual(&OperatorOnGrid::identity(ax)).unwrap();
    assert!(r < 1e-2, "{r}");
    // (f*)^ = (f^)* with f*(n) = conj f(n^{-1}); for a real function even in n this is self-adjointness
    let g = gauss6([0.9, 1.1, 1.0, 1.3, 0.7, 1.0]);
    let gh = group_fourier(&nil_fn(g), &o, ax).unwrap();
    let rel = gh.sub(&gh.adjoint()).unwrap().hs_norm() / gh.hs_norm();
    assert!(rel <= 1e-5, "{rel:e}");
    // only diagonal sections keep the integrand separable
    let mut w = base_point(2).unwrap();
    w.z = skewharmonic::SkewMatrix::from_upper(3, &[0.6, 0.3, 0.2]).unwrap();
    w.v = nalgebra::DVector::from_vec(vec![0.2, -0.3, 0.6]);
    let w = membership(&w);
    assert!(matches!(group_fourier(&nil_fn(gauss6([1.0; 6])), &w, ax), Err(Error::Unsupported(_))));
    let diag = membership(&el([2.0, 0.0, 0.0, 0.0, 0.0, 0.5]));
    assert!(group_fourier(&nil_fn(gauss6([1.0; 6])), &diag, ax).is_ok());
}

#[test]
fn trace_ratio_is_constant() {
    let ax = axis();
    let fam: Vec<NilGridFunction> = [
        gauss6([1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
        gauss6([0.5, 1.5, 0.8, 1.2, 0.6, 0.9]),
        gauss6([2.0, 0.7, 1.1, 0.8, 1.5, 1.3]),
    ]
    .into_iter()
    .map(nil_fn)
    .collect();
    let t = trace_check(&fam, ax).unwrap();
    assert!(t.spread <= 1e-3, "{:?}", t.ratios);
    assert!((t.ratios[0] - c(0.5)).norm() < 1e-6, "{:?}", t.ratios);
    assert!(trace_check(&fam[..2], ax).is_err());
}

#[test]
fn trace_of_odd_and_scaled() {
    let ax = axis();
    let o = membership(&base_point(2).unwrap());
    let odd = gauss6([1.0; 6]).mul_coordinate(3, 1);
    let fh = group_fourier(&nil_fn(odd.clone()), &o, ax).unwrap();
    let tr: Complex = (0..ax.n).map(|j| fh.matrix[(j, ax.mirror(j))]).sum();
    assert!(tr.norm() < 1e-6);
    assert!(odd.fourier().eval(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.5]).norm() < 1e-12);
    let f = gauss6([1.0; 6]);
    let a = group_fourier(&nil_fn(f.clone()), &o, ax).unwrap();
    let b = group_fourier(&nil_fn(f.scale(c(3.0))), &o, ax).unwrap();
    let ta: Complex = (0..ax.n).map(|j| a.matrix[(j, ax.mirror(j))]).sum();
    let tb: Complex = (0..ax.n).map(|j| b.matrix[(j, ax.mirror(j))]).sum();
    assert!((tb - ta * 3.0).norm() < 1e-12);
}

#[test]
fn schur_experiment_witness() {
    let ax = axis();
    let sample = sample_o(10, RngStream::new(3, 0)).unwrap();
    let id = schur_experiment(&DMatrix::identity(3, 3), &sample, ax).unwrap();
    assert!(id.commutator < 1e-12 && id.baseline < 1e-12);
    let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0, 1.0]));
    let r = schur_experiment(&g, &sample, ax).unwrap();
    println!("{r:?}");
    assert!(r.shape_residual < 1e-9);
    assert!(r.intertwiner_residual < 1e-5);
    assert!(r.commutator >= 100.0 * r.baseline, "{r:?}");
    assert!(schur_experiment(&g, &sample[..5], ax).is_err());
}
