use std::f64::consts::PI;

use skewharmonic::gausspoly::GaussPoly;
use skewharmonic::numerics::gauss_kronrod;
use skewharmonic::Complex;

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

fn poly_1d() -> GaussPoly {
    let a = vec![0.7];
    let mut f = GaussPoly::monomial(a.clone(), vec![0], c(0.5)).unwrap();
    for (k, v) in [(1, Complex::new(0.2, -0.1)), (3, c(-1.1)), (4, c(0.4))] {
        f = f.add(&GaussPoly::monomial(a.clone(), vec![k], v).unwrap()).unwrap();
    }
    f
}

#[test]
fn fourier_matches_quadrature_1d() {
    let f = poly_1d();
    let ff = f.fourier();
    for xi in [-1.3, -0.2, 0.0, 0.45, 2.0] {
        let num = gauss_kronrod(|x| f.eval(&[x]) * Complex::new(0.0, 2.0 * PI * x * xi).exp(), -12.0, 12.0, 1e-13);
        assert!((num - ff.eval(&[xi])).norm() < 1e-11, "xi={xi}");
    }
}

#[test]
fn fourier_inversion_and_parseval() {
    let widths = vec![0.5, 1.0, 2.0];
    let f = GaussPoly::monomial(widths.clone(), vec![2, 1, 0], c(1.0))
        .unwrap()
        .add(&GaussPoly::monomial(widths, vec![0, 0, 3], Complex::new(0.0, 0.7)).unwrap())
        .unwrap();
    let back = f.fourier().fourier().reflect();
    for (x, y) in [[0.1, -0.4, 0.9], [1.0, 0.2, -0.3]].iter().map(|x| (f.eval(x), back.eval(x))) {
        assert!((x - y).norm() < 1e-13);
    }
    assert!((f.norm_sqr() - f.fourier().norm_sqr()).abs() < 1e-13 * f.norm_sqr());
}

#[test]
fn derivative_matches_finite_difference() {
    let f = poly_1d();
    let d = f.derivative(0);
    let h = 1e-5;
    for x in [-0.8, 0.1, 1.4] {
        let fd = (f.eval(&[x + h]) - f.eval(&[x - h])) / (2.0 * h);
        assert!((fd - d.eval(&[x])).norm() < 1e-8);
    }
}

#[test]
fn fourier_intertwines_derivative() {
    // F(f')(xi) = -2 pi i xi Ff(xi)
    let f = poly_1d();
    let lhs = f.derivative(0).fourier();
    let rhs = f.fourier().mul_coordinate(0, 1).scale(Complex::new(0.0, -2.0 * PI));
    for xi in [-0.5, 0.3, 1.7] {
        assert!((lhs.eval(&[xi]) - rhs.eval(&[xi])).norm() < 1e-12);
    }
}

#[test]
fn partial_operations_agree_with_pointwise() {
    let f = GaussPoly::monomial(vec![0.8, 1.5], vec![2, 1], c(1.0)).unwrap();
    let g = f.integrate_axis(0);
    let y = 0.37;
    let num = gauss_kronrod(|x| f.eval(&[x, y]), -10.0, 10.0, 1e-14);
    assert!((num - g.eval(&[y])).norm() < 1e-13);
    let e = f.evaluate_axis(1, y);
    assert!((e.eval(&[0.2]) - f.eval(&[0.2, y])).norm() < 1e-15);
    let d = f.dilate(1.7).unwrap();
    assert!((d.eval(&[0.2, -0.3]) - f.eval(&[0.34, -0.51])).norm() < 1e-15);
    let da = f.dilate_axis(1, -2.0).unwrap();
    assert!((da.eval(&[0.2, -0.3]) - f.eval(&[0.2, 0.6])).norm() < 1e-15);
}

#[test]
fn dilation_scales_the_transform() {
    // F(f(c .)) = |c|^{-d} Ff(. / c)
    let f = GaussPoly::monomial(vec![1.0, 0.6], vec![1, 2], c(1.0)).unwrap();
    let cst = 1.4;
    let lhs = f.dilate(cst).unwrap().fourier();
    let rhs = f.fourier().dilate(1.0 / cst).unwrap().scale(c(cst.powi(-2)));
    assert!((lhs.eval(&[0.3, -0.2]) - rhs.eval(&[0.3, -0.2])).norm() < 1e-14);
}
