use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::{Complex, Error, Result};

/// Gauss rule for `int_0^1 u^beta g(u) du`.
#[derive(Clone, Debug)]
pub struct JacobiRule {
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl JacobiRule {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        let (x, w) = gauss_jacobi(n, 0.0, beta)?;
        let scale = 0.5f64.powf(beta + 1.0);
        Ok(JacobiRule {
            beta,
            nodes: x.iter().map(|x| 0.5 * (1.0 + x)).collect(),
            weights: w.iter().map(|w| w * scale).collect(),
        })
    }

    /// `int_0^c u^beta g(u) du`.
    pub fn apply<F: Fn(f64) -> Complex>(&self, c: f64, g: F) -> Complex {
        let s: Complex = self.nodes.iter().zip(&self.weights).map(|(u, w)| g(c * u) * *w).sum();
        s * c.powf(self.beta + 1.0)
    }
}

/// Golub-Welsch nodes and weights on `[-1, 1]` for `(1-x)^alpha (1+x)^beta`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::Precondition(format!(
            "gauss_jacobi needs n >= 1 and exponents > -1, got n={n}, alpha={alpha}, beta={beta}"
        )));
    }
    let ab = alpha + beta;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        t[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k > 0 {
            let c = 2.0 * kf + ab;
            let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
            let den = c * c * (c + 1.0) * (c - 1.0);
            let b = (num / den).sqrt();
            t[(k, k - 1)] = b;
            t[(k - 1, k)] = b;
        }
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0.0, 0.0).expect("legendre parameters are valid")
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64) -> (Complex, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss-Kronrod 7/15 on a finite interval, absolute tolerance.
pub fn gauss_kronrod<F: Fn(f64) -> Complex>(f: F, a: f64, b: f64, tol: f64) -> Complex {
    fn rec<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Complex {
        let (v, e) = gk15(f, a, b);
        if e <= tol || depth >= 40 || (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return Complex::new(0.0, 0.0);
    }
    rec(&f, a, b, tol, 0)
}

/// `int_0^c u^s g(u) du`, refining toward 0 until two Jacobi orders agree.
fn endpoint_piece<F: Fn(f64) -> Complex>(
    g: &F,
    s: f64,
    c: f64,
    tol: f64,
    coarse: &JacobiRule,
    fine: &JacobiRule,
    depth: u32,
) -> Complex {
    let v1 = fine.apply(c, g);
    let v0 = coarse.apply(c, g);
    if (v1 - v0).norm() <= tol || depth >= 30 {
        return v1;
    }
    let m = 0.5 * c;
    endpoint_piece(g, s, m, 0.5 * tol, coarse, fine, depth + 1)
        + gauss_kronrod(|u| g(u) * u.powf(s), m, c, 0.5 * tol)
}

/// `int_a^b |t|^s f(t) dt` for `s > -1`.
///
/// Pieces that touch `t = 0` use a Gauss-Jacobi rule with weight `u^s`;
/// everything else is adaptive Gauss-Kronrod.
pub fn quad_singular<F: Fn(f64) -> Complex>(f: F, s: f64, a: f64, b: f64, tol: f64) -> Result<Complex> {
    if !(s > -1.0) {
        return Err(Error::Guard(format!("|t|^s with s = {s} is not locally integrable")));
    }
    if a > b {
        return quad_singular(f, s, b, a, tol).map(|v| -v);
    }
    let weighted = |t: f64| f(t) * t.abs().powf(s);
    if a > 0.0 || b < 0.0 {
        return Ok(gauss_kronrod(weighted, a, b, tol));
    }
    let coarse = JacobiRule::new(20, s)?;
    let fine = JacobiRule::new(32, s)?;
    let mut total = Complex::new(0.0, 0.0);
    for (sign, c) in [(1.0, b), (-1.0, -a)] {
        if c <= 0.0 {
            continue;
        }
        let c0 = c.min(1.0);
        let g = |u: f64| f(sign * u);
        total += endpoint_piece(&g, s, c0, 0.25 * tol, &coarse, &fine, 0);
        if c > c0 {
            total += gauss_kronrod(|u| g(u) * u.powf(s), c0, c, 0.25 * tol);
        }
    }
    Ok(total)
}

/// Real-valued convenience wrapper around [`quad_singular`].
pub fn quad_singular_real<F: Fn(f64) -> f64>(f: F, s: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    quad_singular(|t| Complex::new(f(t), 0.0), s, a, b, tol).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;
    use std::f64::consts::PI;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_moments() {
        for beta in [-0.7, -0.5, 0.0, 0.3, 1.7] {
            let r = JacobiRule::new(12, beta).unwrap();
            for k in 0..10 {
                let v = r.apply(1.0, |u| Complex::new(u.powi(k), 0.0)).re;
                assert!((v - 1.0 / (beta + k as f64 + 1.0)).abs() < 1e-13, "beta {beta} k {k}");
            }
        }
    }

    #[test]
    fn half_power_on_symmetric_interval() {
        let v = quad_singular_real(|_| 1.0, 0.5, -1.0, 1.0, 1e-12).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_moments_match_gamma() {
        for s in [-0.9, -0.5, 0.0, 0.7, 2.3] {
            let v = quad_singular_real(|t| (-PI * t * t).exp(), s, -9.0, 9.0, 1e-12).unwrap();
            let exact = gamma((s + 1.0) / 2.0) * PI.powf(-(s + 1.0) / 2.0);
            assert!((v - exact).abs() < 1e-10, "s={s}: {v} vs {exact}");
        }
    }

    #[test]
    fn rejects_nonintegrable_power() {
        assert!(quad_singular_real(|_| 1.0, -1.0, -1.0, 1.0, 1e-10).is_err());
    }
}
