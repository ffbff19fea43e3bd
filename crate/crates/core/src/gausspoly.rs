//! Polynomials times centered Gaussians, `P(x) exp(-pi sum a_i x_i^2)`.
//!
//! The class is closed under the Fourier transform (kernel `e^{2 pi i x.xi}`),
//! differentiation, dilation, and integration or evaluation in a single
//! coordinate, which makes it the closed-form test-function family for the
//! high-dimensional checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::special::rgamma;
use crate::Complex;

const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussPoly {
    widths: Vec<f64>,
    terms: BTreeMap<Vec<u32>, Complex>,
}

impl GaussPoly {
    /// `exp(-pi sum a_i x_i^2)`.
    pub fn gaussian(widths: Vec<f64>) -> Result<Self> {
        Self::monomial(widths, vec![], Complex::new(1.0, 0.0))
    }

    /// `c x^k exp(-pi sum a_i x_i^2)`; a short `k` is padded with zeros.
    pub fn monomial(widths: Vec<f64>, mut k: Vec<u32>, c: Complex) -> Result<Self> {
        if widths.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Precondition(format!("Gaussian widths must be positive, got {widths:?}")));
        }
        if k.len() > widths.len() {
            return Err(Error::Shape(format!("exponent of length {} for dimension {}", k.len(), widths.len())));
        }
        k.resize(widths.len(), 0);
        let mut terms = BTreeMap::new();
        if c != ZERO {
            terms.insert(k, c);
        }
        Ok(GaussPoly { widths, terms })
    }

    pub fn dim(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    fn push(terms: &mut BTreeMap<Vec<u32>, Complex>, k: Vec<u32>, c: Complex) {
        let e = terms.entry(k).or_insert(ZERO);
        *e += c;
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, c| *c != ZERO);
        self
    }

    pub fn eval(&self, x: &[f64]) -> Complex {
        debug_assert_eq!(x.len(), self.dim());
        let q: f64 = x.iter().zip(&self.widths).map(|(x, a)| a * x * x).sum();
        let mut p = ZERO;
        for (k, c) in &self.terms {
            let mono: f64 = k.iter().zip(x).map(|(&e, x)| x.powi(e as i32)).product();
            p += c * mono;
        }
        p * (-PI * q).exp()
    }

    pub fn add(&self, other: &GaussPoly) -> Result<GaussPoly> {
        if self.widths != other.widths {
            return Err(Error::Unsupported("sum of Gaussian polynomials with different widths".into()));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            Self::push(&mut out.terms, k.clone(), *c);
        }
        Ok(out.prune())
    }

    pub fn scale(&self, c: Complex) -> GaussPoly {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|v| *v *= c);
        out.prune()
    }

    /// `x_i^m f`.
    pub fn mul_coordinate(&self, i: usize, m: u32) -> GaussPoly {
        let mut out = GaussPoly { widths: self.widths.clone(), terms: BTreeMap::new() };
        for (k, c) in &self.terms {
            let mut k = k.clone();
            k[i] += m;
            out.terms.insert(k, *c);
        }
        out
    }

    /// `d f / d x_i`.
    pub fn derivative(&self, i: usize) -> GaussPoly {
        let a = self.widths[i];
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k[i] > 0 {
                let mut d = k.clone();
                d[i] -= 1;
                Self::push(&mut terms, d, c * k[i] as f64);
            }
            let mut u = k.clone();
            u[i] += 1;
            Self::push(&mut terms, u, c * (-2.0 * PI * a));
        }
        GaussPoly { widths: self.widths.clone(), terms }.prune()
    }

    /// `f(-x)`.
    pub fn reflect(&self) -> GaussPoly {
        let mut out = self.clone();
        for (k, c) in out.terms.iter_mut() {
            if k.iter().sum::<u32>() % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// `f(c x)`.
    pub fn dilate(&self, c: f64) -> Result<GaussPoly> {
        if !(c.is_finite() && c != 0.0) {
            return Err(Error::Precondition(format!("dilation factor {c}")));
        }
        let widths = self.widths.iter().map(|a| a * c * c).collect();
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c.powi(k.iter().sum::<u32>() as i32))).collect();
        Ok(GaussPoly { widths, terms })
    }

    /// `f(x_1, .., c x_i, ..)`.
    pub fn dilate_axis(&self, i: usize, c: f64) -> Result<GaussPoly> {
        if !(c.is_finite() && c != 0.0) {
            return Err(Error::Precondition(format!("dilation factor {c}")));
        }
        let mut widths = self.widths.clone();
        widths[i] *= c * c;
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c.powi(k[i] as i32))).collect();
        Ok(GaussPoly { widths, terms })
    }

    /// Fourier transform in coordinate `i` only: `int f(.., x_i, ..) e^{2 pi i x_i xi} dx_i`.
    pub fn fourier_axis(&self, i: usize) -> GaussPoly {
        let a = self.widths[i];
        let kmax = self.terms.keys().map(|k| k[i]).max().unwrap_or(0);
        // FT of x^k e^{-pi a x^2} is a^{-1/2} (2 pi i)^{-k} H_k(xi) e^{-pi xi^2/a},
        // H_0 = 1, H_{k+1} = H_k' - (2 pi / a) xi H_k.
        let mut h: Vec<Vec<f64>> = vec![vec![1.0]];
        for k in 0..kmax as usize {
            let prev = &h[k];
            let mut next = vec![0.0; prev.len() + 1];
            for (j, c) in prev.iter().enumerate() {
                if j > 0 {
                    next[j - 1] += c * j as f64;
                }
                next[j + 1] -= 2.0 * PI / a * c;
            }
            h.push(next);
        }
        let two_pi_i = Complex::new(0.0, 2.0 * PI);
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let ki = k[i] as usize;
            let pref = c * a.powf(-0.5) * two_pi_i.powi(-(ki as i32));
            for (j, hc) in h[ki].iter().enumerate() {
                if *hc != 0.0 {
                    let mut m = k.clone();
                    m[i] = j as u32;
                    Self::push(&mut terms, m, pref * hc);
                }
            }
        }
        let mut widths = self.widths.clone();
        widths[i] = 1.0 / a;
        GaussPoly { widths, terms }.prune()
    }

    /// Full Fourier transform with kernel `e^{2 pi i x.xi}`.
    pub fn fourier(&self) -> GaussPoly {
        (0..self.dim()).fold(self.clone(), |f, i| f.fourier_axis(i))
    }

    /// `int f dx_i`, dropping coordinate `i`.
    pub fn integrate_axis(&self, i: usize) -> GaussPoly {
        let a = self.widths[i];
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k[i] % 2 == 1 {
                continue;
            }
            let m = (k[i] / 2) as f64 + 0.5;
            // int x^{2j} e^{-pi a x^2} = Gamma(j + 1/2) / (pi a)^{j + 1/2}
            let moment = 1.0 / (rgamma(m) * (PI * a).powf(m));
            let mut r = k.clone();
            r.remove(i);
            Self::push(&mut terms, r, c * moment);
        }
        let mut widths = self.widths.clone();
        widths.remove(i);
        GaussPoly { widths, terms }.prune()
    }

    /// `int f dx` over all of R^d.
    pub fn integral(&self) -> Complex {
        let mut f = self.clone();
        while f.dim() > 0 {
            f = f.integrate_axis(f.dim() - 1);
        }
        f.terms.get(&Vec::new()).copied().unwrap_or(ZERO)
    }

    /// Restriction `x_i = t`, dropping coordinate `i`.
    pub fn evaluate_axis(&self, i: usize, t: f64) -> GaussPoly {
        let g = (-PI * self.widths[i] * t * t).exp();
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let mut r = k.clone();
            r.remove(i);
            Self::push(&mut terms, r, c * g * t.powi(k[i] as i32));
        }
        let mut widths = self.widths.clone();
        widths.remove(i);
        GaussPoly { widths, terms }.prune()
    }

    /// `||f||_2^2` in closed form.
    pub fn norm_sqr(&self) -> f64 {
        let mut terms = BTreeMap::new();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &self.terms {
                let k: Vec<u32> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                Self::push(&mut terms, k, c1.conj() * c2);
            }
        }
        let widths = self.widths.iter().map(|a| 2.0 * a).collect();
        GaussPoly { widths, terms }.integral().re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_dual_gaussian() {
        let g = GaussPoly::gaussian(vec![1.0, 1.0]).unwrap();
        assert_eq!(g.fourier(), g);
    }

    #[test]
    fn integral_of_even_moment() {
        // int x^2 e^{-pi x^2} = 1 / (2 pi)
        let f = GaussPoly::monomial(vec![1.0], vec![2], Complex::new(1.0, 0.0)).unwrap();
        assert!((f.integral().re - 0.5 / PI).abs() < 1e-15);
        assert_eq!(f.mul_coordinate(0, 1).integral(), ZERO);
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = GaussPoly::gaussian(vec![2.0]).unwrap();
        let d = g.derivative(0);
        let x = 0.3;
        let expect = -4.0 * PI * x * (-2.0 * PI * x * x).exp();
        assert!((d.eval(&[x]).re - expect).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(GaussPoly::gaussian(vec![0.0]).is_err());
        assert!(GaussPoly::monomial(vec![1.0], vec![1, 2], Complex::new(1.0, 0.0)).is_err());
    }
}
