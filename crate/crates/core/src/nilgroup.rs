//! The free 2-step nilpotent group `N_p` in exponential coordinates `(z, v)`,
//! the `GL_p` action `(g z g^T, g v)`, and the unitary action of the opposite
//! parabolic on `L^2(N)`.
//!
//! Haar measure is Lebesgue measure in `(z, v)`. Functions on `N` are stored
//! lazily: a [`NilGridFunction`] is a grid plus a source that can be evaluated
//! anywhere, so translations and dilations compose exactly and only the final
//! norm is a quadrature.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gausspoly::GaussPoly;
use crate::liegroups::{m_of, GlElement, GlKind};
use crate::numerics::{GridFunction, GridSpec};
use crate::skewlin::SkewMatrix;
use crate::Complex;

/// Largest coordinate dimension handled on the stack (`p = 9`).
const MAX_DIM: usize = 45;

/// Squared-mass fraction allowed beyond the grid.
pub const TAIL_TOL: f64 = 1e-8;

pub fn dim_n(p: usize) -> usize {
    p * (p - 1) / 2 + p
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NilElement {
    pub z: SkewMatrix,
    pub v: DVector<f64>,
}

impl NilElement {
    pub fn new(z: SkewMatrix, v: DVector<f64>) -> Result<Self> {
        if z.n() != v.len() {
            return Err(Error::Shape(format!("z is {0}x{0} but v has length {1}", z.n(), v.len())));
        }
        Ok(NilElement { z, v })
    }

    pub fn identity(p: usize) -> Self {
        NilElement { z: SkewMatrix::zeros(p), v: DVector::zeros(p) }
    }

    pub fn p(&self) -> usize {
        self.v.len()
    }

    /// Strict upper entries of `z` (row-major), then `v`.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.z.upper();
        c.extend(self.v.iter());
        c
    }

    pub fn from_coords(p: usize, c: &[f64]) -> Result<Self> {
        let m = p * (p - 1) / 2;
        if c.len() != m + p {
            return Err(Error::Shape(format!("{} coordinates for p = {p}", c.len())));
        }
        Ok(NilElement { z: SkewMatrix::from_upper(p, &c[..m])?, v: DVector::from_column_slice(&c[m..]) })
    }

    pub fn m(&self) -> SkewMatrix {
        m_of(&self.z, &self.v).expect("shapes checked at construction")
    }
}

/// `(z1 + z2 + (v1 v2^T - v2 v1^T)/2, v1 + v2)`.
pub fn multiply(a: &NilElement, b: &NilElement) -> Result<NilElement> {
    if a.p() != b.p() {
        return Err(Error::Shape(format!("p = {} times p = {}", a.p(), b.p())));
    }
    let w = SkewMatrix::wedge(&a.v, &b.v)?.scale(0.5);
    let z = a.z.add(&b.z)?.add(&w)?;
    Ok(NilElement { z, v: &a.v + &b.v })
}

pub fn inverse(n: &NilElement) -> NilElement {
    NilElement { z: n.z.scale(-1.0), v: -&n.v }
}

/// Residual of `-M(n0) + h M(n) h^T = M(n0^{-1} n)`, `h = [[I, v0], [0, 1]]`.
pub fn consistency_with_m(n0: &NilElement, n: &NilElement) -> Result<f64> {
    let p = n0.p();
    let mut h = DMatrix::identity(p + 1, p + 1);
    h.view_mut((0, p), (p, 1)).copy_from(&n0.v);
    let lhs = -n0.m().matrix() + &h * n.m().matrix() * h.transpose();
    let rhs = multiply(&inverse(n0), n)?.m();
    Ok((lhs - rhs.matrix()).amax())
}

/// `g . (z, v) = (g z g^T, g v)`.
pub fn gl_action(g: &GlElement, n: &NilElement) -> Result<NilElement> {
    if g.m.nrows() != n.p() {
        return Err(Error::Shape(format!("{}x{} acting on p = {}", g.m.nrows(), g.m.ncols(), n.p())));
    }
    let z = SkewMatrix::from_antisymmetrized(&(&g.m * n.z.matrix() * g.m.transpose()))?;
    Ok(NilElement { z, v: &g.m * &n.v })
}

/// `det(z + v v^T / 2)`.
pub fn q_kernel(z: &SkewMatrix, v: &DVector<f64>) -> f64 {
    (z.matrix() + v * v.transpose() * 0.5).determinant()
}

/// Group operations on flat coordinate slices.
#[derive(Clone, Debug)]
pub struct NilCoords {
    p: usize,
    pairs: Vec<(usize, usize)>,
}

impl NilCoords {
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 || dim_n(p) > MAX_DIM {
            return Err(Error::Dimension(format!("p = {p} outside 1..=9")));
        }
        let pairs = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).collect();
        Ok(NilCoords { p, pairs })
    }

    pub fn dim(&self) -> usize {
        dim_n(self.p)
    }

    pub fn mul(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        let m = self.pairs.len();
        let (va, vb) = (&a[m..], &b[m..]);
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            out[k] = a[k] + b[k] + 0.5 * (va[i] * vb[j] - vb[i] * va[j]);
        }
        for i in 0..self.p {
            out[m + i] = va[i] + vb[i];
        }
    }

    /// `g . x` with `g` row-major `p x p`.
    pub fn act(&self, g: &[f64], x: &[f64], out: &mut [f64]) {
        let (p, m) = (self.p, self.pairs.len());
        let mut z = [0.0; 81];
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            z[i * p + j] = x[k];
            z[j * p + i] = -x[k];
        }
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let mut s = 0.0;
            for a in 0..p {
                let gia = g[i * p + a];
                if gia == 0.0 {
                    continue;
                }
                for b in 0..p {
                    s += gia * z[a * p + b] * g[j * p + b];
                }
            }
            out[k] = s;
        }
        for i in 0..p {
            out[m + i] = (0..p).map(|a| g[i * p + a] * x[m + a]).sum();
        }
    }
}

/// A function on `N_p` that can be evaluated at any coordinate point.
pub trait NilFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Complex;

    /// The closed form behind the function, when there is one.
    fn as_gauss(&self) -> Option<&GaussPoly> {
        None
    }
}

impl NilFunction for GaussPoly {
    fn dim(&self) -> usize {
        GaussPoly::dim(self)
    }

    fn eval(&self, x: &[f64]) -> Complex {
        GaussPoly::eval(self, x)
    }

    fn as_gauss(&self) -> Option<&GaussPoly> {
        Some(self)
    }
}

/// Left translate `x -> f(n0^{-1} x)`.
struct Translated {
    coords: NilCoords,
    n0_inv: Vec<f64>,
    inner: Arc<dyn NilFunction>,
}

impl NilFunction for Translated {
    fn dim(&self) -> usize {
        self.coords.dim()
    }

    fn eval(&self, x: &[f64]) -> Complex {
        let mut y = [0.0; MAX_DIM];
        let y = &mut y[..x.len()];
        self.coords.mul(&self.n0_inv, x, y);
        self.inner.eval(y)
    }
}

/// `x -> amp f(g^{-1} . x)`.
struct Acted {
    coords: NilCoords,
    g_inv: Vec<f64>,
    amp: f64,
    inner: Arc<dyn NilFunction>,
}

impl NilFunction for Acted {
    fn dim(&self) -> usize {
        self.coords.dim()
    }

    fn eval(&self, x: &[f64]) -> Complex {
        let mut y = [0.0; MAX_DIM];
        let y = &mut y[..x.len()];
        self.coords.act(&self.g_inv, x, y);
        self.inner.eval(y) * self.amp
    }
}

/// Separable cubic convolution (Keys, `a = -1/2`) of sampled values; zero
/// outside the grid. Used when no closed form is available.
pub struct CubicInterpolant {
    grid: GridFunction,
}

impl CubicInterpolant {
    pub fn new(grid: GridFunction) -> Self {
        CubicInterpolant { grid }
    }

    fn weight(t: f64) -> f64 {
        let t = t.abs();
        if t < 1.0 {
            (1.5 * t - 2.5) * t * t + 1.0
        } else if t < 2.0 {
            ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0
        } else {
            0.0
        }
    }
}

impl NilFunction for CubicInterpolant {
    fn dim(&self) -> usize {
        self.grid.spec.dim()
    }

    fn eval(&self, x: &[f64]) -> Complex {
        let d = x.len();
        let axes = &self.grid.spec.axes;
        let mut base = [0isize; MAX_DIM];
        let mut w = [[0.0; 4]; MAX_DIM];
        for k in 0..d {
            let ax = &axes[k];
            let u = (x[k] + ax.half_extent) / ax.spacing();
            let j0 = u.floor() as isize;
            base[k] = j0 - 1;
            for (o, wk) in w[k].iter_mut().enumerate() {
                *wk = Self::weight(u - (j0 - 1 + o as isize) as f64);
            }
        }
        let mut acc = Complex::new(0.0, 0.0);
        for combo in 0..4usize.pow(d as u32) {
            let (mut flat, mut wt, mut c) = (0usize, 1.0, combo);
            let mut inside = true;
            for k in 0..d {
                let o = c % 4;
                c /= 4;
                let j = base[k] + o as isize;
                if j < 0 || j >= axes[k].n as isize {
                    inside = false;
                    break;
                }
                wt *= w[k][o];
                flat = flat * axes[k].n + j as usize;
            }
            if inside && wt != 0.0 {
                acc += self.grid.values[flat] * wt;
            }
        }
        acc
    }
}

/// A function on `N_p` together with the grid it is measured on.
#[derive(Clone)]
pub struct NilGridFunction {
    pub p: usize,
    pub spec: GridSpec,
    source: Arc<dyn NilFunction>,
}

impl std::fmt::Debug for NilGridFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NilGridFunction").field("p", &self.p).field("spec", &self.spec).finish_non_exhaustive()
    }
}

impl NilGridFunction {
    pub fn new(p: usize, spec: GridSpec, source: Arc<dyn NilFunction>) -> Result<Self> {
        let d = dim_n(p);
        if spec.dim() != d || source.dim() != d {
            return Err(Error::Shape(format!(
                "p = {p} needs {d} coordinates, grid has {} and source {}",
                spec.dim(),
                source.dim()
            )));
        }
        Ok(NilGridFunction { p, spec, source })
    }

    pub fn from_gauss(p: usize, spec: GridSpec, f: GaussPoly) -> Result<Self> {
        Self::new(p, spec, Arc::new(f))
    }

    /// Wrap sampled values, evaluated off-grid by cubic interpolation.
    pub fn from_samples(p: usize, grid: GridFunction) -> Result<Self> {
        let spec = grid.spec.clone();
        Self::new(p, spec, Arc::new(CubicInterpolant::new(grid)))
    }

    pub fn eval(&self, x: &[f64]) -> Complex {
        self.source.eval(x)
    }

    /// The Gaussian polynomial this function was built from, if any.
    pub fn descriptor(&self) -> Option<&GaussPoly> {
        self.source.as_gauss()
    }

    pub fn source(&self) -> Arc<dyn NilFunction> {
        self.source.clone()
    }

    /// Sample on the grid; fails if more than [`TAIL_TOL`] of the squared
    /// mass is estimated to lie outside it.
    pub fn materialize(&self) -> Result<GridFunction> {
        let src = self.source.clone();
        let g = GridFunction::sample(self.spec.clone(), move |x| src.eval(x));
        let frac = g.tail_estimate();
        if frac > TAIL_TOL {
            return Err(Error::SupportEscape(frac));
        }
        Ok(g)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.materialize()?.norm())
    }
}

/// `(pi(n0) f)(n) = f(n0^{-1} n)`.
pub fn pi_translate(n0: &NilElement, f: &NilGridFunction) -> Result<NilGridFunction> {
    if n0.p() != f.p {
        return Err(Error::Shape(format!("translation by p = {} on p = {}", n0.p(), f.p)));
    }
    let src = Translated { coords: NilCoords::new(f.p)?, n0_inv: inverse(n0).coords(), inner: f.source.clone() };
    NilGridFunction::new(f.p, f.spec.clone(), Arc::new(src))
}

/// `(pi(g) f)(n) = |det g|^{-p/2} f(g^{-1} . n)`.
pub fn pi_gl(g: &GlElement, f: &NilGridFunction) -> Result<NilGridFunction> {
    let p = f.p;
    if g.kind != GlKind::P || g.m.nrows() != p {
        return Err(Error::Shape(format!("need a {p}x{p} element of GL_p")));
    }
    let inv = g.m.clone().try_inverse().ok_or_else(|| Error::Singular("g in pi_gl".into()))?;
    let g_inv = inv.transpose().as_slice().to_vec();
    let amp = g.det().abs().powf(-(p as f64) / 2.0);
    let src = Acted { coords: NilCoords::new(p)?, g_inv, amp, inner: f.source.clone() };
    NilGridFunction::new(p, f.spec.clone(), Arc::new(src))
}
