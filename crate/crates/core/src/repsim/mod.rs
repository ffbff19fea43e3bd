//! Finite models of the orbit-method representations of `N` at `q = 2`.
//!
//! Here `L^2(R^{q-1}) = L^2(R)` is sampled on a symmetric grid and every
//! operator is a dense complex matrix. With the group law of
//! [`crate::nilgroup`] the representation attached to the base point is
//!
//! ```text
//! lambda_o(z, v) psi(x) = exp(2 pi i (z12 + v2 x + v1 v2 / 2 + v3 / 2)) psi(x + v1)
//! ```
//!
//! induced from the polarization spanned by everything except `v1`.
//! Translations are Fourier multipliers, so they are exactly unitary on the
//! grid; products of translations and modulations are only exact on
//! functions that stay inside the grid, which is why operator identities
//! are measured on the localized [`probes`].

mod fourier;
mod metaplectic;
mod schur;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nilgroup::NilElement;
use crate::numerics::Axis;
use crate::skewlin::{block_j, SkewMatrix};
use crate::Complex;

pub use fourier::{group_fourier, partial_integral, partial_integral_twisted, trace_check, weyl_kernel, TraceCheck};
pub use metaplectic::{covariance_check, metaplectic, metaplectic_sl2, parity_check, SlGenerator};
pub use schur::{o_representative, orbit_section, sample_o, schur_experiment, SchurReport, MIN_ORBITS};

fn cis(t: f64) -> Complex {
    Complex::from_polar(1.0, 2.0 * PI * t)
}

/// A dense operator on samples of a function on `[-L, L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorOnGrid {
    pub axis: Axis,
    pub matrix: DMatrix<Complex>,
}

impl OperatorOnGrid {
    pub fn identity(axis: Axis) -> Self {
        OperatorOnGrid { axis, matrix: DMatrix::identity(axis.n, axis.n) }
    }

    /// Multiplication by `m(x_j)`.
    pub fn multiplication<F: Fn(f64) -> Complex>(axis: Axis, m: F) -> Self {
        let d = DVector::from_iterator(axis.n, axis.points().into_iter().map(m));
        OperatorOnGrid { axis, matrix: DMatrix::from_diagonal(&d) }
    }

    /// Fourier multiplier with symbol `s(xi)`, for the transform with kernel
    /// `exp(-2 pi i x xi)`. The symbol `exp(2 pi i a xi)` is the periodic
    /// shift `psi(x) -> psi(x + a)`.
    pub fn multiplier<F: Fn(f64) -> Complex>(axis: Axis, s: F) -> Self {
        let n = axis.n;
        let mut col: Vec<Complex> = (0..n).map(|m| s(axis.frequency(m))).collect();
        // col[d] = (1/n) sum_m s_m exp(2 pi i (m - n/2) d / n); entry (j, k) uses d = j - k mod n
        rustfft::FftPlanner::new().plan_fft_inverse(n).process(&mut col);
        for (d, c) in col.iter_mut().enumerate() {
            *c *= if d % 2 == 0 { 1.0 } else { -1.0 } / n as f64;
        }
        let matrix = DMatrix::from_fn(n, n, |j, k| col[(j + n - k) % n]);
        OperatorOnGrid { axis, matrix }
    }

    /// `diag(m(x_j)) * self` without a matrix product.
    pub fn premultiply_diag<F: Fn(f64) -> Complex>(mut self, m: F) -> Self {
        for (j, x) in self.axis.points().into_iter().enumerate() {
            let f = m(x);
            self.matrix.row_mut(j).iter_mut().for_each(|c| *c *= f);
        }
        self
    }

    /// `self * diag(m(x_k))` without a matrix product.
    pub fn postmultiply_diag<F: Fn(f64) -> Complex>(mut self, m: F) -> Self {
        for (k, x) in self.axis.points().into_iter().enumerate() {
            let f = m(x);
            self.matrix.column_mut(k).iter_mut().for_each(|c| *c *= f);
        }
        self
    }

    pub fn translation(axis: Axis, a: f64) -> Self {
        Self::multiplier(axis, |xi| cis(a * xi))
    }

    fn check(&self, other: &OperatorOnGrid) -> Result<()> {
        if self.axis != other.axis {
            return Err(Error::Shape("operators on different grids".into()));
        }
        Ok(())
    }

    /// `self * other`.
    pub fn compose(&self, other: &OperatorOnGrid) -> Result<Self> {
        self.check(other)?;
        Ok(OperatorOnGrid { axis: self.axis, matrix: &self.matrix * &other.matrix })
    }

    pub fn adjoint(&self) -> Self {
        OperatorOnGrid { axis: self.axis, matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, c: Complex) -> Self {
        OperatorOnGrid { axis: self.axis, matrix: &self.matrix * c }
    }

    pub fn sub(&self, other: &OperatorOnGrid) -> Result<Self> {
        self.check(other)?;
        Ok(OperatorOnGrid { axis: self.axis, matrix: &self.matrix - &other.matrix })
    }

    pub fn apply(&self, psi: &DVector<Complex>) -> DVector<Complex> {
        &self.matrix * psi
    }

    /// Largest entry of `A* A - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.matrix.adjoint() * &self.matrix;
        let n = self.axis.n;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm())
            .fold(0.0, f64::max)
    }

    /// Hilbert-Schmidt norm of the sampled operator. A kernel `K` sampled as
    /// `h K(x_j, x_k)` has the Frobenius norm of its matrix.
    pub fn hs_norm(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex {
        self.matrix.diagonal().iter().sum()
    }

    /// `max_psi |(A - B) psi| / |psi|` over [`probes`].
    pub fn probe_residual(&self, other: &OperatorOnGrid) -> Result<f64> {
        self.check(other)?;
        let d = &self.matrix - &other.matrix;
        Ok(probes(&self.axis).iter().map(|p| (&d * p).norm() / p.norm()).fold(0.0, f64::max))
    }

    /// `|A psi - psi|` over probes, the distance from the identity.
    pub fn identity_residual(&self) -> f64 {
        self.probe_residual(&Self::identity(self.axis)).expect("same grid")
    }
}

/// `max_psi |(A_1 .. A_k - B_1 .. B_m) psi| / |psi|` over [`probes`], applying
/// the factors to vectors instead of multiplying matrices.
pub fn probe_residual_chain(lhs: &[&OperatorOnGrid], rhs: &[&OperatorOnGrid]) -> Result<f64> {
    let axis = lhs.first().or(rhs.first()).map(|o| o.axis).ok_or_else(|| Error::Shape("empty products".into()))?;
    if lhs.iter().chain(rhs).any(|o| o.axis != axis) {
        return Err(Error::Shape("operators on different grids".into()));
    }
    let run = |ops: &[&OperatorOnGrid], p: &DVector<Complex>| ops.iter().rev().fold(p.clone(), |v, o| o.apply(&v));
    Ok(probes(&axis).iter().map(|p| (run(lhs, p) - run(rhs, p)).norm() / p.norm()).fold(0.0, f64::max))
}

pub fn sample<F: Fn(f64) -> Complex>(axis: &Axis, f: F) -> DVector<Complex> {
    DVector::from_iterator(axis.n, axis.points().into_iter().map(f))
}

/// Localized test vectors: Gaussians of three widths, shifted and modulated,
/// plus an odd one. All of them are negligible beyond `|x| = L/2` when
/// `L >= 6`.
pub fn probes(axis: &Axis) -> Vec<DVector<Complex>> {
    let g = |a: f64, c: f64, b: f64, odd: bool| {
        sample(axis, move |x| {
            let amp = (-PI * a * (x - c) * (x - c)).exp() * if odd { x - c } else { 1.0 };
            cis(b * x) * amp
        })
    };
    vec![
        g(1.0, 0.0, 0.0, false),
        g(0.6, 0.7, 0.0, false),
        g(1.8, -1.1, 0.6, false),
        g(1.0, 0.3, -0.4, false),
        g(0.8, 0.0, 0.0, true),
        g(1.3, -0.5, 0.3, true),
    ]
}

/// `U psi(x) = psi(-x)`. The point `-L` is its own mirror.
pub fn reflection_u(axis: Axis) -> Result<OperatorOnGrid> {
    if axis.n % 2 != 0 {
        return Err(Error::Precondition("reflection needs a grid symmetric about 0".into()));
    }
    let n = axis.n;
    let matrix = DMatrix::from_fn(n, n, |j, k| if k == axis.mirror(j) { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) });
    Ok(OperatorOnGrid { axis, matrix })
}

fn require_q2(n: &NilElement) -> Result<()> {
    if n.p() != 3 {
        return Err(Error::Unsupported(format!("grid representations only for q = 2, got p = {}", n.p())));
    }
    Ok(())
}

/// `lambda_o(n)` on the grid. Errors when the translation part moves the
/// probes more than a quarter of the grid.
pub fn lambda_o(n: &NilElement, axis: Axis) -> Result<OperatorOnGrid> {
    require_q2(n)?;
    let (z12, v1, v2, v3) = (n.z.matrix()[(0, 1)], n.v[0], n.v[1], n.v[2]);
    if v1.abs() > 0.25 * axis.half_extent {
        return Err(Error::SupportEscape(v1.abs() / axis.half_extent));
    }
    let phase = z12 + 0.5 * v1 * v2 + 0.5 * v3;
    Ok(OperatorOnGrid::translation(axis, v1).premultiply_diag(|x| cis(phase + v2 * x)))
}

/// `n = n0 + h` with `h` the Heisenberg algebra of the base point.
#[derive(Clone, Debug, Serialize)]
pub struct HeisenbergSplit {
    pub q: usize,
    /// `z_o`, then `X_1..X_{q-1}`, then `Y_1..Y_{q-1}`.
    pub h_basis: Vec<NilElement>,
    /// An orthonormal basis of `z_o^perp` in `X_p`, then `e_p` (the direction of `v_o`).
    pub n0_basis: Vec<NilElement>,
    /// `B(X_i, Y_j) = <o, [X_i, Y_j]>` on the `X/Y` span, in the order of `h_basis`.
    pub pairing: DMatrix<f64>,
    /// The same form on all of `R^p`.
    pub pairing_rp: DMatrix<f64>,
}

/// `<n, n'> = (1/2) Tr M(n) M(n')^T`: entrywise on `z`, `v.v' / 4` on `v`.
pub fn inner_n(a: &NilElement, b: &NilElement) -> f64 {
    a.z.upper().iter().zip(b.z.upper()).map(|(x, y)| x * y).sum::<f64>() + a.v.dot(&b.v) / 4.0
}

/// The `z` part of the group commutator, which is the Lie bracket of two
/// vectors: `v v'^T - v' v^T`.
fn bracket_v(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    a * b.transpose() - b * a.transpose()
}

pub fn heisenberg_split(q: usize) -> Result<HeisenbergSplit> {
    if q < 2 {
        return Err(Error::Dimension("the Heisenberg splitting needs q >= 2".into()));
    }
    let p = 2 * q - 1;
    let o = crate::orbits::base_point(q)?;
    let zo = o.z.clone();
    let vec_el = |i: usize| {
        let mut v = DVector::zeros(p);
        v[i] = 1.0;
        NilElement::new(SkewMatrix::zeros(p), v).expect("shapes agree")
    };
    let z_el = |z: SkewMatrix| NilElement::new(z, DVector::zeros(p)).expect("shapes agree");

    let mut h_basis = vec![z_el(zo.clone())];
    h_basis.extend((0..q - 1).map(|i| vec_el(2 * i)));
    h_basis.extend((0..q - 1).map(|i| vec_el(2 * i + 1)));

    // z_o^perp: entries off the J blocks, plus a Helmert basis of the
    // block entries orthogonal to (1, .., 1)
    let mut n0_basis = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            let in_block = j == i + 1 && i % 2 == 0 && j < p - 1;
            if !in_block {
                let mut m = DMatrix::zeros(p, p);
                m[(i, j)] = 1.0;
                m[(j, i)] = -1.0;
                n0_basis.push(z_el(SkewMatrix::new(m)?));
            }
        }
    }
    for k in 1..q - 1 {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut m = DMatrix::zeros(p, p);
        for b in 0..k {
            m[(2 * b, 2 * b + 1)] = 1.0 / norm;
            m[(2 * b + 1, 2 * b)] = -1.0 / norm;
        }
        m[(2 * k, 2 * k + 1)] = -(k as f64) / norm;
        m[(2 * k + 1, 2 * k)] = k as f64 / norm;
        n0_basis.push(z_el(SkewMatrix::new(m)?));
    }
    n0_basis.push(vec_el(p - 1));

    let zo_m = block_j(q - 1, p);
    let pair = |a: &DVector<f64>, b: &DVector<f64>| {
        let z = SkewMatrix::new(bracket_v(a, b)).expect("bracket is skew");
        crate::skewlin::inner(&zo_m, &z).expect("same size")
    };
    let xy: Vec<&NilElement> = h_basis[1..].iter().collect();
    let m = xy.len();
    let pairing = DMatrix::from_fn(m, m, |i, j| pair(&xy[i].v, &xy[j].v));
    let e = |i: usize| {
        let mut v = DVector::zeros(p);
        v[i] = 1.0;
        v
    };
    let pairing_rp = DMatrix::from_fn(p, p, |i, j| pair(&e(i), &e(j)));
    Ok(HeisenbergSplit { q, h_basis, n0_basis, pairing, pairing_rp })
}

impl HeisenbergSplit {
    /// Largest `|<a, b>|` between an `h` and an `n0` basis vector, and
    /// `|<a, b> - delta|` within the orthonormal part of `n0`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for a in &self.h_basis {
            for b in &self.n0_basis {
                r = r.max(inner_n(a, b).abs());
            }
        }
        let k = self.n0_basis.len() - 1;
        for i in 0..k {
            for j in 0..k {
                let d = if i == j { 1.0 } else { 0.0 };
                r = r.max((inner_n(&self.n0_basis[i], &self.n0_basis[j]) - d).abs());
            }
        }
        r
    }

    /// `|B(e_p, .)|` on `R^p`, which vanishes because `z_o v_o = 0`.
    pub fn radical_residual(&self) -> f64 {
        let p = self.pairing_rp.nrows();
        self.pairing_rp.row(p - 1).amax()
    }
}
