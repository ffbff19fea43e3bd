use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use super::{cis, lambda_o, probe_residual_chain, reflection_u, require_q2, OperatorOnGrid};
use crate::error::{Error, Result};
use crate::liegroups::{GlElement, GlKind};
use crate::nilgroup::{gl_action, NilElement};
use crate::numerics::Axis;
use crate::orbits::stabilizer_check;
use crate::Complex;

/// Generators of `SL(2, R) = Sp(1, R)`, the stabilizer of the base point at `q = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SlGenerator {
    Identity,
    /// `diag(a, 1/a)`, acting by `psi(x) -> |a|^{-1/2} psi(x / a)`.
    Dilation(f64),
    /// `[[1, 0], [-b, 1]]`, acting by the chirp `exp(pi i b x^2)`.
    Shear(f64),
    /// `J = [[0, 1], [-1, 0]]`, acting by the Fourier transform with kernel `exp(2 pi i x xi)`.
    Rotation,
}

impl SlGenerator {
    pub fn matrix(&self) -> DMatrix<f64> {
        match *self {
            SlGenerator::Identity => DMatrix::identity(2, 2),
            SlGenerator::Dilation(a) => DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, 1.0 / a]),
            SlGenerator::Shear(b) => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -b, 1.0]),
            SlGenerator::Rotation => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        }
    }

    /// `diag(A, 1)` in `GL_3`.
    pub fn embed(&self) -> DMatrix<f64> {
        embed_sl2(&self.matrix())
    }
}

fn embed_sl2(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut g = DMatrix::identity(3, 3);
    g.view_mut((0, 0), (2, 2)).copy_from(a);
    g
}

/// Band-limited dilation `psi -> |a|^{-1/2} psi(x / a)`: the trigonometric
/// interpolant of the samples, with the Nyquist mode split as a cosine so
/// that real even data stay real and even.
fn dilation(axis: Axis, a: f64) -> OperatorOnGrid {
    let n = axis.n;
    let l = axis.half_extent;
    let amp = a.abs().powf(-0.5);
    let basis = |theta: f64| {
        let half = 0.5 * theta;
        let dirichlet = if half.sin().abs() < 1e-12 {
            // theta on a multiple of 2 pi, where every mode equals 1
            (n - 1) as f64
        } else {
            ((n as f64 - 1.0) * half).sin() / half.sin()
        };
        (dirichlet + (0.5 * n as f64 * theta).cos()) / n as f64
    };
    let pts = axis.points();
    let entry = |x: f64, j: usize| amp * basis(PI * (x / a - pts[j]) / l);
    // row 0 sits at -L, which the grid also reads as +L; averaging the two
    // keeps the matrix commuting with the reflection
    let matrix = DMatrix::from_fn(n, n, |k, j| {
        let v = if k == 0 { 0.5 * (entry(-l, j) + entry(l, j)) } else { entry(pts[k], j) };
        Complex::new(v, 0.0)
    });
    OperatorOnGrid { axis, matrix }
}

fn chirp(axis: Axis, b: f64) -> OperatorOnGrid {
    OperatorOnGrid::multiplication(axis, |x| cis(0.5 * b * x * x))
}

/// Centered transform with kernel `exp(2 pi i x xi)`; needs `xi_k = x_k`.
fn fourier_j(axis: Axis) -> Result<OperatorOnGrid> {
    if !axis.is_self_dual() {
        return Err(Error::Precondition(format!(
            "the rotation needs a self-dual grid (N = 4 L^2), got N = {}, L = {}",
            axis.n, axis.half_extent
        )));
    }
    let h = axis.spacing();
    let pts = axis.points();
    let matrix = DMatrix::from_fn(axis.n, axis.n, |j, k| cis(pts[j] * pts[k]) * h);
    Ok(OperatorOnGrid { axis, matrix })
}

/// `tau(g~)` for one generator. The sign of the double cover is fixed to `+1`;
/// it cancels in every conjugation.
pub fn metaplectic(gen: SlGenerator, axis: Axis) -> Result<OperatorOnGrid> {
    match gen {
        SlGenerator::Identity => Ok(OperatorOnGrid::identity(axis)),
        SlGenerator::Dilation(a) => {
            if !(a.is_finite() && a != 0.0) {
                return Err(Error::Precondition(format!("dilation by {a}")));
            }
            Ok(dilation(axis, a))
        }
        SlGenerator::Shear(b) => Ok(chirp(axis, b)),
        SlGenerator::Rotation => fourier_j(axis),
    }
}

/// `tau(A)` for any `A` in `SL(2, R)`, through `A = L(l) D(a) U(u)` with
/// `U(u) = J L(-u) J^{-1}`, or `A = (A J^{-1}) J` when `A_11` is small.
pub fn metaplectic_sl2(a: &DMatrix<f64>, axis: Axis) -> Result<OperatorOnGrid> {
    if a.shape() != (2, 2) || (a.determinant() - 1.0).abs() > 1e-9 * a.norm_squared().max(1.0) {
        return Err(Error::Precondition(format!("not an element of SL(2): {a}")));
    }
    let j = fourier_j(axis)?;
    if a[(0, 0)].abs() < 0.25 * a.amax() {
        let jinv = SlGenerator::Rotation.matrix().transpose();
        return metaplectic_sl2(&(a * jinv), axis)?.compose(&j);
    }
    let d = a[(0, 0)];
    let l = a[(1, 0)] / d;
    let u = a[(0, 1)] / d;
    let upper = j.clone().postmultiply_diag(|x| cis(0.5 * u * x * x)).compose(&j.adjoint())?;
    dilation(axis, d).premultiply_diag(|x| cis(-0.5 * l * x * x)).compose(&upper)
}

/// Probe residual of `tau(g~) lambda_o(n) tau(g~)* = lambda_o(g . n)`.
pub fn covariance_check(gen: SlGenerator, n: &NilElement, axis: Axis) -> Result<f64> {
    require_q2(n)?;
    let g = gen.embed();
    let st = stabilizer_check(&g)?;
    if !st.pass {
        return Err(Error::Precondition(format!("{gen:?} does not fix the base point")));
    }
    let tau = metaplectic(gen, axis)?;
    let gn = gl_action(&GlElement::new(g, GlKind::P)?, n)?;
    probe_residual_chain(&[&tau, &lambda_o(n, axis)?, &tau.adjoint()], &[&lambda_o(&gn, axis)?])
}

/// `|[tau(g~), U]|_HS` for each generator.
pub fn parity_check(gens: &[SlGenerator], axis: Axis) -> Result<Vec<f64>> {
    let u = reflection_u(axis)?;
    gens.iter()
        .map(|&g| {
            let t = metaplectic(g, axis)?;
            Ok(t.compose(&u)?.sub(&u.compose(&t)?)?.hs_norm())
        })
        .collect()
}
