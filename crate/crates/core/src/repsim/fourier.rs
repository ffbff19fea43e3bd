use serde::Serialize;

use super::{cis, OperatorOnGrid};
use crate::error::{Error, Result};
use crate::gausspoly::GaussPoly;
use crate::nilgroup::NilGridFunction;
use crate::numerics::{gauss_legendre, Axis};
use crate::orbits::OrbitPoint;
use crate::Complex;

use super::schur::orbit_section;

// Coordinates on n at p = 3: z12, z13, z23, v1, v2, v3.
const Z12: usize = 0;
const Z13: usize = 1;
const Z23: usize = 2;
const V3: usize = 5;

fn q2_descriptor(f: &NilGridFunction) -> Result<&GaussPoly> {
    if f.p != 3 {
        return Err(Error::Unsupported(format!("Heisenberg reduction only for q = 2, got p = {}", f.p)));
    }
    f.descriptor().ok_or_else(|| Error::Unsupported("needs a Gaussian-polynomial descriptor".into()))
}

/// `F(t, x, y) = int_{n0} f`, with `h` coordinates `(z12, v1, v2)` and `n0`
/// coordinates `(z13, z23, v3)`.
pub fn partial_integral(f: &NilGridFunction) -> Result<GaussPoly> {
    let g = q2_descriptor(f)?;
    Ok(g.integrate_axis(V3).integrate_axis(Z23).integrate_axis(Z13))
}

/// The same integral against the character of `o` on `n0`, `exp(2 pi i v3 / 2)`.
/// This is the reduction that `lambda_o` sees, since `<o, v3> = 1/2` for the
/// inner product pulled back by `M`.
pub fn partial_integral_twisted(f: &NilGridFunction) -> Result<GaussPoly> {
    let g = q2_descriptor(f)?;
    Ok(twist(g))
}

fn twist(g: &GaussPoly) -> GaussPoly {
    g.fourier_axis(V3).evaluate_axis(V3, 0.5).integrate_axis(Z23).integrate_axis(Z13)
}

/// The operator with kernel
/// `K(x, y) = int exp(2 pi i (u (x + y) / 2 + t)) F(t, y - x, u) du dt`,
/// sampled as `h K(x_j, x_k)`. `F` is a function of `(t, x, y)`.
pub fn weyl_kernel(f: &GaussPoly, axis: Axis) -> Result<OperatorOnGrid> {
    if f.dim() != 3 {
        return Err(Error::Shape(format!("kernel input has {} coordinates, expected 3", f.dim())));
    }
    let g = f.fourier_axis(0).evaluate_axis(0, 1.0).fourier_axis(1);
    let pts = axis.points();
    let h = axis.spacing();
    let matrix = nalgebra::DMatrix::from_fn(axis.n, axis.n, |j, k| {
        let (x, y) = (pts[j], pts[k]);
        g.eval(&[y - x, 0.5 * (x + y)]) * h
    });
    Ok(OperatorOnGrid { axis, matrix })
}

/// `f^(w) = int f(n) lambda_o(k_w n) dn` with `k_w` from [`orbit_section`].
///
/// Coordinates `lambda_o` ignores are integrated in closed form. The rest is
/// an operator-valued quadrature: Gauss-Legendre panels in `v2`, and for each
/// node the `v1` integral of translations is a Fourier multiplier. Only
/// sections that are diagonal keep `f o k_w^{-1}` separable; other orbit
/// points are rejected.
pub fn group_fourier(f: &NilGridFunction, w: &OrbitPoint, axis: Axis) -> Result<OperatorOnGrid> {
    let g = q2_descriptor(f)?;
    let k = orbit_section(&w.n)?;
    let scale = k.amax();
    for i in 0..3 {
        for j in 0..3 {
            if i != j && k[(i, j)].abs() > 1e-12 * scale {
                return Err(Error::Unsupported(
                    "group Fourier transform at an orbit point with a non-diagonal section".into(),
                ));
            }
        }
    }
    let d = [k[(0, 0)], k[(1, 1)], k[(2, 2)]];
    // f(k^{-1} m) |det k|^{-p}
    let mut fk = g.clone();
    for (c, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        fk = fk.dilate_axis(c, 1.0 / (d[i] * d[j]))?;
    }
    for i in 0..3 {
        fk = fk.dilate_axis(3 + i, 1.0 / d[i])?;
    }
    let det = (d[0] * d[1] * d[2]).abs();
    let fk = fk.scale(Complex::new(det.powi(-3), 0.0));

    // (v1, v2) after the central and n0 directions are paired with o
    let f2 = twist(&fk).fourier_axis(Z12).evaluate_axis(Z12, 1.0);
    let hsym = f2.fourier_axis(0);
    let width = f2.widths()[1];
    let reach = 4.5 / width.sqrt() + 0.5 * (f2.degree() as f64).sqrt();
    let panels = ((2.0 * reach * axis.half_extent).ceil() as usize).max(8);
    let (nodes, weights) = gauss_legendre(16);
    let mut acc = nalgebra::DMatrix::<Complex>::zeros(axis.n, axis.n);
    let pw = 2.0 * reach / panels as f64;
    for pi in 0..panels {
        let lo = -reach + pi as f64 * pw;
        for (t, wt) in nodes.iter().zip(&weights) {
            let y = lo + 0.5 * pw * (t + 1.0);
            let sym = OperatorOnGrid::multiplier(axis, |xi| hsym.eval(&[xi + 0.5 * y, y]));
            let wgt = 0.5 * pw * wt;
            for (j, x) in axis.points().into_iter().enumerate() {
                let m = cis(y * x) * wgt;
                let mut row = acc.row_mut(j);
                row += sym.matrix.row(j) * m;
            }
        }
    }
    Ok(OperatorOnGrid { axis, matrix: acc })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceCheck {
    pub traces: Vec<Complex>,
    pub fourier_values: Vec<Complex>,
    pub ratios: Vec<Complex>,
    /// `max |r_i - mean| / |mean|`.
    pub spread: f64,
}

/// `Tr(f^(o) U)` against `(F f)(o)` for each function of the family. The
/// Euclidean transform pairs `n` with `o` by `<n, o> = z12 + v3 / 2`.
pub fn trace_check(family: &[NilGridFunction], axis: Axis) -> Result<TraceCheck> {
    if family.len() < 3 {
        return Err(Error::Precondition(format!("trace check needs 3 functions, got {}", family.len())));
    }
    let o = crate::orbits::membership(&crate::orbits::base_point(2)?);
    let mut traces = Vec::new();
    let mut fourier_values = Vec::new();
    for f in family {
        let fh = group_fourier(f, &o, axis)?;
        let tr: Complex = (0..axis.n).map(|j| fh.matrix[(j, axis.mirror(j))]).sum();
        let ff = q2_descriptor(f)?.fourier().eval(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
        if ff.norm() < 1e-12 {
            return Err(Error::Precondition("a family member has (F f)(o) = 0".into()));
        }
        traces.push(tr);
        fourier_values.push(ff);
    }
    let ratios: Vec<Complex> = traces.iter().zip(&fourier_values).map(|(t, f)| t / f).collect();
    let mean = ratios.iter().sum::<Complex>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max) / mean.norm();
    Ok(TraceCheck { traces, fourier_values, ratios, spread })
}
