use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use super::{lambda_o, metaplectic_sl2, probe_residual_chain, reflection_u};
use crate::error::{Error, Result};
use crate::liegroups::{GlElement, GlKind};
use crate::nilgroup::{gl_action, NilElement};
use crate::numerics::{Axis, RngStream};
use crate::orbits::orbit_solve;
use crate::skewlin::{skew_canonical, SkewMatrix};

pub const MIN_ORBITS: usize = 8;

/// `k_w` with `lambda_w = lambda_o(k_w .)`.
///
/// [`orbit_solve`] returns `g` with `g . w = o` for the action on `n`. The
/// functional `n -> <o, k n>` is `k^T . o`, so the realization that carries
/// the functional `w` uses `k = g^{-T}`.
pub fn orbit_section(w: &NilElement) -> Result<DMatrix<f64>> {
    let g = orbit_solve(w)?.g.m;
    let inv = g.try_inverse().ok_or_else(|| Error::Singular("orbit solution".into()))?;
    Ok(inv.transpose())
}

/// The point of `O` on the `N`-coadjoint orbit of `n`: `v` minus its
/// component in the range of `z`.
pub fn o_representative(n: &NilElement) -> Result<NilElement> {
    let p = n.p();
    if p % 2 == 0 {
        return Err(Error::Dimension(format!("p = {p} must be odd")));
    }
    let canon = skew_canonical(&n.z);
    let k: DVector<f64> = canon.rotation.row(p - 1).transpose();
    NilElement::new(n.z.clone(), &k * k.dot(&n.v))
}

/// Points of `O` at `q = 2` with `|z| in [0.5, 1.5]` and `|v| in [0.5, 1.5]`.
pub fn sample_o(count: usize, stream: RngStream) -> Result<Vec<NilElement>> {
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(0.5..=1.5).contains(&r) {
            continue;
        }
        let z = SkewMatrix::from_upper(3, &a)?;
        let t = rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        // kernel of z is the axial vector (z23, -z13, z12)
        let k = DVector::from_vec(vec![a[2], -a[1], a[0]]) / r;
        out.push(NilElement::new(z, k * t)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SchurReport {
    pub orbits: usize,
    /// RMS over orbits of `max_psi |(V* U V - U) psi|`.
    pub commutator: f64,
    /// Same with `U` replaced by `I`.
    pub baseline: f64,
    /// Largest `|V lambda_o(m) V* - lambda_o(h m)|` over orbits, on probes.
    pub intertwiner_residual: f64,
    /// Largest deviation of `h` from the shape `[[A, 0], [b^T, 1]]`, `det A = 1`.
    pub shape_residual: f64,
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

/// The symbol-level commutator of `T_1` with `pi(g)` over a sample of `O`.
///
/// `T_1` acts by `f^(w) -> f^(w) U` in the section [`orbit_section`]. At `w`
/// the realization reached through `g` is `lambda_o(k_w g .)`, which carries
/// the orbit of `w' = g^T . w`; with `h = k_w g k_{w'}^{-1}` it equals
/// `V lambda_{w'} V*` for `V = lambda_o(n_b) tau(A)`. Then
/// `(T_1 pi(g) f - pi(g) T_1 f)^(w)` is `V f^(w') (V* U V - U) V*`, up to the
/// modular factor, and the operator `V* U V - U` is measured on probes.
pub fn schur_experiment(g: &DMatrix<f64>, sample: &[NilElement], axis: Axis) -> Result<SchurReport> {
    if sample.len() < MIN_ORBITS {
        return Err(Error::Precondition(format!("{} orbits, need at least {MIN_ORBITS}", sample.len())));
    }
    if g.shape() != (3, 3) {
        return Err(Error::Unsupported("the Schur experiment runs at q = 2".into()));
    }
    let gt = GlElement::new(g.transpose(), GlKind::P)?;
    let u = reflection_u(axis)?;
    let m_ref = NilElement::from_coords(3, &[0.3, 0.0, 0.0, 0.4, -0.3, 0.2])?;
    let (mut comm, mut base) = (Vec::new(), Vec::new());
    let (mut inter, mut shape): (f64, f64) = (0.0, 0.0);
    for w in sample {
        let w = o_representative(w)?;
        let kw = orbit_section(&w)?;
        let w2 = o_representative(&gl_action(&gt, &w)?)?;
        let kw2 = orbit_section(&w2)?;
        let kw2_inv = kw2.try_inverse().ok_or_else(|| Error::Singular("orbit section".into()))?;
        let h = &kw * g * kw2_inv;
        let a = h.view((0, 0), (2, 2)).into_owned();
        let s = h.amax().max(1.0);
        shape = shape.max(h[(0, 2)].abs().max(h[(1, 2)].abs()).max((h[(2, 2)] - 1.0).abs()) / s);
        shape = shape.max((a.determinant() - 1.0).abs());
        let b = DVector::from_vec(vec![h[(2, 0)], h[(2, 1)]]);
        let bp = a.transpose().try_inverse().ok_or_else(|| Error::Singular("symplectic block".into()))? * b;
        let nb = NilElement::from_coords(3, &[0.0, 0.0, 0.0, 0.5 * bp[1], -0.5 * bp[0], 0.0])?;
        let v = lambda_o(&nb, axis)?.compose(&metaplectic_sl2(&a, axis)?)?;
        let vs = v.adjoint();

        let hm = gl_action(&GlElement::new(h.clone(), GlKind::P)?, &m_ref)?;
        inter = inter.max(probe_residual_chain(&[&v, &lambda_o(&m_ref, axis)?, &vs], &[&lambda_o(&hm, axis)?])?);
        comm.push(probe_residual_chain(&[&vs, &u, &v], &[&u])?);
        base.push(probe_residual_chain(&[&vs, &v], &[])?);
    }
    Ok(SchurReport { orbits: sample.len(), commutator: rms(&comm), baseline: rms(&base), intertwiner_residual: inter, shape_residual: shape })
}
