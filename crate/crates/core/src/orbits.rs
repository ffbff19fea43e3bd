//! The generic point `o`, the sets `O ⊂ Ω` in `n* ≅ n`, and the constructive
//! proof that `GL_p` acts transitively on `Ω = {det M(z, v) != 0}`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liegroups::{GlElement, GlKind};
use crate::nilgroup::{gl_action, NilElement};
use crate::skewlin::{block_j, pfaffian, skew_canonical, SymplecticForm};

/// Relative zero thresholds for `z v` and `det M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitTol {
    pub zv: f64,
    pub det: f64,
}

impl Default for OrbitTol {
    fn default() -> Self {
        OrbitTol { zv: 1e-9, det: 1e-9 }
    }
}

/// `(blockdiag(J, .., J, 0), 2 e_p)` with `q - 1` blocks, so that `M(o) = J_q`.
pub fn base_point(q: usize) -> Result<NilElement> {
    if q == 0 {
        return Err(Error::Dimension("q must be at least 1".into()));
    }
    let p = 2 * q - 1;
    let mut v = DVector::zeros(p);
    v[p - 1] = 2.0;
    NilElement::new(block_j(q - 1, p), v)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitPoint {
    pub n: NilElement,
    pub in_o: bool,
    pub in_omega: bool,
    pub det_m: f64,
}

fn scale_of(n: &NilElement) -> f64 {
    n.m().frobenius()
}

pub fn membership(n: &NilElement) -> OrbitPoint {
    membership_tol(n, OrbitTol::default())
}

pub fn membership_tol(n: &NilElement, tol: OrbitTol) -> OrbitPoint {
    let m = n.m();
    let pf = pfaffian(&m).expect("M(z, v) has even size");
    let det_m = pf * pf;
    let scale = scale_of(n).max(f64::MIN_POSITIVE);
    let in_omega = det_m.abs() > tol.det * scale.powi(m.n() as i32);
    let zv = (n.z.matrix() * &n.v).norm();
    let in_o = in_omega && zv <= tol.zv * (n.z.frobenius() * n.v.norm()).max(f64::MIN_POSITIVE);
    OrbitPoint { n: n.clone(), in_o, in_omega, det_m }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitSolution {
    pub g: GlElement,
    pub residual: f64,
}

fn coord_residual(a: &NilElement, b: &NilElement) -> f64 {
    a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `g` with `g . n = base_point`.
///
/// A rotation brings `z` to `blockdiag(w_i J, 0)` and `v` to `(y, u_p)`.
/// Then `g = [[A, C], [0, c]]` with `A_i = diag(sgn(w_i)|w_i|^{-1/2},
/// |w_i|^{-1/2})` per block, `c = 2 / u_p` and `C = -A y / u_p`.
pub fn orbit_solve(n: &NilElement) -> Result<OrbitSolution> {
    orbit_solve_tol(n, OrbitTol::default())
}

pub fn orbit_solve_tol(n: &NilElement, tol: OrbitTol) -> Result<OrbitSolution> {
    let p = n.p();
    if p % 2 == 0 {
        return Err(Error::Dimension(format!("p = {p} must be odd")));
    }
    let q = p.div_ceil(2);
    let pt = membership_tol(n, tol);
    if !pt.in_omega {
        return Err(Error::Precondition(format!("point not in Omega (det M = {:e})", pt.det_m)));
    }
    let thresh = tol.det * scale_of(n).powi(p as i32 + 1);
    if pt.det_m.abs() < 10.0 * thresh {
        return Err(Error::Guard(format!("det M = {:e} within 10x of the zero threshold", pt.det_m)));
    }
    let canon = skew_canonical(&n.z);
    let r = &canon.rotation;
    let zr = r * n.z.matrix() * r.transpose();
    let u = r * &n.v;
    let up = u[p - 1];
    let mut a = DMatrix::zeros(p - 1, p - 1);
    for i in 0..q - 1 {
        let w = 0.5 * (zr[(2 * i, 2 * i + 1)] - zr[(2 * i + 1, 2 * i)]);
        if w == 0.0 || up == 0.0 {
            return Err(Error::Precondition("degenerate block in a point of Omega".into()));
        }
        let s = w.abs().powf(-0.5);
        a[(2 * i, 2 * i)] = w.signum() * s;
        a[(2 * i + 1, 2 * i + 1)] = s;
    }
    let y = u.rows(0, p - 1).into_owned();
    let corr = -(&a * y) / up;
    let mut t = DMatrix::zeros(p, p);
    t.view_mut((0, 0), (p - 1, p - 1)).copy_from(&a);
    t.view_mut((0, p - 1), (p - 1, 1)).copy_from(&corr);
    t[(p - 1, p - 1)] = 2.0 / up;
    let g = GlElement::new(t * r, GlKind::P)?;
    let residual = coord_residual(&gl_action(&g, n)?, &base_point(q)?);
    Ok(OrbitSolution { g, residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizerCheck {
    /// `|A J A^T - J|` when `g` has the block shape, else infinite.
    pub symplectic_residual: f64,
    /// `|g . o - o|`.
    pub base_residual: f64,
    pub pass: bool,
    pub agree: bool,
}

pub const STABILIZER_TOL: f64 = 1e-10;

/// Membership in the stabilizer `Sp(q - 1)` of the base point, by the block
/// criterion and by acting on `o`; `agree` records whether both say the same.
pub fn stabilizer_check(g: &DMatrix<f64>) -> Result<StabilizerCheck> {
    let p = g.nrows();
    if p % 2 == 0 || g.ncols() != p {
        return Err(Error::Shape(format!("{}x{} is not an odd-size square", p, g.ncols())));
    }
    let q = p.div_ceil(2);
    let k = p - 1;
    let scale = g.amax().max(1.0);
    let block_ok = (0..k).all(|i| g[(i, k)].abs() <= STABILIZER_TOL * scale && g[(k, i)].abs() <= STABILIZER_TOL * scale)
        && (g[(k, k)] - 1.0).abs() <= STABILIZER_TOL * scale;
    let symplectic_residual = if block_ok {
        let a = g.view((0, 0), (k, k));
        let j = SymplecticForm::new(q - 1).matrix.into_matrix();
        (a * &j * a.transpose() - &j).amax()
    } else {
        f64::INFINITY
    };
    let o = base_point(q)?;
    let base_residual = match GlElement::new(g.clone(), GlKind::P) {
        Ok(ge) => coord_residual(&gl_action(&ge, &o)?, &o),
        Err(_) => f64::INFINITY,
    };
    let by_block = symplectic_residual <= STABILIZER_TOL;
    let by_action = base_residual <= STABILIZER_TOL;
    Ok(StabilizerCheck { symplectic_residual, base_residual, pass: by_block && by_action, agree: by_block == by_action })
}

/// `(z_o, e_1 + 2 e_p)`: in `Ω` with `|z v| = 1`, so outside the closure of `O`.
pub fn strict_inclusion_witness(q: usize) -> Result<NilElement> {
    if q < 2 {
        return Err(Error::Precondition("O = Omega when q = 1".into()));
    }
    let mut n = base_point(q)?;
    n.v[0] = 1.0;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_point_q1() {
        let o = base_point(1).unwrap();
        assert_eq!(o.z.n(), 1);
        assert_eq!(o.v[0], 2.0);
        assert_eq!(o.m(), SymplecticForm::new(1).matrix);
    }

    #[test]
    fn witness_needs_q2() {
        assert!(strict_inclusion_witness(1).is_err());
        let w = strict_inclusion_witness(2).unwrap();
        assert_eq!((w.z.matrix() * &w.v).norm(), 1.0);
    }
}
