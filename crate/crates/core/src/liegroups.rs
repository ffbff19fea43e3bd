//! Matrix models of `so(p+1,p+1)` and `so(p+1,p)` in size `2(p+1)`, the
//! nilradicals, the `GL+(p+1)` picture of the Levi factor, and the
//! characters built from determinants.
//!
//! Coordinates: the metric is `I_{p+1,p+1} = diag(-I, I)` and `G` sits
//! inside as `diag(g, 1)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::skewlin::SkewMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroupConstants {
    pub p: usize,
    pub q: usize,
    pub rho: f64,
    pub rho_sharp: f64,
}

impl GroupConstants {
    pub fn new(p: usize) -> Result<Self> {
        if p % 2 == 0 || p > 9 {
            return Err(Error::Dimension(format!("p = {p} must be odd and at most 9")));
        }
        let q = (p + 1) / 2;
        Ok(GroupConstants {
            p,
            q,
            rho: (p * p) as f64 / 2.0,
            rho_sharp: (q * (2 * q - 1)) as f64,
        })
    }

    pub fn from_q(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::Dimension("q must be positive".into()));
        }
        GroupConstants::new(2 * q - 1)
    }

    /// Size `2(p+1)` of the ambient matrices.
    pub fn size(&self) -> usize {
        2 * (self.p + 1)
    }
}

/// `diag(-I_m, I_m)`.
pub fn metric(m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * m, 2 * m, |i, j| if i != j { 0.0 } else if i < m { -1.0 } else { 1.0 })
}

/// Matrix of size `2(p+1)` in the ambient group or algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpMatrix(pub DMatrix<f64>);

impl SharpMatrix {
    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    /// `max |X^T I + I X|`.
    pub fn algebra_residual(&self) -> f64 {
        let i = metric(self.size() / 2);
        (self.0.transpose() * &i + &i * &self.0).amax()
    }

    /// `max(|g^T I g - I|, |det g - 1|)`.
    pub fn group_residual(&self) -> f64 {
        let i = metric(self.size() / 2);
        let r = (self.0.transpose() * &i * &self.0 - &i).amax();
        r.max((self.0.determinant() - 1.0).abs())
    }

    pub fn mul(&self, other: &SharpMatrix) -> SharpMatrix {
        SharpMatrix(&self.0 * &other.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GlKind {
    /// `GL+(p+1)`, the Levi factor `MA` of the big parabolic.
    PlusP1,
    /// `GL(p)`, the Levi factor of the small one.
    P,
}

/// Largest condition number accepted for group elements.
pub const COND_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlElement {
    pub m: DMatrix<f64>,
    pub kind: GlKind,
}

impl GlElement {
    pub fn new(m: DMatrix<f64>, kind: GlKind) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!("{}x{} group element", m.nrows(), m.ncols())));
        }
        let sv = m.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 0.0) || smax / smin > COND_LIMIT {
            return Err(Error::Singular(format!("condition number {:.3e}", smax / smin)));
        }
        if kind == GlKind::PlusP1 && m.determinant() <= 0.0 {
            return Err(Error::Singular("GL+ element with non-positive determinant".into()));
        }
        Ok(GlElement { m, kind })
    }

    pub fn det(&self) -> f64 {
        self.m.determinant()
    }
}

/// `[[Z, -Z], [Z, -Z]]`, the root space of `xi_sharp` with eigenvalue 2.
pub fn embed_n_sharp(z: &SkewMatrix, c: &GroupConstants) -> Result<SharpMatrix> {
    let m = c.p + 1;
    if z.n() != m {
        return Err(Error::Shape(format!("expected {m}x{m}, got {}", z.n())));
    }
    let zm = z.matrix();
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    out.view_mut((0, 0), (m, m)).copy_from(zm);
    out.view_mut((0, m), (m, m)).copy_from(&(-zm));
    out.view_mut((m, 0), (m, m)).copy_from(zm);
    out.view_mut((m, m), (m, m)).copy_from(&(-zm));
    Ok(SharpMatrix(out))
}

/// `n_(z,v)` placed in `diag(., 0)`; blocks of sizes `(p, 1, p, 1)` read
/// `[[z, v, -z, 0], [-v^T, 0, v^T, 0], [z, v, -z, 0], [0, 0, 0, 0]]`.
pub fn embed_n(z: &SkewMatrix, v: &DVector<f64>, c: &GroupConstants) -> Result<SharpMatrix> {
    let p = c.p;
    if z.n() != p || v.len() != p {
        return Err(Error::Shape(format!("expected z {p}x{p} and v of length {p}")));
    }
    let zm = z.matrix();
    let m = p + 1;
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    for (r0, sz) in [(0, 1.0), (m, 1.0)] {
        out.view_mut((r0, 0), (p, p)).copy_from(&(zm * sz));
        out.view_mut((r0, m), (p, p)).copy_from(&(-zm * sz));
        out.view_mut((r0, p), (p, 1)).copy_from(v);
    }
    for j in 0..p {
        out[(p, j)] = -v[j];
        out[(p, m + j)] = v[j];
    }
    Ok(SharpMatrix(out))
}

/// `M(z, v) = [[z, v/2], [-v^T/2, 0]]`.
pub fn m_of(z: &SkewMatrix, v: &DVector<f64>) -> Result<SkewMatrix> {
    let p = z.n();
    if v.len() != p {
        return Err(Error::Shape(format!("v has length {}, z is {p}x{p}", v.len())));
    }
    let mut m = DMatrix::zeros(p + 1, p + 1);
    m.view_mut((0, 0), (p, p)).copy_from(z.matrix());
    for i in 0..p {
        m[(i, p)] = 0.5 * v[i];
        m[(p, i)] = -0.5 * v[i];
    }
    SkewMatrix::new(m)
}

/// `k_o^T diag(h, h^{-T}) k_o` with `k_o = [[1, 1], [-1, 1]] / sqrt(2)`,
/// which multiplies out to `(1/2) [[h + h^{-T}, h - h^{-T}], [h - h^{-T}, h + h^{-T}]]`.
pub fn gl_to_masharp(h: &GlElement) -> Result<SharpMatrix> {
    if h.kind != GlKind::PlusP1 {
        return Err(Error::Precondition("gl_to_masharp takes a GL+(p+1) element".into()));
    }
    let m = h.m.nrows();
    let hit = h
        .m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("h is not invertible".into()))?
        .transpose();
    let plus = (&h.m + &hit) * 0.5;
    let minus = (&h.m - &hit) * 0.5;
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    out.view_mut((0, 0), (m, m)).copy_from(&plus);
    out.view_mut((0, m), (m, m)).copy_from(&minus);
    out.view_mut((m, 0), (m, m)).copy_from(&minus);
    out.view_mut((m, m), (m, m)).copy_from(&plus);
    Ok(SharpMatrix(out))
}

/// `H_j`: the symmetric matrix coupling coordinates `j` and `p+1+j`.
pub fn h_j(j: usize, c: &GroupConstants) -> SharpMatrix {
    let m = c.p + 1;
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    out[(j, m + j)] = 1.0;
    out[(m + j, j)] = 1.0;
    SharpMatrix(out)
}

/// `xi_sharp = H_0 + ... + H_p = [[0, I], [I, 0]]`.
pub fn xi_sharp(c: &GroupConstants) -> SharpMatrix {
    let mut out = DMatrix::zeros(c.size(), c.size());
    for j in 0..=c.p {
        out += h_j(j, c).0;
    }
    SharpMatrix(out)
}

/// `xi = H_0 + ... + H_{p-1}`, which lies in `g`.
pub fn xi(c: &GroupConstants) -> SharpMatrix {
    let mut out = DMatrix::zeros(c.size(), c.size());
    for j in 0..c.p {
        out += h_j(j, c).0;
    }
    SharpMatrix(out)
}

/// Terminating exponential series; fails if `X^k` does not vanish for
/// some `k <= 8`. "Vanish" is relative: `|X^k| <= 1e-13 max(1, |X|)^k`.
pub fn exp_nilpotent(x: &SharpMatrix) -> Result<SharpMatrix> {
    let n = x.size();
    let scale = x.0.amax().max(1.0);
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=8 {
        term = &term * &x.0 / k as f64;
        if term.amax() <= 1e-13 * scale.powi(k as i32) / factorial(k) {
            return Ok(SharpMatrix(sum));
        }
        sum += &term;
    }
    Err(Error::NotNilpotent(8))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `[[I_p, v], [0, 1]]` as a `GL+(p+1)` element.
pub fn unipotent_h(v: &DVector<f64>) -> GlElement {
    let p = v.len();
    let mut m = DMatrix::identity(p + 1, p + 1);
    m.view_mut((0, p), (p, 1)).copy_from(v);
    GlElement { m, kind: GlKind::PlusP1 }
}

/// `max |exp n_(z,v) - m_h exp n_sharp(M(z,v))|` with `m_h` the image of
/// `[[I_p, v], [0, 1]]`.
pub fn factorize_lemma21(z: &SkewMatrix, v: &DVector<f64>, c: &GroupConstants) -> Result<f64> {
    let lhs = exp_nilpotent(&embed_n(z, v, c)?)?;
    let mh = gl_to_masharp(&unipotent_h(v))?;
    let rhs = mh.mul(&exp_nilpotent(&embed_n_sharp(&m_of(z, v)?, c)?)?);
    Ok((lhs.0 - rhs.0).amax())
}

/// `exp(n_(z,v))^T`, the opposite nilradical in the same coordinates.
///
/// The matrix commutator of two embeddings is `n(-(v1 v2^T - v2 v1^T), 0)`,
/// so `exp(n(a)) exp(n(b))` follows the group law with the `-1/2` sign;
/// transposing flips it, and this map is a homomorphism for
/// [`crate::nilgroup::multiply`].
pub fn exp_nbar(z: &SkewMatrix, v: &DVector<f64>, c: &GroupConstants) -> Result<SharpMatrix> {
    Ok(SharpMatrix(exp_nilpotent(&embed_n(z, v, c)?)?.0.transpose()))
}

/// Eigenvalues of `ad xi` on `g = so(p+1, p)` with their multiplicities.
///
/// `g` is realized as `eta S` with `S` skew of size `2p+1` and
/// `eta = diag(-I_{p+1}, I_p)`.
pub fn ad_xi_spectrum(c: &GroupConstants) -> Result<Vec<(i64, usize)>> {
    if c.p > 7 {
        return Err(Error::Dimension(format!("ad_xi_spectrum is dense; p = {} > 7", c.p)));
    }
    let n = 2 * c.p + 1;
    let eta = DMatrix::from_fn(n, n, |i, j| if i != j { 0.0 } else if i <= c.p { -1.0 } else { 1.0 });
    let x = xi(c).0.view((0, 0), (n, n)).into_owned();
    let basis: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let dim = basis.len();
    let mut ad = DMatrix::zeros(dim, dim);
    for (col, &(i, j)) in basis.iter().enumerate() {
        let mut s = DMatrix::zeros(n, n);
        s[(i, j)] = 1.0;
        s[(j, i)] = -1.0;
        let e = &eta * s;
        let br = &x * &e - &e * &x;
        let back = &eta * br;
        for (row, &(a, b)) in basis.iter().enumerate() {
            ad[(row, col)] = back[(a, b)];
        }
    }
    let mut counts: std::collections::BTreeMap<i64, usize> = Default::default();
    for ev in ad.complex_eigenvalues().iter() {
        let r = ev.re.round();
        if (ev.re - r).abs() > 1e-6 || ev.im.abs() > 1e-6 {
            return Err(Error::Precondition(format!("eigenvalue {ev} is not an integer")));
        }
        *counts.entry(r as i64).or_default() += 1;
    }
    Ok(counts.into_iter().collect())
}

/// `det(L)^((mu + rho_sharp)/(2q))` for `L` in `GL+(2q)`.
pub fn character_sharp(mu: Complex64, l: &GlElement, c: &GroupConstants) -> Result<Complex64> {
    let d = l.det();
    if d <= 0.0 {
        return Err(Error::Singular("character_sharp needs det L > 0".into()));
    }
    Ok(((mu + c.rho_sharp) / (2 * c.q) as f64 * d.ln()).exp())
}

/// `|det h|^((nu + rho)/p)` for `h` in `GL(p)`.
pub fn character_g(nu: Complex64, h: &GlElement, c: &GroupConstants) -> Result<Complex64> {
    let d = h.det().abs();
    if d == 0.0 {
        return Err(Error::Singular("character_g needs invertible h".into()));
    }
    Ok(((nu + c.rho) / c.p as f64 * d.ln()).exp())
}

/// `diag(h, det h)`.
pub fn iota(h: &GlElement) -> GlElement {
    let p = h.m.nrows();
    let mut m = DMatrix::zeros(p + 1, p + 1);
    m.view_mut((0, 0), (p, p)).copy_from(&h.m);
    m[(p, p)] = h.det();
    GlElement { m, kind: GlKind::PlusP1 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuCompat {
    pub a: f64,
    pub b: f64,
    /// Spread of the per-sample solutions; zero when the affine law fits.
    pub spread: f64,
    pub claimed_a: f64,
    pub claimed_b: f64,
    pub deviation: f64,
}

/// Fits `nu = a mu + b` so that `|chi_sharp(mu, iota(h))| = |chi_nu(h)|`
/// on every sample. Two values `mu` and `mu + 1` fix the line; the
/// samples only test consistency since both sides are powers of `|det h|`.
pub fn solve_nu_compat(mu: f64, c: &GroupConstants, samples: &[GlElement]) -> Result<NuCompat> {
    let logs: Vec<f64> = samples.iter().map(|h| h.det().abs().ln()).collect();
    let distinct = logs.iter().any(|l| (l - logs[0]).abs() > 1e-9) || logs.iter().any(|l| l.abs() > 1e-9);
    if samples.len() < 2 || !distinct {
        return Err(Error::Precondition("need two samples with |det h| != 1".into()));
    }
    let nu_at = |m: f64| -> Result<(f64, f64)> {
        let mut vals = Vec::new();
        for (h, l) in samples.iter().zip(&logs) {
            if l.abs() < 1e-9 {
                continue;
            }
            let lhs = character_sharp(Complex64::new(m, 0.0), &iota(h), c)?.norm().ln();
            vals.push(c.p as f64 * lhs / l - c.rho);
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let spread = vals.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
        Ok((mean, spread))
    };
    let (n0, s0) = nu_at(mu)?;
    let (n1, s1) = nu_at(mu + 1.0)?;
    let a = n1 - n0;
    let b = n0 - a * mu;
    let claimed_a = c.p as f64 / (c.p + 1) as f64;
    Ok(NuCompat {
        a,
        b,
        spread: s0.max(s1),
        claimed_a,
        claimed_b: 0.0,
        deviation: ((a - claimed_a).powi(2) + b * b).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let c = GroupConstants::new(3).unwrap();
        assert_eq!((c.q, c.rho, c.rho_sharp), (2, 4.5, 6.0));
        assert!(GroupConstants::new(4).is_err());
    }

    #[test]
    fn m_of_p1() {
        let z = SkewMatrix::zeros(1);
        let v = DVector::from_vec(vec![3.0]);
        let m = m_of(&z, &v).unwrap();
        assert_eq!(m.matrix()[(0, 1)], 1.5);
    }

    #[test]
    fn exp_of_zero_and_of_square_zero() {
        let c = GroupConstants::new(3).unwrap();
        let zero = SharpMatrix(DMatrix::zeros(8, 8));
        assert_eq!(exp_nilpotent(&zero).unwrap().0, DMatrix::identity(8, 8));
        let x = embed_n_sharp(&crate::skewlin::SymplecticForm::new(2).matrix, &c).unwrap();
        let e = exp_nilpotent(&x).unwrap();
        assert!((e.0 - DMatrix::identity(8, 8) - &x.0).amax() < 1e-15);
    }

    #[test]
    fn exp_rejects_non_nilpotent() {
        let c = GroupConstants::new(1).unwrap();
        assert!(exp_nilpotent(&xi_sharp(&c)).is_err());
    }

    #[test]
    fn characters() {
        let c = GroupConstants::new(3).unwrap();
        let one = GlElement::new(DMatrix::identity(4, 4), GlKind::PlusP1).unwrap();
        let mu = Complex64::new(0.3, 1.7);
        assert!((character_sharp(mu, &one, &c).unwrap() - 1.0).norm() < 1e-15);
        let h = GlElement::new(DMatrix::identity(3, 3) * std::f64::consts::E, GlKind::P).unwrap();
        let v = character_g(Complex64::new(0.0, 0.0), &h, &c).unwrap();
        assert!((v.re - c.rho.exp()).abs() < 1e-12 * c.rho.exp());
        let mut l = DMatrix::identity(4, 4);
        l[(0, 0)] = 2.0;
        l[(1, 1)] = 0.5;
        let l = GlElement::new(l, GlKind::PlusP1).unwrap();
        let v = character_sharp(Complex64::new(0.0, 2.0) - c.rho_sharp, &l, &c).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_elements_rejected() {
        assert!(GlElement::new(DMatrix::zeros(2, 2), GlKind::P).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(GlElement::new(m, GlKind::PlusP1).is_err());
    }
}
