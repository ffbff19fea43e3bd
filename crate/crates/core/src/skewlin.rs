//! Real antisymmetric matrices: Pfaffian, canonical form under `SO(n)`
//! congruence, and the inner product `(Z, W) = Tr(Z W^T) / 2`.

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Antisymmetric to the bit: `a[(i,j)] == -a[(j,i)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix(DMatrix<f64>);

impl Serialize for SkewMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> =
            (0..self.n()).map(|i| (0..self.n()).map(|j| self.0[(i, j)]).collect()).collect();
        rows.serialize(s)
    }
}

impl SkewMatrix {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        for i in 0..n {
            for j in i..n {
                if a[(i, j)] != -a[(j, i)] {
                    return Err(Error::Precondition(format!("entry ({i},{j}) breaks antisymmetry")));
                }
            }
        }
        Ok(SkewMatrix(a))
    }

    /// `(a - a^T) / 2`, which is antisymmetric exactly.
    pub fn from_antisymmetrized(a: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (a[(i, j)] - a[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        Ok(SkewMatrix(m))
    }

    pub fn zeros(n: usize) -> Self {
        SkewMatrix(DMatrix::zeros(n, n))
    }

    /// Strictly upper entries in row-major order.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Shape(format!("{} upper entries for n = {n}", upper.len())));
        }
        let mut m = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m[(i, j)] = upper[k];
                m[(j, i)] = -upper[k];
                k += 1;
            }
        }
        Ok(SkewMatrix(m))
    }

    pub fn upper(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn scale(&self, c: f64) -> SkewMatrix {
        SkewMatrix(&self.0 * c)
    }

    pub fn add(&self, other: &SkewMatrix) -> Result<SkewMatrix> {
        if self.n() != other.n() {
            return Err(Error::Shape("skew matrices of different size".into()));
        }
        Ok(SkewMatrix(&self.0 + &other.0))
    }

    /// `x y^T - y x^T`.
    pub fn wedge(x: &DVector<f64>, y: &DVector<f64>) -> Result<SkewMatrix> {
        if x.len() != y.len() {
            return Err(Error::Shape("wedge of vectors of different length".into()));
        }
        SkewMatrix::from_antisymmetrized(&(x * y.transpose() * 2.0))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }
}

/// `J_q = blockdiag(J, ..., J)` with `J = [[0, 1], [-1, 0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    pub q: usize,
    pub matrix: SkewMatrix,
}

impl SymplecticForm {
    pub fn new(q: usize) -> Self {
        SymplecticForm { q, matrix: block_j(q, 2 * q) }
    }
}

/// `blockdiag(J, ..., J, 0)` of size `n` with `blocks` copies of `J`.
pub fn block_j(blocks: usize, n: usize) -> SkewMatrix {
    assert!(2 * blocks <= n);
    let mut m = DMatrix::zeros(n, n);
    for b in 0..blocks {
        m[(2 * b, 2 * b + 1)] = 1.0;
        m[(2 * b + 1, 2 * b)] = -1.0;
    }
    SkewMatrix(m)
}

/// Pfaffian by skew Gaussian elimination (Parlett-Reid with pivoting).
///
/// Each step zeroes column `k` below the first subdiagonal entry with a
/// congruence, which leaves the Pfaffian fixed up to the tracked sign of
/// the row/column swap. `Pf(J) = 1`.
pub fn pfaffian(a: &SkewMatrix) -> Result<f64> {
    let n = a.n();
    if n % 2 == 1 {
        return Err(Error::Dimension(format!("Pfaffian of odd size {n}")));
    }
    let mut m = a.0.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = m[(k + 1, k)].abs();
        for i in k + 2..n {
            if m[(i, k)].abs() > best {
                best = m[(i, k)].abs();
                kp = i;
            }
        }
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = m[(k, k + 1)];
        if piv == 0.0 {
            return Ok(0.0);
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| m[(k, j)] / piv).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| m[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    m[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    Ok(pf)
}

/// Skew canonical form: `rotation * z * rotation^T` is block diagonal.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalSkewForm {
    #[serde(serialize_with = "ser_matrix")]
    pub rotation: DMatrix<f64>,
    /// Signed block weights `w_i`, sorted by decreasing `|w_i|`. Only the
    /// last one can be negative (orientation fix).
    pub spectrum: Vec<f64>,
}

fn ser_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    rows.serialize(s)
}

impl CanonicalSkewForm {
    /// `blockdiag(w_1 J, ..., w_k J [, 0])`.
    pub fn block_form(&self) -> DMatrix<f64> {
        let n = self.rotation.nrows();
        let mut m = DMatrix::zeros(n, n);
        for (b, w) in self.spectrum.iter().enumerate() {
            m[(2 * b, 2 * b + 1)] = *w;
            m[(2 * b + 1, 2 * b)] = -*w;
        }
        m
    }

    pub fn residual(&self, z: &SkewMatrix) -> f64 {
        let r = &self.rotation * z.matrix() * self.rotation.transpose() - self.block_form();
        r.amax()
    }
}

/// Default relative zero threshold for canonical-form spectra.
pub const CANONICAL_ZERO_TOL: f64 = 1e-12;

pub fn skew_canonical(z: &SkewMatrix) -> CanonicalSkewForm {
    skew_canonical_tol(z, CANONICAL_ZERO_TOL)
}

/// Householder reduction `q * z * q^T = t` with `t` skew tridiagonal.
fn skew_tridiagonalize(z: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = z.nrows();
    let mut t = z.clone();
    let mut q = DMatrix::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x = t.view((k + 1, k), (n - k - 1, 1)).into_owned();
        let alpha = x.norm();
        if alpha == 0.0 {
            continue;
        }
        let mut u = x;
        u[0] += if u[0] >= 0.0 { alpha } else { -alpha };
        let un = u.norm();
        if un == 0.0 {
            continue;
        }
        u /= un;
        let mut h = DMatrix::identity(n, n);
        let m = n - k - 1;
        let refl = DMatrix::identity(m, m) - &u * u.transpose() * 2.0;
        h.view_mut((k + 1, k + 1), (m, m)).copy_from(&refl);
        t = &h * t * &h;
        q = &h * q;
    }
    (q, t)
}

/// Canonical form by skew tridiagonalization and an SVD.
///
/// After `q z q^T = t` (skew tridiagonal), the even/odd split of the basis
/// puts `t` in the form `[[0, B], [-B^T, 0]]` with `B` bidiagonal. A singular
/// pair `(u_k, v_k, s_k)` of `B` gives the block `s_k J` on `(u_k, 0)`,
/// `(0, v_k)`. Pairs are sorted by decreasing `s_k` (ties by lexicographic
/// order of the first row); pairs below `rel_tol * |z|` count as kernel.
/// Orientation is fixed by negating the last row.
pub fn skew_canonical_tol(z: &SkewMatrix, rel_tol: f64) -> CanonicalSkewForm {
    let n = z.n();
    let zm = z.matrix();
    let norm = zm.norm();
    if n == 0 || norm == 0.0 {
        return CanonicalSkewForm { rotation: DMatrix::identity(n, n), spectrum: vec![0.0; n / 2] };
    }
    let tol = rel_tol * norm;
    let (q, t) = skew_tridiagonalize(zm);
    let (ne, no) = (n.div_ceil(2), n / 2);
    let b = DMatrix::from_fn(ne, no, |a, c| t[(2 * a, 2 * c + 1)]);
    let svd = b.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let lift = |coeffs: &mut dyn Iterator<Item = (usize, f64)>| {
        let mut x = DVector::zeros(n);
        for (i, c) in coeffs {
            x[i] = c;
        }
        q.transpose() * x
    };
    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::new();
    let mut kernel: Vec<DVector<f64>> = Vec::new();
    for k in 0..no {
        let x = lift(&mut (0..ne).map(|a| (2 * a, u[(a, k)])));
        let y = lift(&mut (0..no).map(|c| (2 * c + 1, vt[(k, c)])));
        let w = svd.singular_values[k];
        if w <= tol {
            kernel.push(x);
            kernel.push(y);
        } else {
            pairs.push((w, x, y));
        }
    }
    if ne > no {
        // left null vector of B: complete the columns of u
        let mut best = DVector::zeros(ne);
        let mut best_norm = -1.0;
        for e in 0..ne {
            let mut c = DVector::zeros(ne);
            c[e] = 1.0;
            for _ in 0..2 {
                for k in 0..no {
                    let uk = u.column(k);
                    c -= uk * uk.dot(&c);
                }
            }
            let cn = c.norm();
            if cn > best_norm {
                best_norm = cn;
                best = c / cn;
            }
        }
        kernel.push(lift(&mut (0..ne).map(|a| (2 * a, best[a]))));
    }
    let lex = |a: &DVector<f64>, b: &DVector<f64>| {
        for k in 0..a.len() {
            let c = b[k].total_cmp(&a[k]);
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    };
    pairs.sort_by(|x, y| {
        if (x.0 - y.0).abs() <= 1e-12 * norm {
            lex(&x.1, &y.1)
        } else {
            y.0.total_cmp(&x.0)
        }
    });
    let mut rot = DMatrix::zeros(n, n);
    let mut r = 0;
    for (_, a, b) in &pairs {
        rot.set_row(r, &a.transpose());
        rot.set_row(r + 1, &b.transpose());
        r += 2;
    }
    for k in &kernel {
        rot.set_row(r, &k.transpose());
        r += 1;
    }
    if rot.determinant() < 0.0 {
        let last = -rot.row(n - 1).into_owned();
        rot.set_row(n - 1, &last);
    }
    let c = &rot * zm * rot.transpose();
    let spectrum = (0..n / 2)
        .map(|b| {
            let w = 0.5 * (c[(2 * b, 2 * b + 1)] - c[(2 * b + 1, 2 * b)]);
            if w.abs() <= tol { 0.0 } else { w }
        })
        .collect();
    CanonicalSkewForm { rotation: rot, spectrum }
}

/// `B A B^T`, antisymmetrized.
pub fn congruence(a: &SkewMatrix, b: &DMatrix<f64>) -> Result<SkewMatrix> {
    if b.ncols() != a.n() {
        return Err(Error::Shape(format!("{}x{} against size {}", b.nrows(), b.ncols(), a.n())));
    }
    SkewMatrix::from_antisymmetrized(&(b * a.matrix() * b.transpose()))
}

/// `Tr(Z W^T) / 2`, which is the sum over strictly upper entries.
pub fn inner(z: &SkewMatrix, w: &SkewMatrix) -> Result<f64> {
    if z.n() != w.n() {
        return Err(Error::Shape("inner product of different sizes".into()));
    }
    Ok(0.5 * z.matrix().component_mul(w.matrix()).sum())
}
