use rayon::prelude::*;
use serde::Serialize;

use crate::{Complex, Error, Result};

/// Fixed chunk length for parallel reductions. Partial sums are added in
/// chunk order so results do not depend on the thread count.
const CHUNK: usize = 1 << 14;

/// Deterministic parallel sum of `f(0) + ... + f(n-1)`.
pub fn det_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).map(&f).sum::<f64>()
        })
        .collect();
    partial.iter().sum()
}

/// Same as [`det_sum`] for complex terms.
pub fn det_sum_c<F>(n: usize, f: F) -> Complex
where
    F: Fn(usize) -> Complex + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Complex> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).map(&f).sum::<Complex>()
        })
        .collect();
    partial.iter().sum()
}

/// One axis of a uniform grid: `n` points `-L + j h`, `h = 2L/n`.
///
/// The point `+L` is not stored; it is identified with `-L` when the
/// grid is read periodically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub n: usize,
    pub half_extent: f64,
}

impl Axis {
    pub fn new(n: usize, half_extent: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Dimension(format!("grid size {n} is not a power of two >= 2")));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::Dimension(format!("half extent {half_extent} must be positive")));
        }
        Ok(Axis { n, half_extent })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn freq_spacing(&self) -> f64 {
        0.5 / self.half_extent
    }

    /// Frequency `(k - n/2) / (2L)` paired with sample `k` by [`crate::numerics::dft_1d`].
    pub fn frequency(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.freq_spacing()
    }

    /// Index of `-x_j`. Index 0 (the point `-L`) maps to itself.
    pub fn mirror(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// True when frequency samples coincide with space samples (`n = 4 L^2`).
    pub fn is_self_dual(&self) -> bool {
        let l2 = 4.0 * self.half_extent * self.half_extent;
        (l2 - self.n as f64).abs() <= 1e-9 * l2
    }
}

/// Tensor grid, last axis fastest in the flat index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        GridSpec { axes }
    }

    pub fn uniform(dim: usize, n: usize, half_extent: f64) -> Result<Self> {
        Ok(GridSpec { axes: vec![Axis::new(n, half_extent)?; dim] })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }

    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for (d, a) in self.axes.iter().enumerate().rev() {
            out[d] = flat % a.n;
            flat /= a.n;
        }
    }

    pub fn coords(&self, flat: usize, out: &mut [f64]) {
        let mut rest = flat;
        for (d, a) in self.axes.iter().enumerate().rev() {
            out[d] = a.point(rest % a.n);
            rest /= a.n;
        }
    }

    /// True if some index sits on the first or last layer of its axis.
    pub fn on_boundary(&self, flat: usize) -> bool {
        let mut rest = flat;
        for a in self.axes.iter().rev() {
            let j = rest % a.n;
            if j == 0 || j + 1 == a.n {
                return true;
            }
            rest /= a.n;
        }
        false
    }
}

/// Sampled complex function on a tensor grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<Complex>,
}

impl GridFunction {
    pub fn sample<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex + Sync,
    {
        let d = spec.dim();
        let values = (0..spec.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; d],
                |x, i| {
                    spec.coords(i, x);
                    f(x)
                },
            )
            .collect();
        GridFunction { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let n = spec.len();
        GridFunction { spec, values: vec![Complex::new(0.0, 0.0); n] }
    }

    pub fn norm_sqr(&self) -> f64 {
        det_sum(self.values.len(), |i| self.values[i].norm_sqr()) * self.spec.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `sum conj(self) * other * dV`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex> {
        if self.spec != other.spec {
            return Err(Error::Shape("grid functions on different grids".into()));
        }
        let s = det_sum_c(self.values.len(), |i| self.values[i].conj() * other.values[i]);
        Ok(s * self.spec.cell_volume())
    }

    pub fn distance(&self, other: &GridFunction) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::Shape("grid functions on different grids".into()));
        }
        let s = det_sum(self.values.len(), |i| (self.values[i] - other.values[i]).norm_sqr());
        Ok((s * self.spec.cell_volume()).sqrt())
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Fraction of squared mass on the outermost layer of the grid.
    pub fn boundary_fraction(&self) -> f64 {
        let total = det_sum(self.values.len(), |i| self.values[i].norm_sqr());
        if total == 0.0 {
            return 0.0;
        }
        let edge = det_sum(self.values.len(), |i| {
            if self.spec.on_boundary(i) {
                self.values[i].norm_sqr()
            } else {
                0.0
            }
        });
        edge / total
    }

    /// Estimated fraction of squared mass lying beyond the grid.
    ///
    /// Per axis, the two outermost layers of the marginal give a decay ratio
    /// `r`, and the tail beyond is summed as a geometric series. Infinite when
    /// a marginal does not decay toward an edge.
    pub fn tail_estimate(&self) -> f64 {
        let mut idx = vec![0; self.spec.dim()];
        let mut marg: Vec<Vec<f64>> = self.spec.axes.iter().map(|a| vec![0.0; a.n]).collect();
        let mut total = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = v.norm_sqr();
            total += w;
            self.spec.multi_index(i, &mut idx);
            for (m, &j) in marg.iter_mut().zip(&idx) {
                m[j] += w;
            }
        }
        if total == 0.0 {
            return 0.0;
        }
        let mut tail = 0.0;
        for m in &marg {
            let n = m.len();
            for (edge, next) in [(m[0], m[1]), (m[n - 1], m[n - 2])] {
                if edge == 0.0 {
                    continue;
                }
                let r = edge / next;
                if !(r < 1.0) {
                    return f64::INFINITY;
                }
                tail += edge * r / (1.0 - r);
            }
        }
        tail / total
    }
}
