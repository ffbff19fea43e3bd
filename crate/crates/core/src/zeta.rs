//! The Pfaffian zeta distribution `Z_s(h) = gamma_{s,2q} int h |Pf|^s` on the
//! space `X_{2q}` of real skew matrices, its functional equation, the
//! unitarizer `F_mu`, and the affine action on `L^2(X_{2q})`.
//!
//! Coordinates on `X_{2q}` are the strictly upper entries in row-major order,
//! with Lebesgue measure and the pairing `(x, xi) = sum_{i<j} x_ij xi_ij`, so
//! `exp(-pi |x|^2)` is its own Fourier transform.
//!
//! Outside the local integrability range `s > -1` the integral is continued
//! with the Cayley-type identity `Pf(d) |Pf|^t = B_q(t) sgn(Pf) |Pf|^{t-1}`
//! (`B_1(t) = t`, `B_2(t) = t (t + 2)`) and integration by parts:
//!
//! `Z_s(h) = gamma (-1)^{qk} / prod_{i=1..k} B_q(s+i) * int Pf(d)^k h sgn(Pf)^k |Pf|^{s+k}`
//!
//! with the smallest `k` making `s + k > -1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gausspoly::GaussPoly;
use crate::numerics::quad::{gauss_legendre, JacobiRule};
use crate::numerics::special::{rgamma, riemann_zeta};
use crate::numerics::{dft_1d, mc_integrate, quad_singular, Axis, Direction, GaussianProposal, GridFunction, GridSpec, McEstimate, RngStream};
use crate::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZetaParams {
    pub q: usize,
    pub s: f64,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaFactor {
    pub value: f64,
    /// Some `Gamma` in the denominator sits at a pole, so `value == 0`.
    pub at_pole: bool,
}

/// `pi^{q (s + 2q - 1) / 2} / prod_{j<q} Gamma((s + 2q - 1)/2 - j)`.
pub fn gamma_factor(s: f64, q: usize) -> GammaFactor {
    let x = 0.5 * (s + 2.0 * q as f64 - 1.0);
    let mut value = PI.powf(q as f64 * x);
    let mut at_pole = false;
    for j in 0..q {
        let arg = x - j as f64;
        if arg <= 0.0 && arg == arg.round() {
            at_pole = true;
        }
        value *= rgamma(arg);
    }
    if at_pole {
        value = 0.0;
    }
    GammaFactor { value, at_pole }
}

/// A function on `X_{2q}`: a sampled grid (only for `q = 1`) or a closed-form
/// Gaussian polynomial in the `q (2q - 1)` entry coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum XFunction {
    Grid(GridFunction),
    Descriptor { q: usize, f: GaussPoly },
}

pub fn x_dim(q: usize) -> usize {
    q * (2 * q - 1)
}

impl XFunction {
    pub fn descriptor(q: usize, f: GaussPoly) -> Result<Self> {
        if f.dim() != x_dim(q) {
            return Err(Error::Shape(format!("q = {q} needs {} coordinates, got {}", x_dim(q), f.dim())));
        }
        Ok(XFunction::Descriptor { q, f })
    }

    pub fn grid(g: GridFunction) -> Result<Self> {
        if g.spec.dim() != 1 {
            return Err(Error::Unsupported("grids on X_{2q} only for q = 1".into()));
        }
        Ok(XFunction::Grid(g))
    }

    pub fn q(&self) -> usize {
        match self {
            XFunction::Grid(_) => 1,
            XFunction::Descriptor { q, .. } => *q,
        }
    }

    /// Samples of a `q = 1` function on a grid.
    pub fn to_grid(&self, axis: Axis) -> Result<GridFunction> {
        match self {
            XFunction::Grid(g) if g.spec.axes[0] == axis => Ok(g.clone()),
            XFunction::Grid(_) => Err(Error::Unsupported("regridding a sampled function".into())),
            XFunction::Descriptor { q: 1, f } => Ok(GridFunction::sample(GridSpec::new(vec![axis]), |x| f.eval(x))),
            XFunction::Descriptor { .. } => Err(Error::Unsupported("grids on X_{2q} only for q = 1".into())),
        }
    }
}

/// Fourier transform on `X_{2q}` with kernel `e^{2 pi i (x, xi)}`. A grid on
/// `[-L, L)` with `N` points maps to the frequency grid of spacing `1/(2L)`.
pub fn fourier_x(h: &XFunction) -> Result<XFunction> {
    match h {
        XFunction::Descriptor { q, f } => Ok(XFunction::Descriptor { q: *q, f: f.fourier() }),
        XFunction::Grid(g) => {
            let ax = g.spec.axes[0];
            let out_ax = Axis::new(ax.n, ax.n as f64 * ax.freq_spacing() / 2.0)?;
            let values = dft_1d(&g.values, &ax, Direction::Forward)?;
            Ok(XFunction::Grid(GridFunction { spec: GridSpec::new(vec![out_ax]), values }))
        }
    }
}

/// `B_q(t)` with `Pf(d) |Pf|^t = B_q(t) sgn(Pf) |Pf|^{t-1}`.
pub fn cayley_b(q: usize, t: f64) -> Result<f64> {
    match q {
        1 => Ok(t),
        2 => Ok(t * (t + 2.0)),
        _ => Err(Error::Unsupported(format!("zeta integrals for q = {q}"))),
    }
}

/// `Pf(d)` applied to a descriptor (`q = 1`: `d/dx12`; `q = 2`:
/// `d12 d34 - d13 d24 + d14 d23` in row-major entry order).
pub fn pf_derivative(q: usize, f: &GaussPoly) -> Result<GaussPoly> {
    match q {
        1 => Ok(f.derivative(0)),
        2 => {
            let a = f.derivative(0).derivative(5);
            let b = f.derivative(1).derivative(4).scale(Complex::new(-1.0, 0.0));
            let c = f.derivative(2).derivative(3);
            a.add(&b)?.add(&c)
        }
        _ => Err(Error::Unsupported(format!("Pf(d) for q = {q}"))),
    }
}

/// Monte Carlo settings for `q = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub stream: u64,
    pub samples: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { seed: 42, stream: 0, samples: 1_000_000 }
    }
}

/// Largest tolerated `stderr / |mean|` for a Monte Carlo zeta value.
pub const MC_REL_LIMIT: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ZetaValue {
    Quadrature { value: Complex, gamma_pole: bool },
    MonteCarlo { estimate: McEstimate, gamma_pole: bool },
}

impl ZetaValue {
    pub fn value(&self) -> Complex {
        match self {
            ZetaValue::Quadrature { value, .. } => *value,
            ZetaValue::MonteCarlo { estimate, .. } => Complex::new(estimate.mean, 0.0),
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            ZetaValue::Quadrature { .. } => 0.0,
            ZetaValue::MonteCarlo { estimate, .. } => estimate.stderr,
        }
    }

    pub fn gamma_pole(&self) -> bool {
        match self {
            ZetaValue::Quadrature { gamma_pole, .. } | ZetaValue::MonteCarlo { gamma_pole, .. } => *gamma_pole,
        }
    }
}

/// Number of integrations by parts and the prefactor they contribute.
fn continuation(q: usize, s: f64) -> Result<(usize, f64)> {
    let mut k = 0usize;
    while s + k as f64 <= -1.0 {
        k += 1;
    }
    let mut factor = if (q * k) % 2 == 0 { 1.0 } else { -1.0 };
    for i in 1..=k {
        let b = cayley_b(q, s + i as f64)?;
        if b == 0.0 {
            return Err(Error::AtPole(format!("B_{q}({}) = 0", s + i as f64)));
        }
        factor /= b;
    }
    Ok((k, factor))
}

/// `Z_s(h)`: adaptive quadrature for `q = 1`, Monte Carlo for `q = 2`.
pub fn zeta_apply(h: &XFunction, s: f64, mc: &McConfig) -> Result<ZetaValue> {
    let XFunction::Descriptor { q, f } = h else {
        return Err(Error::Unsupported("zeta integrals need a closed-form descriptor".into()));
    };
    let q = *q;
    if q > 2 {
        return Err(Error::Unsupported(format!("zeta integrals for q = {q}")));
    }
    let gamma = gamma_factor(s, q);
    if gamma.at_pole {
        return Ok(match q {
            1 => ZetaValue::Quadrature { value: Complex::new(0.0, 0.0), gamma_pole: true },
            _ => ZetaValue::MonteCarlo {
                estimate: McEstimate { mean: 0.0, stderr: 0.0, n_samples: 0, seed: mc.seed },
                gamma_pole: true,
            },
        });
    }
    let (k, factor) = continuation(q, s)?;
    let mut g = f.clone();
    for _ in 0..k {
        g = pf_derivative(q, &g)?;
    }
    let a = s + k as f64;
    let pre = gamma.value * factor;
    if q == 1 {
        let v = line_quadrature(&g, a, k % 2 == 1)?;
        return Ok(ZetaValue::Quadrature { value: v * pre, gamma_pole: false });
    }
    if g.is_zero() {
        let estimate = McEstimate { mean: 0.0, stderr: 0.0, n_samples: mc.samples, seed: mc.seed };
        return Ok(ZetaValue::MonteCarlo { estimate, gamma_pole: false });
    }
    let est = pfaffian_mc(&g, a, k % 2 == 1, mc)?.scale(pre);
    if !(est.rel_stderr() <= MC_REL_LIMIT) {
        return Err(Error::MonteCarlo(format!(
            "stderr/mean = {:.3e} after {} samples",
            est.rel_stderr(),
            est.n_samples
        )));
    }
    Ok(ZetaValue::MonteCarlo { estimate: est, gamma_pole: false })
}

fn support_radius(widths: &[f64]) -> f64 {
    let amin = widths.iter().cloned().fold(f64::INFINITY, f64::min);
    (40.0 / (PI * amin)).sqrt()
}

/// `int g(t) sgn(t)^k |t|^a dt` for a one-dimensional descriptor.
fn line_quadrature(g: &GaussPoly, a: f64, odd: bool) -> Result<Complex> {
    let t_max = support_radius(g.widths());
    let sign = if odd { -1.0 } else { 1.0 };
    quad_singular(|t| g.eval(&[t]) + g.eval(&[-t]) * sign, a, 0.0, t_max, 1e-13)
}

/// Panel rule for `int P(x) e^{-pi a0 x^2} sgn^k |x - x*|^alpha dx` on a line.
struct LineRule {
    jacobi: JacobiRule,
    legendre: (Vec<f64>, Vec<f64>),
}

impl LineRule {
    fn new(alpha: f64) -> Result<Self> {
        Ok(LineRule { jacobi: JacobiRule::new(10, alpha)?, legendre: gauss_legendre(10) })
    }

    /// One side of the singular point: `int_0^D r^alpha phi(r) dr`, where
    /// `phi` is negligible outside `r in [lo, D]`.
    fn side<F: Fn(f64) -> f64>(&self, phi: F, alpha: f64, lo: f64, d: f64, width: f64) -> f64 {
        if d <= 0.0 || lo >= d {
            return 0.0;
        }
        let r1 = width / 16.0;
        let mut total = 0.0;
        if lo < r1 {
            let c = r1.min(d);
            let s: f64 = self.jacobi.nodes.iter().zip(&self.jacobi.weights).map(|(u, w)| phi(c * u) * w).sum();
            total += s * c.powf(alpha + 1.0);
        }
        let (xs, ws) = &self.legendre;
        let mut a = r1;
        while a < d {
            let b = (if a < width { 2.0 * a } else { a + width }).min(d);
            if b > lo {
                let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
                let s: f64 = xs.iter().zip(ws).map(|(x, w)| {
                    let r = m + h * x;
                    w * r.powf(alpha) * phi(r)
                }).sum();
                total += s * h;
            }
            a = b;
        }
        total
    }
}

/// Real coefficients grouped by the power of the first coordinate.
struct SplitPoly {
    terms: Vec<(usize, Vec<u32>, f64)>,
    degree: usize,
}

fn split_first(g: &GaussPoly) -> Result<SplitPoly> {
    let scale = g.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let mut terms = Vec::new();
    let mut degree = 0;
    for (k, c) in g.terms() {
        if c.im.abs() > 1e-12 * scale {
            return Err(Error::Unsupported("Monte Carlo zeta integrals need real-valued integrands".into()));
        }
        degree = degree.max(k[0] as usize);
        terms.push((k[0] as usize, k[1..].to_vec(), c.re));
    }
    Ok(SplitPoly { terms, degree })
}

/// `int g sgn(Pf)^k |Pf|^alpha` over `X_4`, integrating `x12` by the panel
/// rule for each Monte Carlo draw of the other five entries.
fn pfaffian_mc(g: &GaussPoly, alpha: f64, odd: bool, mc: &McConfig) -> Result<McEstimate> {
    let split = split_first(g)?;
    let widths = g.widths().to_vec();
    let a0 = widths[0];
    let rule = LineRule::new(alpha)?;
    let proposal = GaussianProposal::matching_widths(&widths[1..]);
    let sigma0 = (2.0 * PI * a0).sqrt().recip();
    let radius = 8.5 * sigma0;
    let integrand = |y: &[f64]| {
        let mut coef = [0.0; 16];
        for (p, k, c) in &split.terms {
            let mono: f64 = k.iter().zip(y).map(|(&e, y)| y.powi(e as i32)).product();
            coef[*p] += c * mono;
        }
        let poly = |x: f64| {
            let mut v = 0.0;
            for j in (0..=split.degree).rev() {
                v = v * x + coef[j];
            }
            v * (-PI * a0 * x * x).exp()
        };
        let gauss: f64 = y.iter().zip(&widths[1..]).map(|(y, a)| a * y * y).sum();
        let weight = (-PI * gauss).exp();
        // Pf = x12 c + d
        let c = y[4];
        let d = y[1] * y[2] - y[0] * y[3];
        if c == 0.0 {
            let line: f64 = {
                let (xs, ws) = &rule.legendre;
                let h = radius / 8.0;
                (0..16)
                    .map(|p| {
                        let m = -radius + (p as f64 + 0.5) * h;
                        xs.iter().zip(ws).map(|(x, w)| w * poly(m + 0.5 * h * x)).sum::<f64>() * 0.5 * h
                    })
                    .sum()
            };
            let sg = if odd && d < 0.0 { -1.0 } else { 1.0 };
            return weight * line * sg * d.abs().powf(alpha);
        }
        let xs = -d / c;
        let right = rule.side(|r| poly(xs + r), alpha, (-radius - xs).max(0.0), radius - xs, sigma0);
        let left = rule.side(|r| poly(xs - r), alpha, (xs - radius).max(0.0), xs + radius, sigma0);
        let (sr, sl) = if odd { (c.signum(), -c.signum()) } else { (1.0, 1.0) };
        weight * c.abs().powf(alpha) * (sr * right + sl * left)
    };
    mc_integrate(RngStream::new(mc.seed, mc.stream), integrand, &proposal, mc.samples)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalEqCheck {
    /// `Z_{s-(2q-1)}(F h)`.
    pub lhs: ZetaValue,
    /// `Z_{-s}(h)`.
    pub rhs: ZetaValue,
    pub residual: f64,
    /// Combined Monte Carlo error, zero for quadrature.
    pub stderr: f64,
}

/// `|Z_{s-(2q-1)}(F h) - Z_{-s}(h)|`; the two sides use streams `stream` and
/// `stream + 1`.
pub fn functional_eq_check(h: &XFunction, s: f64, mc: &McConfig) -> Result<FunctionalEqCheck> {
    let q = h.q();
    let fh = fourier_x(h)?;
    let lhs = zeta_apply(&fh, s - (2 * q - 1) as f64, mc)?;
    let rhs = zeta_apply(h, -s, &McConfig { stream: mc.stream + 1, ..*mc })?;
    let residual = (lhs.value() - rhs.value()).norm();
    let stderr = lhs.stderr().hypot(rhs.stderr());
    Ok(FunctionalEqCheck { lhs, rhs, residual, stderr })
}

/// Named test functions on `X_{2q}` for the functional equation.
pub fn test_library(q: usize) -> Result<Vec<(String, XFunction)>> {
    let one = Complex::new(1.0, 0.0);
    let d = x_dim(q);
    let mut out = Vec::new();
    match q {
        1 => {
            let mono = |a: f64, k: u32, c: f64| GaussPoly::monomial(vec![a], vec![k], Complex::new(c, 0.0));
            out.push(("gauss".into(), GaussPoly::gaussian(vec![1.0])?));
            out.push(("gauss_wide".into(), GaussPoly::gaussian(vec![0.5])?));
            out.push(("gauss_narrow".into(), GaussPoly::gaussian(vec![2.0])?));
            out.push(("t2_gauss".into(), mono(1.0, 2, 1.0)?));
            out.push(("t4_gauss".into(), mono(0.8, 4, 1.0)?));
            out.push(("mixed".into(), mono(1.3, 0, 0.5)?.add(&mono(1.3, 1, 0.7)?)?.add(&mono(1.3, 2, -0.4)?)?));
            out.push(("odd".into(), mono(1.0, 3, 1.0)?));
        }
        2 => {
            out.push(("gauss".into(), GaussPoly::gaussian(vec![1.0; d])?));
            out.push(("gauss_aniso".into(), GaussPoly::gaussian(vec![0.8, 1.0, 1.2, 1.2, 1.0, 0.8])?));
            let w = vec![1.0; d];
            let pf_times = GaussPoly::monomial(w.clone(), vec![1, 0, 0, 0, 0, 1], one)?
                .add(&GaussPoly::monomial(w.clone(), vec![0, 1, 0, 0, 1, 0], -one)?)?
                .add(&GaussPoly::monomial(w.clone(), vec![0, 0, 1, 1, 0, 0], one)?)?
                .add(&GaussPoly::gaussian(w.clone())?.scale(Complex::new(0.5, 0.0)))?;
            out.push(("half_plus_pf".into(), pf_times));
            let sq = GaussPoly::monomial(w.clone(), vec![2, 0, 0, 0, 0, 0], one)?
                .add(&GaussPoly::gaussian(w)?.scale(Complex::new(0.25, 0.0)))?;
            out.push(("x12_sq".into(), sq));
        }
        _ => return Err(Error::Unsupported(format!("test functions for q = {q}"))),
    }
    out.into_iter().map(|(n, f)| Ok((n, XFunction::descriptor(q, f)?))).collect()
}

/// Weights `W_m` with `sum_m W_m G(m h) ~ int |tau|^{-mu} G(tau) d tau` for
/// smooth `G`, on the frequency grid `tau_m = m h`, `m = -n/2 .. n/2 - 1`.
///
/// Away from the origin `W_m = h |m h|^{-mu}`. The points `|m| <= 2` carry
/// the generalized Euler-Maclaurin end corrections `-zeta(mu - j) g^{(j)}(0)
/// h^{j+1-mu} / j!` for `j = 0, 2, 4`, with the derivatives of the even part
/// `g(r) = G(r) + G(-r)` taken by central differences.
pub fn mu_weights(n: usize, h: f64, mu: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::Guard(format!("mu = {mu} outside [0, 1)")));
    }
    if n < 8 {
        return Err(Error::Guard("frequency grid too small for the end correction".into()));
    }
    let c = n / 2;
    let hh = h.powf(1.0 - mu);
    let mut w: Vec<f64> = (0..n)
        .map(|k| {
            let m = (k as isize - c as isize).unsigned_abs();
            if m == 0 { 0.0 } else { hh * (m as f64).powf(-mu) }
        })
        .collect();
    let (z0, z2, z4) = (riemann_zeta(mu), riemann_zeta(mu - 2.0), riemann_zeta(mu - 4.0));
    // coefficient of g(0), g(h), g(2h) in the corrections
    let c0 = -z0 * hh - z2 / 2.0 * hh * (-30.0 / 12.0) - z4 / 24.0 * hh * 6.0;
    let c1 = -z2 / 2.0 * hh * (32.0 / 12.0) - z4 / 24.0 * hh * (-8.0);
    let c2 = -z2 / 2.0 * hh * (-2.0 / 12.0) - z4 / 24.0 * hh * 2.0;
    // g(0) = 2 G_0, g(jh) = G_j + G_-j
    w[c] += 2.0 * c0;
    w[c + 1] += c1;
    w[c - 1] += c1;
    w[c + 2] += c2;
    w[c - 2] += c2;
    if w.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::Guard(format!("negative corrected weight for mu = {mu}")));
    }
    Ok(w)
}

fn grid_of(f: &XFunction) -> Result<&GridFunction> {
    match f {
        XFunction::Grid(g) => Ok(g),
        _ => Err(Error::Unsupported("expected a q = 1 grid function".into())),
    }
}

/// `F^{-1}(|tau|^{-mu/2} F f)` on a `q = 1` grid, with the multiplier near
/// `tau = 0` replaced by the square root of the corrected weights.
pub fn f_mu(f: &XFunction, mu: f64) -> Result<XFunction> {
    let g = grid_of(f)?;
    let ax = g.spec.axes[0];
    let fh = dft_1d(&g.values, &ax, Direction::Forward)?;
    let h = ax.freq_spacing();
    let w = mu_weights(ax.n, h, mu)?;
    let scaled: Vec<Complex> = fh.iter().zip(&w).map(|(v, w)| v * (w / h).sqrt()).collect();
    let values = dft_1d(&scaled, &ax, Direction::Inverse)?;
    Ok(XFunction::Grid(GridFunction { spec: g.spec.clone(), values }))
}

/// `|| |Pf|^{-mu/2} F f ||_2` (`q = 1`): corrected grid sum for sampled
/// functions, adaptive quadrature for descriptors.
pub fn cmu_norm(f: &XFunction, mu: f64) -> Result<f64> {
    match f {
        XFunction::Grid(g) => {
            let ax = g.spec.axes[0];
            let fh = dft_1d(&g.values, &ax, Direction::Forward)?;
            let w = mu_weights(ax.n, ax.freq_spacing(), mu)?;
            let s: f64 = fh.iter().zip(&w).map(|(v, w)| w * v.norm_sqr()).sum();
            Ok(s.sqrt())
        }
        XFunction::Descriptor { q: 1, f } => {
            if !(0.0..1.0).contains(&mu) {
                return Err(Error::Guard(format!("mu = {mu} outside [0, 1)")));
            }
            let ff = f.fourier();
            let t_max = support_radius(ff.widths());
            let v = quad_singular(
                |t| Complex::new(ff.eval(&[t]).norm_sqr() + ff.eval(&[-t]).norm_sqr(), 0.0),
                -mu,
                0.0,
                t_max,
                1e-14,
            )?;
            Ok(v.re.sqrt())
        }
        XFunction::Descriptor { .. } => Err(Error::Unsupported("C(mu) norm only for q = 1".into())),
    }
}

/// `phi(W - Z)`: exact for descriptors, a Fourier phase on grids. On grids the
/// mass that would wrap around must be below the tail tolerance.
pub fn pi_sharp_translate(z12: f64, phi: &XFunction) -> Result<XFunction> {
    match phi {
        XFunction::Descriptor { .. } => Err(Error::Unsupported("translation of a centered descriptor".into())),
        XFunction::Grid(g) => {
            let ax = g.spec.axes[0];
            let total: f64 = g.values.iter().map(|v| v.norm_sqr()).sum();
            let band = z12.abs() + 2.0 * ax.spacing();
            let edge: f64 = g
                .values
                .iter()
                .enumerate()
                .filter(|(j, _)| {
                    let x = ax.point(*j);
                    if z12 >= 0.0 { x >= ax.half_extent - band } else { x <= -ax.half_extent + band }
                })
                .map(|(_, v)| v.norm_sqr())
                .sum();
            if total > 0.0 && edge / total > crate::nilgroup::TAIL_TOL {
                return Err(Error::SupportEscape(edge / total));
            }
            let fh = dft_1d(&g.values, &ax, Direction::Forward)?;
            let shifted: Vec<Complex> = fh
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex::from_polar(1.0, 2.0 * PI * z12 * ax.frequency(k)))
                .collect();
            let values = dft_1d(&shifted, &ax, Direction::Inverse)?;
            Ok(XFunction::Grid(GridFunction { spec: g.spec.clone(), values }))
        }
    }
}

/// Exponent deviation between the unitary amplitude `|det g|^{(2q-1)/2}` and
/// the stated `e^{-rho t}` with `det g = e^{2qt}`, in powers of `|det g|`.
pub fn amplitude_deviation(q: usize) -> f64 {
    (2 * q - 1) as f64
}

/// `|det g|^{(2q-1)/2} phi(g^T W g)` for `g` in `GL+(2)`; on `X_2` this is
/// `|d|^{1/2} phi(d t)` with `d = det g`. Grids are resampled by
/// band-limited interpolation.
pub fn pi_sharp_gl(g: &nalgebra::DMatrix<f64>, phi: &XFunction) -> Result<XFunction> {
    if g.nrows() != 2 || g.ncols() != 2 {
        return Err(Error::Unsupported("the action on grids is implemented for q = 1".into()));
    }
    let d = g.determinant();
    if !(d > 0.0) {
        return Err(Error::Precondition(format!("det g = {d} must be positive")));
    }
    let amp = d.sqrt();
    match phi {
        XFunction::Descriptor { q: 1, f } => Ok(XFunction::Descriptor { q: 1, f: f.dilate(d)?.scale(Complex::new(amp, 0.0)) }),
        XFunction::Descriptor { .. } => Err(Error::Unsupported("the action on descriptors is implemented for q = 1".into())),
        XFunction::Grid(gr) => {
            let ax = gr.spec.axes[0];
            let fh = dft_1d(&gr.values, &ax, Direction::Forward)?;
            let dt = ax.freq_spacing();
            let values = (0..ax.n)
                .map(|j| {
                    let x = d * ax.point(j);
                    let s: Complex = fh
                        .iter()
                        .enumerate()
                        .map(|(k, v)| v * Complex::from_polar(1.0, -2.0 * PI * x * ax.frequency(k)))
                        .sum();
                    s * dt * amp
                })
                .collect();
            Ok(XFunction::Grid(GridFunction { spec: gr.spec.clone(), values }))
        }
    }
}
