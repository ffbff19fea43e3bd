use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::Config;
use crate::error::{Error, Result};
use crate::gausspoly::GaussPoly;
use crate::liegroups::{solve_nu_compat, GlElement, GlKind, GroupConstants, NuCompat};
use crate::nilgroup::{pi_translate, NilElement, NilGridFunction};
use crate::numerics::{Axis, GridFunction, GridSpec, RngStream};
use crate::orbits::{base_point, membership};
use crate::repsim::{group_fourier, partial_integral_twisted, weyl_kernel};
use crate::zeta::{cmu_norm, f_mu, XFunction};
use crate::Complex;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuReport {
    pub p: usize,
    pub seed: u64,
    pub fits: Vec<(f64, NuCompat)>,
}

/// Fits the character-matching law `nu = a mu + b` at a few `mu`. The fit
/// is compared with the claimed `(p / (p + 1), 0)` but never gated.
pub fn explore_nu(cfg: &Config) -> Result<NuReport> {
    let p = cfg.p.unwrap_or(3);
    let c = GroupConstants::new(p)?;
    let mut r = RngStream::new(cfg.seed, 7).rng();
    let samples = (0..5)
        .map(|_| {
            let m = DMatrix::from_fn(p, p, |_, _| r.gen_range(-1.0..1.0)) + DMatrix::identity(p, p) * 2.0;
            GlElement::new(m, GlKind::P)
        })
        .collect::<Result<Vec<_>>>()?;
    let fits = [0.0, 0.4, 1.0]
        .into_iter()
        .map(|mu| Ok((mu, solve_nu_compat(mu, &c, &samples)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NuReport { p, seed: cfg.seed, fits })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotPoint {
    pub curve: &'static str,
    pub n: usize,
    pub half_extent: f64,
    pub residual: f64,
}

/// Residual against grid size for the discretized operators.
pub fn plot_data(_cfg: &Config) -> Result<Vec<PlotPoint>> {
    let mut out = Vec::new();

    let f = XFunction::descriptor(
        1,
        GaussPoly::gaussian(vec![1.2])?.add(&GaussPoly::monomial(vec![1.2], vec![2], Complex::new(0.6, 0.0))?)?,
    )?;
    let oracle = cmu_norm(&f, 0.5)?.powi(2);
    for n in [32, 64, 128, 256, 512] {
        let axis = Axis::new(n, 8.0)?;
        let XFunction::Grid(img) = f_mu(&XFunction::grid(f.to_grid(axis)?)?, 0.5)? else {
            unreachable!("grid input gives grid output")
        };
        let residual = (img.norm_sqr() - oracle).abs() / oracle;
        out.push(PlotPoint { curve: "f_mu_isometry", n, half_extent: 8.0, residual });
    }

    let shift = 0.3711;
    for n in [64, 128, 256, 512, 1024] {
        let spec = GridSpec::uniform(1, n, 6.0)?;
        let gauss = |x: f64| Complex::new((-std::f64::consts::PI * x * x).exp(), 0.0);
        let g = GridFunction::sample(spec.clone(), |x| gauss(x[0]));
        let moved = pi_translate(&NilElement::from_coords(1, &[shift])?, &NilGridFunction::from_samples(1, g)?)?;
        let want = GridFunction::sample(spec, |x| gauss(x[0] - shift));
        out.push(PlotPoint { curve: "cubic_shift", n, half_extent: 6.0, residual: moved.materialize()?.max_abs_diff(&want) });
    }

    let o = membership(&base_point(2)?);
    let nf = NilGridFunction::from_gauss(3, GridSpec::uniform(6, 8, 4.0)?, GaussPoly::gaussian(vec![0.7, 1.2, 0.9, 1.4, 0.6, 1.1])?)?;
    let kernel = partial_integral_twisted(&nf)?;
    for n in [32, 64, 128, 256] {
        let axis = Axis::new(n, 8.0)?;
        let a = group_fourier(&nf, &o, axis)?;
        let b = weyl_kernel(&kernel, axis)?;
        out.push(PlotPoint { curve: "weyl_vs_group_fourier", n, half_extent: 8.0, residual: a.sub(&b)?.hs_norm() / b.hs_norm() });
    }
    Ok(out)
}

/// CSV with header `curve,n,half_extent,residual`.
pub fn write_plot_csv<W: std::io::Write>(points: &[PlotPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p).map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(())
}
