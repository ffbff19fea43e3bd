use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::{CheckRecord, Config};
use crate::error::Result;
use crate::gausspoly::GaussPoly;
use crate::liegroups::{ad_xi_spectrum, factorize_lemma21, GlElement, GlKind, GroupConstants};
use crate::nilgroup::{gl_action, multiply, pi_gl, pi_translate, q_kernel, NilElement, NilGridFunction};
use crate::numerics::{Axis, GridSpec, RngStream};
use crate::orbits::{base_point, membership, orbit_solve, stabilizer_check, strict_inclusion_witness};
use crate::repsim::*;
use crate::skewlin::{congruence, pfaffian, skew_canonical, SkewMatrix, SymplecticForm};
use crate::zeta::{
    cmu_norm, f_mu, functional_eq_check, pi_sharp_gl, pi_sharp_translate, test_library, zeta_apply, McConfig, XFunction,
};
use crate::Complex;

fn uniform(r: &mut ChaCha20Rng) -> f64 {
    r.gen_range(-1.0..1.0)
}

fn random_skew(r: &mut ChaCha20Rng, n: usize) -> Result<SkewMatrix> {
    let upper: Vec<f64> = (0..n * n.saturating_sub(1) / 2).map(|_| uniform(r)).collect();
    SkewMatrix::from_upper(n, &upper)
}

fn random_vector(r: &mut ChaCha20Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| uniform(r))
}

fn random_matrix(r: &mut ChaCha20Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| uniform(r))
}

fn random_nil(r: &mut ChaCha20Rng, p: usize) -> Result<NilElement> {
    NilElement::new(random_skew(r, p)?, random_vector(r, p))
}

/// Signed sum over perfect matchings, independent of any elimination.
fn pfaffian_by_matchings(a: &DMatrix<f64>) -> f64 {
    fn rec(a: &DMatrix<f64>, free: &mut Vec<usize>) -> f64 {
        if free.is_empty() {
            return 1.0;
        }
        let i = free.remove(0);
        let mut total = 0.0;
        for k in 0..free.len() {
            let j = free.remove(k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * a[(i, j)] * rec(a, free);
            free.insert(k, j);
        }
        free.insert(0, i);
        total
    }
    let mut free: Vec<usize> = (0..a.nrows()).collect();
    rec(a, &mut free)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub(super) fn skew(cfg: &Config, stream: RngStream) -> Result<Vec<CheckRecord>> {
    let sizes: Vec<usize> = match cfg.p {
        Some(p) if p % 2 == 0 => vec![p],
        Some(p) => vec![p - 1, p + 1].into_iter().filter(|&n| n > 0).collect(),
        None => vec![2, 4, 6, 8],
    };
    let mut out = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let seed = stream.child(i as u64);
        let mut r = seed.rng();
        let (mut sq, mut cong, mut oracle, mut canon) = (vec![], vec![], vec![], vec![]);
        for _ in 0..cfg.trials {
            let a = random_skew(&mut r, n)?;
            let pf = pfaffian(&a)?;
            sq.push(rel(pf * pf, a.matrix().determinant()));
            let b = random_matrix(&mut r, n);
            let lhs = pfaffian(&congruence(&a, &b)?)?;
            cong.push(rel(lhs, b.determinant() * pf));
            if n <= 6 {
                oracle.push(rel(pf, pfaffian_by_matchings(a.matrix())));
            }
            canon.push(skew_canonical(&a).residual(&a));
        }
        let param = format!("n={n} trials={}", cfg.trials);
        out.push(CheckRecord::worst("skew.pf_squared", "Pf(A)^2 = det A", &param, sq, cfg.tol("pfaffian")).with_seed(cfg.seed));
        out.push(
            CheckRecord::worst("skew.congruence", "Pf(B A B^T) = det B Pf(A)", &param, cong, cfg.tol("pfaffian"))
                .with_seed(cfg.seed),
        );
        if n <= 6 {
            out.push(
                CheckRecord::worst("skew.matching_sum", "Pf(A) = signed sum over perfect matchings", &param, oracle, cfg.tol("matching"))
                    .with_seed(cfg.seed),
            );
        }
        out.push(
            CheckRecord::worst("skew.canonical", "Z = R^T blockdiag(w_i J) R", &param, canon, cfg.tol("canonical"))
                .with_seed(cfg.seed),
        );
    }
    Ok(out)
}

pub(super) fn lie(cfg: &Config, stream: RngStream) -> Result<Vec<CheckRecord>> {
    let odd: Vec<usize> = cfg.p.map_or(vec![3, 5], |p| vec![p]);
    let spectra: Vec<usize> = cfg.p.map_or(vec![1, 3, 5, 7], |p| vec![p]);
    let mut out = Vec::new();
    for (i, &p) in odd.iter().enumerate() {
        let c = GroupConstants::new(p)?;
        let mut r = stream.child(i as u64).rng();
        let mut res = Vec::new();
        for _ in 0..100 {
            let z = random_skew(&mut r, p)?;
            let v = random_vector(&mut r, p);
            res.push(factorize_lemma21(&z, &v, &c)?);
        }
        out.push(
            CheckRecord::worst("lie.factorization", "exp(n_(z,v)) factors through the block unipotents", format!("p={p} samples=100"), res, cfg.tol("factorization"))
                .with_seed(cfg.seed),
        );
    }
    for &p in &spectra {
        let c = GroupConstants::new(p)?;
        let spec = ad_xi_spectrum(&c)?;
        let get = |e: i64| spec.iter().find(|(x, _)| *x == e).map_or(0, |(_, m)| *m);
        let half = p * (p - 1) / 2;
        let want = [(-2, half), (-1, p), (0, p * p), (1, p), (2, half)];
        let mut mismatches = want.iter().filter(|(e, m)| get(*e) != *m).count();
        mismatches += spec.iter().filter(|(e, _)| e.abs() > 2).count();
        out.push(CheckRecord::new(
            "lie.ad_xi",
            "ad xi eigenvalues -2, -1, 0, 1, 2 with multiplicities p(p-1)/2, p, p^2, p, p(p-1)/2",
            format!("p={p}"),
            mismatches as f64,
            0.0,
        ));
    }
    Ok(out)
}

pub(super) fn nil(cfg: &Config, stream: RngStream) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let a = 0.36;
    let f = GaussPoly::gaussian(vec![a, 1.1 * a, 0.95 * a, a, 1.05 * a, 0.9 * a])?;
    let n0 = NilElement::from_coords(3, &[0.2, -0.15, 0.1, 0.2, -0.25, 0.15])?;

    let phi = NilGridFunction::from_gauss(3, GridSpec::uniform(6, 16, 4.0)?, f.clone())?;
    let base = phi.norm()?;
    let gs = [
        DMatrix::identity(3, 3) * 1.15,
        DMatrix::from_row_slice(3, 3, &[1.1, 0.1, 0.0, -0.05, 0.95, 0.1, 0.0, 0.08, 1.0]),
    ];
    let t = pi_translate(&n0, &phi)?.norm()?;
    out.push(CheckRecord::new("nil.unitary_translate", "|pi(n0) f| = |f|", "p=3 N=16 L=4", (t / base - 1.0).abs(), cfg.tol("parseval")));
    let mut res = Vec::new();
    for g in &gs {
        let d = pi_gl(&GlElement::new(g.clone(), GlKind::P)?, &phi)?.norm()?;
        res.push((d / base - 1.0).abs());
    }
    out.push(CheckRecord::worst("nil.unitary_gl", "|pi(g) f| = |f|", "p=3 N=16 L=4", res, cfg.tol("parseval")));

    let phi = NilGridFunction::from_gauss(3, GridSpec::uniform(6, 8, 4.0)?, f)?;
    let g = GlElement::new(DMatrix::from_row_slice(3, 3, &[1.1, 0.2, 0.0, 0.0, 0.9, -0.1, 0.1, 0.0, 1.05]), GlKind::P)?;
    let g_inv = GlElement::new(g.m.clone().try_inverse().expect("invertible by construction"), GlKind::P)?;
    let lhs = pi_gl(&g, &pi_translate(&n0, &pi_gl(&g_inv, &phi)?)?)?.materialize()?;
    let rhs = pi_translate(&gl_action(&g, &n0)?, &phi)?.materialize()?;
    out.push(CheckRecord::new(
        "nil.covariance",
        "pi(g) pi(n) pi(g)^-1 = pi(g . n)",
        "p=3 N=8 L=4",
        lhs.distance(&rhs)? / rhs.norm(),
        cfg.tol("covariance"),
    ));

    let mut r = stream.rng();
    let ratios: Vec<f64> = (0..1000)
        .map(|_| random_nil(&mut r, 3))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|n| n.m().matrix().determinant().abs() > 1e-6)
        .map(|n| q_kernel(&n.z, &n.v) / n.m().matrix().determinant())
        .collect();
    let dev: Vec<f64> = ratios.iter().map(|x| (x - 2.0).abs()).collect();
    out.push(
        CheckRecord::worst("nil.q_kernel_ratio", "det(z + v v^T / 2) / det M(z, v) = 2", format!("p=3 samples={}", ratios.len()), dev, cfg.tol("q_kernel"))
            .with_seed(cfg.seed),
    );
    Ok(out)
}

fn random_sp_embedded(r: &mut ChaCha20Rng, q: usize) -> DMatrix<f64> {
    let k = 2 * (q - 1);
    let s = random_matrix(r, k) * 0.4;
    let s = &s + s.transpose();
    let j = SymplecticForm::new(q - 1).matrix.into_matrix();
    let a = (j * s).exp();
    let mut g = DMatrix::identity(k + 1, k + 1);
    g.view_mut((0, 0), (k, k)).copy_from(&a);
    g
}

pub(super) fn orbit(cfg: &Config, stream: RngStream) -> Result<Vec<CheckRecord>> {
    let ps: Vec<usize> = cfg.p.map_or(vec![3, 5], |p| vec![p]);
    let mut out = Vec::new();
    for (i, &p) in ps.iter().enumerate() {
        let mut r = stream.child(i as u64).rng();
        let (mut res, mut rejected) = (Vec::new(), 0usize);
        while res.len() < 500 {
            let n = random_nil(&mut r, p)?;
            // draws the solver's guard counts as on the boundary of Omega go back
            let m = n.m();
            if m.matrix().determinant().abs() < 1e-8 * m.frobenius().powi(p as i32 + 1) {
                rejected += 1;
                continue;
            }
            res.push(orbit_solve(&n)?.residual);
        }
        let mut rec = CheckRecord::worst("orbit.solve", "g . n = o", format!("p={p} samples=500"), res, cfg.tol("orbit")).with_seed(cfg.seed);
        rec.note = Some(format!("{rejected} draws with |det M| < 1e-8 |M|^(p+1) redrawn"));
        out.push(rec);

        let q = (p + 1) / 2;
        if q >= 2 {
            let mut r = stream.child(100 + i as u64).rng();
            let mut failures = 0usize;
            for _ in 0..50 {
                let c = stabilizer_check(&random_sp_embedded(&mut r, q))?;
                failures += usize::from(!(c.pass && c.agree));
            }
            out.push(
                CheckRecord::new("orbit.stabilizer", "diag(Sp, 1) fixes o", format!("q={q} samples=50"), failures as f64, 0.0)
                    .with_seed(cfg.seed),
            );
            let w = strict_inclusion_witness(q)?;
            let pt = membership(&w);
            let sol = orbit_solve(&w)?;
            let residual = if pt.in_omega && !pt.in_o { sol.residual } else { f64::INFINITY };
            out.push(CheckRecord::new("orbit.witness", "a point of Omega outside O", format!("q={q}"), residual, cfg.tol("witness")));
        }
    }
    Ok(out)
}

fn q1_grid(f: &XFunction, axis: Axis) -> Result<XFunction> {
    XFunction::grid(f.to_grid(axis)?)
}

pub(super) fn zeta(cfg: &Config, _stream: RngStream) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let qs: Vec<usize> = cfg.q.map_or(vec![1, 2], |q| vec![q]);
    let axis = Axis::new(cfg.grid_n, cfg.grid_l)?;
    if qs.contains(&1) {
        let ss: Vec<f64> = cfg.s.map_or(vec![-0.5, 0.3, 0.7, 1.5], |s| vec![s]);
        let mc = McConfig { seed: cfg.seed, stream: 0, samples: cfg.mc_samples };
        for (name, h) in test_library(1)? {
            let res = ss.iter().map(|&s| Ok(functional_eq_check(&h, s, &mc)?.residual)).collect::<Result<Vec<_>>>()?;
            out.push(CheckRecord::worst(
                "zeta.functional_equation",
                "Z_{s-(2q-1)}(F h) = Z_{-s}(h)",
                format!("q=1 h={name} s={ss:?}"),
                res,
                cfg.tol("zeta_q1"),
            ));
        }
        let gauss = XFunction::descriptor(1, GaussPoly::gaussian(vec![1.0])?)?;
        let res = ss.iter().map(|&s| Ok((zeta_apply(&gauss, s, &mc)?.value() - 1.0).norm())).collect::<Result<Vec<_>>>()?;
        out.push(CheckRecord::worst("zeta.self_dual_gaussian", "Z_s(exp(-pi |x|^2)) = 1", format!("q=1 s={ss:?}"), res, cfg.tol("zeta_gauss")));

        let f = XFunction::descriptor(
            1,
            GaussPoly::gaussian(vec![1.2])?.add(&GaussPoly::monomial(vec![1.2], vec![2], Complex::new(0.6, 0.0))?)?,
        )?;
        let g = q1_grid(&f, axis)?;
        for mu in [0.1, 0.5, 0.9] {
            let XFunction::Grid(img) = f_mu(&g, mu)? else { unreachable!("grid input gives grid output") };
            let oracle = cmu_norm(&f, mu)?;
            out.push(CheckRecord::new(
                "zeta.f_mu_isometry",
                "|F_mu f|^2 = |f|^2 in the C_mu norm",
                format!("q=1 mu={mu} N={} L={}", axis.n, axis.half_extent),
                rel(img.norm_sqr(), oracle * oracle),
                cfg.tol("f_mu"),
            ));
        }

        let phi = q1_grid(&XFunction::descriptor(1, GaussPoly::gaussian(vec![1.5])?)?, axis)?;
        let XFunction::Grid(pg) = &phi else { unreachable!("built as a grid") };
        let gm = DMatrix::from_row_slice(2, 2, &[1.2, 0.3, -0.1, 0.9]);
        let gi = gm.clone().try_inverse().expect("invertible by construction");
        let norms = [pi_sharp_translate(0.8, &phi)?, pi_sharp_gl(&gm, &phi)?]
            .into_iter()
            .map(|x| match x {
                XFunction::Grid(x) => rel(x.norm(), pg.norm()),
                _ => f64::INFINITY,
            })
            .collect();
        out.push(CheckRecord::worst("zeta.pi_sharp_unitary", "|pi(g) phi| = |phi|", "q=1 z=0.8", norms, cfg.tol("pi_sharp")));
        let lhs = pi_sharp_gl(&gm, &pi_sharp_translate(0.8, &pi_sharp_gl(&gi, &phi)?)?)?;
        let rhs = pi_sharp_translate(0.8 / gm.determinant(), &phi)?;
        let residual = match (lhs, rhs) {
            (XFunction::Grid(l), XFunction::Grid(r)) => l.distance(&r)?,
            _ => f64::INFINITY,
        };
        out.push(CheckRecord::new("zeta.pi_sharp_covariance", "G T_Z G^-1 = T_{Z / det g}", "q=1 z=0.8", residual, cfg.tol("pi_sharp")));
    }
    if qs.contains(&2) {
        let s = cfg.s.unwrap_or(0.5);
        for (i, (name, h)) in test_library(2)?.into_iter().enumerate() {
            let mc = McConfig { seed: cfg.seed, stream: 2 * i as u64, samples: cfg.mc_samples };
            let r = functional_eq_check(&h, s, &mc)?;
            let param = format!("q=2 h={name} s={s} samples={}", cfg.mc_samples);
            out.push(CheckRecord::monte_carlo(
                "zeta.functional_equation_mc",
                "Z_{s-(2q-1)}(F h) = Z_{-s}(h)",
                &param,
                r.residual,
                r.stderr,
                cfg.tol("mc_sigmas"),
                cfg.seed,
            ));
            let scale = r.lhs.value().norm().max(r.rhs.value().norm());
            out.push(
                CheckRecord::new("zeta.mc_relative_stderr", "stderr / |Z| of the Monte Carlo estimate", &param, r.stderr / scale, cfg.tol("mc_rel_stderr"))
                    .with_seed(cfg.seed),
            );
        }
    }
    Ok(out)
}

fn gauss6(a: [f64; 6]) -> Result<GaussPoly> {
    GaussPoly::gaussian(a.to_vec())
}

fn nil_fn(f: GaussPoly) -> Result<NilGridFunction> {
    NilGridFunction::from_gauss(3, GridSpec::uniform(6, 8, 4.0)?, f)
}

fn el(c: [f64; 6]) -> Result<NilElement> {
    NilElement::from_coords(3, &c)
}

pub(super) fn rep(cfg: &Config, stream: RngStream) -> Result<Vec<CheckRecord>> {
    let ax = Axis::new(cfg.grid_n, cfg.grid_l)?;
    let grid = format!("q=2 N={} L={}", ax.n, ax.half_extent);
    let mut out = Vec::new();

    let split = heisenberg_split(2)?;
    out.push(CheckRecord::new(
        "rep.heisenberg_split",
        "n = h + n0 with n0 in the radical of the form of o",
        "q=2",
        split.orthogonality_residual() + split.radical_residual(),
        cfg.tol("split"),
    ));

    let els = [
        el([0.5, 0.0, 0.0, 0.0, 0.0, 0.0])?,
        el([0.0, 0.0, 0.0, 0.9, 0.0, 0.0])?,
        el([0.0, 0.0, 0.0, 0.0, -0.7, 0.0])?,
        el([0.0, 0.0, 0.0, 0.0, 0.0, 0.3])?,
        el([0.2, 0.1, 0.3, -0.6, 0.4, 0.5])?,
    ];
    let res = els.iter().map(|n| Ok(lambda_o(n, ax)?.unitarity_residual())).collect::<Result<Vec<_>>>()?;
    out.push(CheckRecord::worst("rep.lambda_unitary", "lambda_o(n)* lambda_o(n) = I", &grid, res, cfg.tol("lambda_unitary")));

    let mut r = stream.rng();
    let mut hom = Vec::new();
    for _ in 0..100 {
        let mut x = [0.0; 6];
        let mut y = [0.0; 6];
        x.iter_mut().chain(y.iter_mut()).for_each(|v| *v = uniform(&mut r));
        let (a, b) = (el(x)?, el(y)?);
        let lhs = lambda_o(&a, ax)?.compose(&lambda_o(&b, ax)?)?;
        hom.push(lhs.probe_residual(&lambda_o(&multiply(&a, &b)?, ax)?)?);
    }
    out.push(
        CheckRecord::worst("rep.lambda_homomorphism", "lambda_o(a) lambda_o(b) = lambda_o(ab)", format!("{grid} pairs=100"), hom, cfg.tol("lambda_hom"))
            .with_seed(cfg.seed),
    );

    let gens = [
        SlGenerator::Identity,
        SlGenerator::Dilation(2.0),
        SlGenerator::Dilation(0.7),
        SlGenerator::Shear(0.8),
        SlGenerator::Shear(-1.3),
        SlGenerator::Rotation,
    ];
    let ns = [
        el([0.0, 0.0, 0.0, 1.0, 0.0, 0.0])?,
        el([0.0, 0.0, 0.0, 0.0, 1.0, 0.0])?,
        el([0.4, 0.2, -0.3, 0.5, -0.6, 0.7])?,
        el([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])?,
    ];
    let mut cov = Vec::new();
    for g in gens {
        for n in &ns {
            cov.push(covariance_check(g, n, ax)?);
        }
    }
    out.push(CheckRecord::worst(
        "rep.metaplectic_covariance",
        "tau(g) lambda_o(n) tau(g)* = lambda_o(g . n)",
        format!("{grid} generators=6 elements=4"),
        cov,
        cfg.tol("metaplectic"),
    ));
    let par = parity_check(&gens, ax)?;
    out.push(CheckRecord::worst("rep.parity", "[tau(g), U] = 0", &grid, par, cfg.tol("parity")));

    let o = membership(&base_point(2)?);
    let mut hs = Vec::new();
    for f in [
        gauss6([1.0; 6])?,
        gauss6([0.7, 1.2, 0.9, 1.4, 0.6, 1.1])?,
        gauss6([1.0, 1.0, 1.0, 1.2, 0.8, 1.0])?.add(&GaussPoly::monomial(
            vec![1.0, 1.0, 1.0, 1.2, 0.8, 1.0],
            vec![0, 0, 0, 1, 1, 0],
            Complex::new(0.7, 0.0),
        )?)?,
    ] {
        let nf = nil_fn(f)?;
        let a = group_fourier(&nf, &o, ax)?;
        let b = weyl_kernel(&partial_integral_twisted(&nf)?, ax)?;
        hs.push(a.sub(&b)?.hs_norm() / b.hs_norm());
    }
    out.push(CheckRecord::worst("rep.weyl_vs_group_fourier", "f^(o) = Op(int_{n0} f chi_o)", &grid, hs, cfg.tol("hs_agreement")));

    let fam = [
        gauss6([1.0; 6])?,
        gauss6([0.5, 1.5, 0.8, 1.2, 0.6, 0.9])?,
        gauss6([2.0, 0.7, 1.1, 0.8, 1.5, 1.3])?,
    ]
    .into_iter()
    .map(nil_fn)
    .collect::<Result<Vec<_>>>()?;
    let t = trace_check(&fam, ax)?;
    let mut rec = CheckRecord::new("rep.trace_ratio", "Tr(f^(o) U) = C (F f)(o)", format!("{grid} functions=3"), t.spread, cfg.tol("trace_spread"));
    let mean = t.ratios.iter().sum::<Complex>() / t.ratios.len() as f64;
    rec.note = Some(format!("C = {:.9} {:+.3e}i", mean.re, mean.im));
    out.push(rec);

    let sample = sample_o(10, stream.child(1))?;
    let id = schur_experiment(&DMatrix::identity(3, 3), &sample, ax)?;
    out.push(
        CheckRecord::new("rep.schur_identity", "g = I commutes with T_1", format!("{grid} orbits=10"), id.commutator, cfg.tol("schur_identity"))
            .with_seed(cfg.seed),
    );
    let g = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
    let s = schur_experiment(&g, &sample, ax)?;
    let mut rec = CheckRecord::new(
        "rep.schur_witness",
        "T_1 does not commute with pi(g)",
        format!("{grid} g=diag(2,1,1) orbits=10"),
        cfg.tol("schur_ratio") * s.baseline / s.commutator,
        1.0,
    )
    .with_seed(cfg.seed);
    rec.note = Some(format!(
        "commutator {:.6e}, baseline {:.6e}, intertwiner {:.3e}",
        s.commutator, s.baseline, s.intertwiner_residual
    ));
    out.push(rec);
    Ok(out)
}
