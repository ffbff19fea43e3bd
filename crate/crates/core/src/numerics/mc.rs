use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

/// Samples drawn per stream in [`mc_integrate`].
pub const MC_CHUNK: usize = 1 << 13;

/// A `(seed, stream)` pair naming one ChaCha20 keystream.
///
/// ChaCha20 is counter based, so a stream reproduces bit for bit on any
/// platform and streams with different ids never overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut r = ChaCha20Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }

    /// Child stream; children of distinct parents do not collide for
    /// fewer than 2^32 children each.
    pub fn child(&self, i: u64) -> RngStream {
        RngStream { seed: self.seed, stream: (self.stream << 32) ^ (i + 1) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl McEstimate {
    pub fn scale(self, c: f64) -> McEstimate {
        McEstimate { mean: self.mean * c, stderr: self.stderr * c.abs(), ..self }
    }

    pub fn rel_stderr(&self) -> f64 {
        self.stderr / self.mean.abs()
    }
}

pub trait Proposal: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha20Rng, out: &mut [f64]);
    fn density(&self, x: &[f64]) -> f64;
}

/// Independent centered normals.
#[derive(Clone, Debug)]
pub struct GaussianProposal {
    pub sigma: Vec<f64>,
}

impl GaussianProposal {
    /// Proposal matching the weight `exp(-pi a_i x_i^2)` on each axis.
    pub fn matching_widths(a: &[f64]) -> Self {
        GaussianProposal {
            sigma: a.iter().map(|a| (2.0 * std::f64::consts::PI * a).sqrt().recip()).collect(),
        }
    }
}

impl Proposal for GaussianProposal {
    fn dim(&self) -> usize {
        self.sigma.len()
    }

    fn sample(&self, rng: &mut ChaCha20Rng, out: &mut [f64]) {
        for (o, s) in out.iter_mut().zip(&self.sigma) {
            let z: f64 = StandardNormal.sample(rng);
            *o = s * z;
        }
    }

    fn density(&self, x: &[f64]) -> f64 {
        let norm = (2.0 * std::f64::consts::PI).sqrt();
        x.iter().zip(&self.sigma).map(|(x, s)| (-0.5 * (x / s).powi(2)).exp() / (norm * s)).product()
    }
}

/// Importance-sampled `int integrand`, `n` draws from `proposal`.
///
/// Draws are split into chunks of [`MC_CHUNK`], chunk `c` reads
/// `stream.child(c)`, and chunk sums are pooled in order, so the result
/// does not depend on the number of threads.
pub fn mc_integrate<F, P>(stream: RngStream, integrand: F, proposal: &P, n: usize) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
    P: Proposal,
{
    if n < 2 {
        return Err(Error::MonteCarlo(format!("need at least 2 samples, got {n}")));
    }
    let d = proposal.dim();
    let chunks = n.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let m = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut rng = stream.child(c as u64).rng();
            let mut x = vec![0.0; d];
            let (mut s1, mut s2, mut bad) = (0.0, 0.0, 0usize);
            for _ in 0..m {
                proposal.sample(&mut rng, &mut x);
                let w = integrand(&x) / proposal.density(&x);
                if !w.is_finite() {
                    bad += 1;
                    continue;
                }
                s1 += w;
                s2 += w * w;
            }
            (s1, s2, bad)
        })
        .collect();
    let (mut s1, mut s2, mut bad) = (0.0, 0.0, 0usize);
    for (a, b, c) in partial {
        s1 += a;
        s2 += b;
        bad += c;
    }
    if bad > 0 {
        return Err(Error::MonteCarlo(format!("{bad} non-finite importance weights")));
    }
    if s2 == 0.0 {
        return Err(Error::MonteCarlo("zero effective sample size".into()));
    }
    let nf = n as f64;
    let mean = s1 / nf;
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    Ok(McEstimate { mean, stderr: (var / nf).sqrt(), n_samples: n, seed: stream.seed })
}
