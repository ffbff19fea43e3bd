//! Riemann zeta and reciprocal Gamma, the two special functions not
//! covered by `statrs`.

use statrs::function::gamma::gamma;

// B_2k / (2k)!
const B2K_OVER_FACT: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
];

/// Riemann zeta for real `s != 1` by Euler-Maclaurin summation.
///
/// The tail formula is the analytic continuation, so negative `s` works
/// as long as `s > -18` or so.
pub fn riemann_zeta(s: f64) -> f64 {
    let n = 20usize;
    let nf = n as f64;
    let mut sum: f64 = (1..n).map(|k| (k as f64).powf(-s)).sum();
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // rising product s (s+1) ... (s+2k-2)
    let mut rising = s;
    let mut power = nf.powf(-s - 1.0);
    for (k, c) in B2K_OVER_FACT.iter().enumerate() {
        sum += c * rising * power;
        let kk = (2 * k + 1) as f64;
        rising *= (s + kk) * (s + kk + 1.0);
        power /= nf * nf;
    }
    sum
}

/// `1/Gamma(x)`, exactly zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return 0.0;
    }
    1.0 / gamma(x)
}
