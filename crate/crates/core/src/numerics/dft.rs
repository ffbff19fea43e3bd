use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::grid::Axis;
use crate::{Complex, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `F(tau_k) = h * sum_j f(x_j) exp(2 pi i x_j tau_k)`
    Forward,
    /// `f(x_j) = dtau * sum_k F(tau_k) exp(-2 pi i x_j tau_k)`
    Inverse,
}

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    match dir {
        // positive exponent is rustfft's inverse
        Direction::Forward => planner.plan_fft_inverse(n),
        Direction::Inverse => planner.plan_fft_forward(n),
    }
}

/// Centered DFT on `axis` approximating the continuous transform with
/// kernel `exp(2 pi i x tau)`.
///
/// Since `x_j tau_k = (j - n/2)(k - n/2)/n` for every `L`, the centered
/// transform is a plain FFT with alternating signs on input and output.
/// The pair is an exact isometry between `l2(h)` and `l2(1/(2L))`.
pub fn dft_1d(values: &[Complex], axis: &Axis, dir: Direction) -> Result<Vec<Complex>> {
    let n = axis.n;
    if values.len() != n || !n.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "dft length {} does not match a power-of-two axis of {n}",
            values.len()
        )));
    }
    let mut buf: Vec<Complex> = values
        .iter()
        .enumerate()
        .map(|(j, v)| if j % 2 == 1 { -v } else { *v })
        .collect();
    plan(n, dir).process(&mut buf);
    // i^n from the (n/2)^2 cross term
    let global = match n % 4 {
        0 => 1.0,
        _ => -1.0,
    };
    let scale = match dir {
        Direction::Forward => axis.spacing(),
        Direction::Inverse => axis.freq_spacing(),
    } * global;
    for (k, v) in buf.iter_mut().enumerate() {
        let s = if k % 2 == 1 { -scale } else { scale };
        *v *= s;
    }
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(axis: &Axis) -> Vec<Complex> {
        axis.points().iter().map(|x| Complex::new((-PI * x * x).exp(), 0.0)).collect()
    }

    #[test]
    fn gaussian_is_self_dual() {
        let axis = Axis::new(256, 8.0).unwrap();
        let g = gaussian(&axis);
        let f = dft_1d(&g, &axis, Direction::Forward).unwrap();
        for k in 0..axis.n {
            let tau = axis.frequency(k);
            assert!((f[k] - Complex::new((-PI * tau * tau).exp(), 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let axis = Axis::new(64, 3.0).unwrap();
        let v: Vec<Complex> = (0..64)
            .map(|j| Complex::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos()))
            .collect();
        let f = dft_1d(&v, &axis, Direction::Forward).unwrap();
        let back = dft_1d(&f, &axis, Direction::Inverse).unwrap();
        let err = v.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        let n1: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * axis.spacing();
        let n2: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>() * axis.freq_spacing();
        assert!((n1 - n2).abs() < 1e-12 * n1);
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let axis = Axis::new(32, 2.0).unwrap();
        let mut v = vec![Complex::new(0.0, 0.0); 32];
        v[16] = Complex::new(1.0 / axis.spacing(), 0.0);
        let f = dft_1d(&v, &axis, Direction::Forward).unwrap();
        for z in f {
            assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-13);
        }
    }
}
