//! Direct factorization of the interior operator.
//!
//! The five-point system decouples under a discrete sine transform in the
//! spatial direction: each mode `p` satisfies a three-term recurrence in `k`
//! with the mode of the bottom data as the `k = 0` value and zero at
//! `k = K`, whose solution is the hyperbolic ratio
//! `sigma_p(k) = sinh(mu_p (K - k)) / sinh(mu_p K)` with
//! `cosh(mu_p) = 2 - cos(pi p / I)`.  One forward transform of the bottom
//! row and one inverse transform per grid row reconstruct the field.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;
use crate::laplace::Field;

/// Per-grid spectral factorization; immutable after construction and safe
/// to share across threads.
pub struct DirectPlan {
    fft: Arc<dyn Fft<f64>>,
    /// `e^{-mu_p}` for `p = 1..I-1`.
    decay: Vec<f64>,
    /// `e^{+mu_p}`.
    growth: Vec<f64>,
    /// `e^{-2 mu_p K}`.
    tail: Vec<f64>,
    /// `1 / (1 - e^{-2 mu_p K})`.
    denom_inv: Vec<f64>,
}

impl DirectPlan {
    pub fn new(grid: &GridSpec) -> Self {
        let i_steps = grid.i_steps();
        let k_steps = grid.k_steps();
        let fft = FftPlanner::new().plan_fft_forward(2 * i_steps);
        let modes = i_steps - 1;
        let mut decay = Vec::with_capacity(modes);
        let mut growth = Vec::with_capacity(modes);
        let mut tail = Vec::with_capacity(modes);
        let mut denom_inv = Vec::with_capacity(modes);
        for p in 1..i_steps {
            // cosh(mu) - 1 = 1 - cos(pi p / I) = 2 sin^2(pi p / (2I)),
            // evaluated cancellation-free for small p.
            let s = (std::f64::consts::PI * p as f64 / (2.0 * i_steps as f64)).sin();
            let d = 2.0 * s * s;
            let mu = (d + (d * (d + 2.0)).sqrt()).ln_1p();
            let t = (-mu).exp();
            let e2k = (-2.0 * mu * k_steps as f64).exp();
            decay.push(t);
            growth.push(1.0 / t);
            tail.push(e2k);
            denom_inv.push(1.0 / (1.0 - e2k));
        }
        DirectPlan {
            fft,
            decay,
            growth,
            tail,
            denom_inv,
        }
    }

    pub fn solve(&self, grid: &GridSpec, bottom: &[f64]) -> Field {
        let i_steps = grid.i_steps();
        let k_steps = grid.k_steps();
        let stride = i_steps + 1;
        let n = 2 * i_steps;

        let mut buf = vec![Complex::new(0.0, 0.0); n];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];

        // Forward sine transform of the bottom row via an odd extension.
        pack_odd(&mut buf, &bottom[1..i_steps]);
        self.fft.process_with_scratch(&mut buf, &mut scratch);
        // low[p] carries S_p e^{-mu_p k}, high[p] carries S_p e^{-mu_p (2K - k)}.
        let mut low: Vec<f64> = (1..i_steps).map(|p| -0.5 * buf[p].im).collect();
        let mut high: Vec<f64> = low.iter().zip(&self.tail).map(|(s, t)| s * t).collect();

        let mut field = Field::zeros(*grid);
        field.values_mut()[..stride].copy_from_slice(bottom);

        let mut coef = vec![0.0; i_steps - 1];
        for k in 1..k_steps {
            for p in 0..i_steps - 1 {
                low[p] *= self.decay[p];
                high[p] *= self.growth[p];
                coef[p] = (low[p] - high[p]) * self.denom_inv[p];
            }
            pack_odd(&mut buf, &coef);
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            let row = &mut field.values_mut()[k * stride..(k + 1) * stride];
            let scale = -1.0 / i_steps as f64;
            for i in 1..i_steps {
                row[i] = scale * buf[i].im;
            }
        }
        field
    }
}

/// Writes the odd extension of `inner` (values at positions `1..I-1`) into
/// the length-`2I` complex buffer.
fn pack_odd(buf: &mut [Complex<f64>], inner: &[f64]) {
    let n = buf.len();
    buf.fill(Complex::new(0.0, 0.0));
    for (offset, &v) in inner.iter().enumerate() {
        let p = offset + 1;
        buf[p] = Complex::new(v, 0.0);
        buf[n - p] = Complex::new(-v, 0.0);
    }
}
