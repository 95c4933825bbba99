//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> OdeSystem<N> for F {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerances {
    pub fn new(rtol: f64) -> Self {
        Self { rtol, atol: rtol * 1e-2 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Stepper state. Each call to [`Dopri5::advance`] takes one accepted step.
pub struct Dopri5<'a, S: OdeSystem<N>, const N: usize> {
    sys: &'a S,
    tol: Tolerances,
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl<'a, S: OdeSystem<N>, const N: usize> Dopri5<'a, S, N> {
    pub fn new(sys: &'a S, t0: f64, y0: [f64; N], tol: Tolerances) -> Self {
        let f0 = sys.rhs(t0, &y0);
        let scale = f0.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-3);
        Self { sys, tol, t: t0, y: y0, h: 0.01 * tol.rtol.powf(0.2) / scale, accepted: 0, rejected: 0 }
    }

    /// One trial step of size `h` from the current state: returns the 5th-order
    /// solution and the scaled error norm.
    pub fn trial(&self, h: f64) -> ([f64; N], f64) {
        let mut k = [[0.0; N]; 7];
        k[0] = self.sys.rhs(self.t, &self.y);
        for s in 1..7 {
            let mut ys = self.y;
            for i in 0..N {
                ys[i] += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = self.sys.rhs(self.t + C[s] * h, &ys);
        }
        let mut y_new = self.y;
        let mut err2 = 0.0;
        for i in 0..N {
            y_new[i] += h * (0..7).map(|j| B[j] * k[j][i]).sum::<f64>();
            let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sc = self.tol.atol + self.tol.rtol * self.y[i].abs().max(y_new[i].abs());
            err2 += (e / sc).powi(2);
        }
        (y_new, (err2 / N as f64).sqrt())
    }

    /// Takes one accepted step, never past `t_limit`. Returns the step size used.
    pub fn advance(&mut self, t_limit: f64) -> Result<f64> {
        let remaining = t_limit - self.t;
        if remaining <= 0.0 {
            return Ok(0.0);
        }
        let mut h = self.h.min(remaining);
        loop {
            let (y_new, err) = self.trial(h);
            if !err.is_finite() {
                return Err(Error::Integration { t: self.t, reason: "non-finite state".into() });
            }
            if err <= 1.0 {
                self.t = if h == remaining { t_limit } else { self.t + h };
                self.y = y_new;
                self.accepted += 1;
                let fac = if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
                // keep the controller's proposal when only clipped by t_limit
                self.h = if h < self.h { self.h.max(h * fac) } else { h * fac };
                return Ok(h);
            }
            self.rejected += 1;
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::Integration {
                    t: self.t,
                    reason: format!("step size underflow (error norm {err:e})"),
                });
            }
        }
    }
}
