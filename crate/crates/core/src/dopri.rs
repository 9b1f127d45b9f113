//! Embedded Dormand-Prince 5(4) integrator with fourth-order dense output
//! and PI step-size control.
//!
//! Coefficients are the classic DOPRI5 tableau together with the continuous
//! extension used by Hairer's implementation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

/// Error weights: difference between the 5th and embedded 4th order rows.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dense-output weights for the fifth contribution.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const MAX_GROWTH: f64 = 5.0;
const MIN_SHRINK: f64 = 0.2;

/// One accepted step's continuous extension on `[r0, r0 + h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment<const N: usize> {
    pub r0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

// Serde stores the interpolation coefficients flattened; const-generic
// arrays have no derived impls.
#[derive(Serialize, Deserialize)]
struct FlatSegment {
    r0: f64,
    h: f64,
    cont: Vec<f64>,
}

impl<const N: usize> Serialize for DenseSegment<N> {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let flat = FlatSegment {
            r0: self.r0,
            h: self.h,
            cont: self.cont.iter().flatten().copied().collect(),
        };
        flat.serialize(serializer)
    }
}

impl<'de, const N: usize> Deserialize<'de> for DenseSegment<N> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let flat = FlatSegment::deserialize(deserializer)?;
        if flat.cont.len() != 5 * N {
            return Err(serde::de::Error::invalid_length(
                flat.cont.len(),
                &&*format!("{} interpolation coefficients", 5 * N),
            ));
        }
        let mut cont = [[0.0; N]; 5];
        for (row, chunk) in cont.iter_mut().zip(flat.cont.chunks_exact(N)) {
            row.copy_from_slice(chunk);
        }
        Ok(DenseSegment {
            r0: flat.r0,
            h: flat.h,
            cont,
        })
    }
}

impl<const N: usize> DenseSegment<N> {
    /// Evaluate the interpolant at `r` (valid on the segment's span).
    pub fn eval(&self, r: f64) -> [f64; N] {
        let theta = ((r - self.r0) / self.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            let c = &self.cont;
            out[i] = c[0][i]
                + theta * (c[1][i] + theta1 * (c[2][i] + theta * (c[3][i] + theta1 * c[4][i])));
        }
        out
    }

    pub fn end(&self) -> f64 {
        self.r0 + self.h
    }
}

/// Adaptive integrator for a fixed-size first order system.
pub struct Dopri5<F, const N: usize>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    r: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    err_old: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(f: F, r0: f64, y0: [f64; N], h0: f64, abs_tol: f64, rel_tol: f64) -> Self {
        let k1 = f(r0, &y0);
        Dopri5 {
            f,
            r: r0,
            y: y0,
            k1,
            h: h0,
            err_old: 1e-4,
            abs_tol,
            rel_tol,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Advance by one accepted step, returning its dense segment.
    /// Internal rejections shrink the step; a step that underflows the
    /// floating point resolution of `r` is a convergence failure.
    pub fn step(&mut self) -> Result<DenseSegment<N>> {
        let mut rejections = 0usize;
        loop {
            let h = self.h;
            if self.r + h == self.r {
                return Err(Error::NoConvergence(format!(
                    "step size underflow at r = {:e}",
                    self.r
                )));
            }
            let mut k = [[0.0; N]; 7];
            k[0] = self.k1;
            for s in 0..6 {
                let mut ys = self.y;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += h * a * kj[i];
                        }
                    }
                }
                k[s + 1] = (self.f)(self.r + C[s] * h, &ys);
            }
            // Fifth order solution is the last stage's argument (FSAL).
            let mut y_new = self.y;
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(6) {
                    acc += A[5][j] * kj[i];
                }
                y_new[i] += h * acc;
            }

            let mut err: f64 = 0.0;
            let mut finite = true;
            for i in 0..N {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                e *= h;
                let scale = self.abs_tol + self.rel_tol * self.y[i].abs().max(y_new[i].abs());
                let ratio = e / scale;
                err += ratio * ratio;
                finite &= y_new[i].is_finite();
            }
            err = (err / N as f64).sqrt();

            if !finite || err.is_nan() || err > 1.0 {
                rejections += 1;
                if rejections > 200 {
                    return Err(Error::NoConvergence(format!(
                        "repeated step rejection at r = {:e}",
                        self.r
                    )));
                }
                let fac = if finite && err.is_finite() {
                    (SAFETY / err.powf(EXPO)).clamp(MIN_SHRINK, 1.0)
                } else {
                    0.25
                };
                self.h *= fac.min(0.9);
                continue;
            }

            let k_new = (self.f)(self.r + h, &y_new);
            let mut cont = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - self.y[i];
                let bspl = h * k[0][i] - ydiff;
                cont[0][i] = self.y[i];
                cont[1][i] = ydiff;
                cont[2][i] = bspl;
                cont[3][i] = ydiff - h * k_new[i] - bspl;
                let mut d = 0.0;
                for (j, kj) in k.iter().enumerate().take(6) {
                    d += D[j] * kj[i];
                }
                d += D[6] * k_new[i];
                cont[4][i] = h * d;
            }
            let segment = DenseSegment {
                r0: self.r,
                h,
                cont,
            };

            // PI controller.
            let err = err.max(1e-16);
            let fac = err.powf(EXPO) / self.err_old.powf(BETA);
            let growth = (SAFETY / fac).clamp(MIN_SHRINK, MAX_GROWTH);
            self.err_old = err.max(1e-4);
            self.r += h;
            self.y = y_new;
            self.k1 = k_new;
            self.h = h * growth;
            return Ok(segment);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_to_tolerance() {
        // y' = -y, y(0) = 1.
        let mut solver = Dopri5::new(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 1e-4, 1e-12, 1e-10);
        let mut segments = Vec::new();
        while solver.r() < 5.0 {
            segments.push(solver.step().unwrap());
        }
        let seg = segments
            .iter()
            .find(|s| s.r0 <= 3.0 && s.end() >= 3.0)
            .unwrap();
        let y3 = seg.eval(3.0)[0];
        assert!((y3 - (-3.0_f64).exp()).abs() < 1e-9, "y(3) = {y3}");
    }

    #[test]
    fn dense_output_matches_harmonic_oscillator() {
        // y'' = -y integrated as a system; dense values checked mid-step.
        let mut solver = Dopri5::new(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            1e-4,
            1e-12,
            1e-10,
        );
        while solver.r() < 10.0 {
            let seg = solver.step().unwrap();
            for frac in [0.25, 0.5, 0.75] {
                let r = seg.r0 + frac * seg.h;
                let v = seg.eval(r);
                assert!((v[0] - r.cos()).abs() < 1e-8);
                assert!((v[1] + r.sin()).abs() < 1e-8);
            }
        }
    }
}
