//! Radial grids on `[0, R]` and quadrature for integrals of radial functions
//! over the disk of radius `R`, i.e. against the measure `2 pi r dr`.
//!
//! The `2 pi` factor lives inside the quadrature weights, so callers never
//! multiply by it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform radial grid with per-node disk-quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    outer_radius: f64,
}

impl RadialGrid {
    /// Uniform grid on `[0, outer_radius]` with `node_count` nodes.
    ///
    /// Weights implement composite Simpson against `2 pi r dr` when
    /// `node_count` is odd (even interval count), composite trapezoid
    /// otherwise.
    pub fn uniform(node_count: usize, outer_radius: f64) -> Result<Self> {
        if node_count < 3 {
            return Err(Error::invalid(format!(
                "node_count must be >= 3, got {node_count}"
            )));
        }
        if !outer_radius.is_finite() || outer_radius <= 0.0 {
            return Err(Error::invalid(format!(
                "outer_radius must be positive and finite, got {outer_radius}"
            )));
        }
        let n = node_count;
        let h = outer_radius / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        nodes[n - 1] = outer_radius;

        let simpson = n % 2 == 1;
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let c = if simpson {
                    if i == 0 || i == n - 1 {
                        h / 3.0
                    } else if i % 2 == 1 {
                        4.0 * h / 3.0
                    } else {
                        2.0 * h / 3.0
                    }
                } else if i == 0 || i == n - 1 {
                    h / 2.0
                } else {
                    h
                };
                c * 2.0 * std::f64::consts::PI * r
            })
            .collect();

        Ok(RadialGrid {
            nodes,
            weights,
            outer_radius,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing.
    pub fn spacing(&self) -> f64 {
        self.outer_radius / (self.nodes.len() - 1) as f64
    }

    /// Disk integral `2 pi \int_0^R f(r) r dr` of per-node samples.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(Error::invalid(format!(
                "sample count {} does not match node count {}",
                samples.len(),
                self.nodes.len()
            )));
        }
        Ok(self.weights.iter().zip(samples).map(|(w, s)| w * s).sum())
    }

    /// Discrete radial derivative of per-node samples.
    ///
    /// Second-order central differences inside, one-sided second order at the
    /// outer endpoint. At `r = 0` the derivative of radially even data
    /// vanishes, so 0 is returned there.
    pub fn derivative(&self, samples: &[f64]) -> Result<Vec<f64>> {
        let n = self.nodes.len();
        if samples.len() != n {
            return Err(Error::invalid(format!(
                "sample count {} does not match node count {}",
                samples.len(),
                n
            )));
        }
        let h = self.spacing();
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = (samples[i + 1] - samples[i - 1]) / (2.0 * h);
        }
        out[n - 1] = (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * h);
        out[0] = 0.0;
        Ok(out)
    }

    /// Cubic (4-point Lagrange) interpolation of samples at radius `r`.
    ///
    /// `r` is clamped to `[0, R]`; samples are assumed smooth.
    pub(crate) fn interp_cubic(&self, samples: &[f64], r: f64) -> f64 {
        let n = self.nodes.len();
        debug_assert_eq!(samples.len(), n);
        let h = self.spacing();
        let r = r.clamp(0.0, self.outer_radius);
        // Stencil start such that r lies between the middle pair.
        let cell = ((r / h) as usize).min(n - 2);
        let start = cell.saturating_sub(1).min(n - 4);
        let t = r / h - start as f64;
        let mut acc = 0.0;
        for (j, &s) in samples[start..start + 4].iter().enumerate() {
            let mut basis = 1.0;
            for m in 0..4 {
                if m != j {
                    basis *= (t - m as f64) / (j as f64 - m as f64);
                }
            }
            acc += basis * s;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_three_nodes() {
        let g = RadialGrid::uniform(3, 1.0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.5, 1.0]);
        assert_eq!(g.outer_radius(), 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(RadialGrid::uniform(2, 1.0).is_err());
        assert!(RadialGrid::uniform(100, 0.0).is_err());
        assert!(RadialGrid::uniform(100, -1.0).is_err());
        assert!(RadialGrid::uniform(100, f64::NAN).is_err());
    }

    #[test]
    fn disk_area() {
        let g = RadialGrid::uniform(2001, 1.0).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((g.integrate(&ones).unwrap() - PI).abs() < 1e-8);
    }

    #[test]
    fn r_squared_moment() {
        // 2 pi int_0^1 r^3 dr = pi/2
        let g = RadialGrid::uniform(2001, 1.0).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
        assert!((g.integrate(&f).unwrap() - PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn trapezoid_even_node_count_still_exact_for_area() {
        // The integrand of f = 1 against 2 pi r dr is linear, so the
        // trapezoid rule is exact up to rounding.
        let g = RadialGrid::uniform(2000, 1.0).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((g.integrate(&ones).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn liouville_mass_against_antiderivative() {
        // 2 pi int_0^R (1+r^2/8)^{-2} r dr = 8 pi (1 - 1/(1+R^2/8))
        let radius = 200.0;
        let g = RadialGrid::uniform(20001, radius).unwrap();
        let f: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&r| crate::liouville::e_z_star(r))
            .collect();
        let exact = 8.0 * PI * (1.0 - 1.0 / (1.0 + radius * radius / 8.0));
        assert!((g.integrate(&f).unwrap() - exact).abs() < 1e-3);
    }

    #[test]
    fn liouville_cube_against_antiderivative() {
        // 2 pi int_0^R (1+r^2/8)^{-6} r dr = (8 pi/5)(1 - (1+R^2/8)^{-5})
        let radius = 200.0;
        let g = RadialGrid::uniform(20001, radius).unwrap();
        let f: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&r| crate::liouville::e_z_star(r).powi(3))
            .collect();
        let u = 1.0 + radius * radius / 8.0;
        let exact = 8.0 * PI / 5.0 * (1.0 - u.powi(-5));
        assert!((g.integrate(&f).unwrap() - exact).abs() < 1e-3);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = RadialGrid::uniform(11, 1.0).unwrap();
        assert!(g.integrate(&[1.0; 5]).is_err());
        assert!(g.derivative(&[1.0; 5]).is_err());
    }

    #[test]
    fn derivative_of_square() {
        let g = RadialGrid::uniform(101, 2.0).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
        let d = g.derivative(&f).unwrap();
        for (i, &r) in g.nodes().iter().enumerate() {
            assert!(
                (d[i] - 2.0 * r).abs() < 1e-10,
                "node {i}: {} vs {}",
                d[i],
                2.0 * r
            );
        }
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = RadialGrid::uniform(64, 3.0).unwrap();
        let f = vec![4.2; g.len()];
        let d = g.derivative(&f).unwrap();
        assert!(d.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn derivative_of_z_star_second_order() {
        // Empirical order of accuracy >= 2 by grid halving.
        let err_at = |n: usize| {
            let g = RadialGrid::uniform(n, 10.0).unwrap();
            let f: Vec<f64> = g
                .nodes()
                .iter()
                .map(|&r| crate::liouville::z_star(r))
                .collect();
            let d = g.derivative(&f).unwrap();
            g.nodes()
                .iter()
                .zip(&d)
                .skip(1)
                .map(|(&r, &v)| (v - crate::liouville::z_star_prime(r)).abs())
                .fold(0.0_f64, f64::max)
        };
        let coarse = err_at(101);
        let fine = err_at(201);
        assert!(coarse / fine > 3.5, "order ratio {}", coarse / fine);
    }

    #[test]
    fn quadrature_order_at_least_two() {
        // Grid-halving on a smooth non-polynomial integrand.
        let exact = {
            // 2 pi int_0^1 e^{-r^2} r dr = pi (1 - e^{-1})
            PI * (1.0 - (-1.0_f64).exp())
        };
        let err_at = |n: usize| {
            let g = RadialGrid::uniform(n, 1.0).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
            (g.integrate(&f).unwrap() - exact).abs()
        };
        // Trapezoid branch (even node count).
        let ratio = err_at(100) / err_at(200);
        assert!(ratio > 3.5, "trapezoid order ratio {ratio}");
        // Simpson branch (odd node count) converges at least as fast.
        let ratio = err_at(101) / err_at(201);
        assert!(ratio > 3.5, "simpson order ratio {ratio}");
    }

    #[test]
    fn positivity_of_quadrature() {
        let mut state = 0x12345678_u64;
        let mut next = move || {
            // xorshift64
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in [11, 12, 101, 256] {
            let g = RadialGrid::uniform(n, 2.5).unwrap();
            assert!(g.weights().iter().all(|&w| w >= 0.0));
            let f: Vec<f64> = (0..n).map(|_| next()).collect();
            assert!(g.integrate(&f).unwrap() >= 0.0);
        }
    }

    #[test]
    fn additivity_at_a_node() {
        // Trapezoid weights split exactly at any interior node.
        let g = RadialGrid::uniform(201, 1.0).unwrap();
        let split = 121; // r = 0.605, even node count on the left keeps trapezoid weights
        let f: Vec<f64> = g.nodes().iter().map(|r| (1.0 + r).sin()).collect();
        let left = RadialGrid::uniform(split + 1, 0.605).unwrap();
        let fl: Vec<f64> = left.nodes().iter().map(|r| (1.0 + r).sin()).collect();
        // Right half integral computed with the same uniform spacing via
        // translation of weights: 2 pi int_a^R f r dr done by trapezoid.
        let h = g.spacing();
        let mut right = 0.0;
        for i in split..200 {
            let r0 = g.nodes()[i];
            let r1 = g.nodes()[i + 1];
            right += h / 2.0 * 2.0 * PI * (r0 * f[i] + r1 * f[i + 1]);
        }
        let total_trap = {
            let mut acc = 0.0;
            for i in 0..200 {
                let r0 = g.nodes()[i];
                let r1 = g.nodes()[i + 1];
                acc += h / 2.0 * 2.0 * PI * (r0 * f[i] + r1 * f[i + 1]);
            }
            acc
        };
        let left_val = left.integrate(&fl).unwrap();
        assert!((left_val + right - total_trap).abs() < 1e-13);
        // And the Simpson-weighted grid agrees with the split within the
        // trapezoid rule's O(h^2) error.
        assert!((g.integrate(&f).unwrap() - (left_val + right)).abs() < 1e-4);
    }
}
