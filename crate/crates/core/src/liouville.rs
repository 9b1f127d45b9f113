//! The explicit entire radial solution `z*` of `-Delta z = e^z` with
//! `z(0) = |grad z(0)| = 0`, and rescalings of the stationary profiles
//! toward it.
//!
//! With `epsilon^{-2} = p u(0)^{p-1}`, the rescaled profile
//! `z_p(x) = p (u(epsilon x) - u(0)) / u(0)` and the rescaled potential
//! `V_p = |1 + z_p/p|^{p-1}` reduce to the normalized shooting profile `w`:
//! `z_p(y) = p (w(y/sqrt(p)) - 1)` and `V_p(y) = |w(y/sqrt(p))|^{p-1}`,
//! so both are sampled off the dense trajectory rather than off any fixed
//! output grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::shooting::StationarySolution;

/// `z*(r) = -2 log(1 + r^2/8)`
pub fn z_star(r: f64) -> f64 {
    -2.0 * (r * r / 8.0).ln_1p()
}

/// `d z*/dr = -r / (2 (1 + r^2/8))`
pub fn z_star_prime(r: f64) -> f64 {
    -r / (2.0 * (1.0 + r * r / 8.0))
}

/// `e^{z*(r)} = (1 + r^2/8)^{-2}`
pub fn e_z_star(r: f64) -> f64 {
    let u = 1.0 + r * r / 8.0;
    1.0 / (u * u)
}

/// Certified bound on the truncated mass `int_{|x| > R} e^{z*} dx`, from
/// `(1 + r^2/8)^{-2} <= 64 r^{-4}`.
pub fn e_z_star_tail_bound(radius: f64) -> f64 {
    64.0 * std::f64::consts::PI / (radius * radius)
}

/// What a rescaled-grid sample set represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    ZProfile,
    Potential,
    Eigenfunction,
}

/// Samples of a rescaled quantity, extended by zero outside its grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescaledProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    kind: ProfileKind,
    source_p: f64,
    source_regions: usize,
}

impl RescaledProfile {
    pub(crate) fn new(
        grid: RadialGrid,
        values: Vec<f64>,
        kind: ProfileKind,
        source_p: f64,
        source_regions: usize,
    ) -> Self {
        RescaledProfile {
            grid,
            values,
            kind,
            source_p,
            source_regions,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn source_p(&self) -> f64 {
        self.source_p
    }

    pub fn source_regions(&self) -> usize {
        self.source_regions
    }

    /// Interpolated value at radius `r`; zero beyond the grid.
    pub fn eval(&self, r: f64) -> f64 {
        if r > self.grid.outer_radius() {
            0.0
        } else {
            self.grid.interp_cubic(&self.values, r)
        }
    }
}

fn check_rescaled_domain(sol: &StationarySolution, target: &RadialGrid) -> Result<()> {
    let domain = sol.rescaled_radius();
    if target.outer_radius() > domain * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "target grid radius {} exceeds the rescaled domain radius {domain}",
            target.outer_radius()
        )));
    }
    Ok(())
}

/// The rescaled profile `z_p` on `target_grid`.
pub fn rescaled_profile(
    sol: &StationarySolution,
    target_grid: &RadialGrid,
) -> Result<RescaledProfile> {
    check_rescaled_domain(sol, target_grid)?;
    let p = sol.p();
    let sqrt_p = p.sqrt();
    let mut values: Vec<f64> = target_grid
        .nodes()
        .iter()
        .map(|&y| p * (sol.profile_eval(y / sqrt_p).0 - 1.0))
        .collect();
    values[0] = 0.0;
    Ok(RescaledProfile::new(
        target_grid.clone(),
        values,
        ProfileKind::ZProfile,
        p,
        sol.nodal_regions(),
    ))
}

/// Exact radial derivative of `z_p` at the target grid nodes, from the dense
/// trajectory rather than finite differences.
pub fn rescaled_profile_derivative(
    sol: &StationarySolution,
    target_grid: &RadialGrid,
) -> Result<Vec<f64>> {
    check_rescaled_domain(sol, target_grid)?;
    let sqrt_p = sol.p().sqrt();
    Ok(target_grid
        .nodes()
        .iter()
        .map(|&y| sqrt_p * sol.profile_eval(y / sqrt_p).1)
        .collect())
}

/// The rescaled potential `V_p = |1 + z_p/p|^{p-1}` on `target_grid`.
pub fn potential_profile(
    sol: &StationarySolution,
    target_grid: &RadialGrid,
) -> Result<RescaledProfile> {
    check_rescaled_domain(sol, target_grid)?;
    let p = sol.p();
    let sqrt_p = p.sqrt();
    let values: Vec<f64> = target_grid
        .nodes()
        .iter()
        .map(|&y| {
            let w = sol.profile_eval(y / sqrt_p).0.abs();
            if w == 0.0 {
                0.0
            } else {
                // |w| <= 1 up to rounding; clamp the power back into range.
                ((p - 1.0) * w.ln()).exp().min(1.0)
            }
        })
        .collect();
    Ok(RescaledProfile::new(
        target_grid.clone(),
        values,
        ProfileKind::Potential,
        p,
        sol.nodal_regions(),
    ))
}

/// Sup gaps between a profile and the Liouville limit on `r <= compare_radius`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct C1Gap {
    pub sup_value_gap: f64,
    pub sup_derivative_gap: f64,
}

/// C1 distance of a `ZProfile` from `z*` over the compact ball of radius
/// `compare_radius`, using discrete derivatives of the samples.
pub fn c1loc_distance(profile: &RescaledProfile, compare_radius: f64) -> Result<C1Gap> {
    if profile.kind() != ProfileKind::ZProfile {
        return Err(Error::invalid(format!(
            "C1 comparison requires a Z profile, got {:?}",
            profile.kind()
        )));
    }
    if compare_radius.is_nan()
        || compare_radius <= 0.0
        || compare_radius > profile.grid().outer_radius() * (1.0 + 1e-12)
    {
        return Err(Error::invalid(format!(
            "compare_radius {compare_radius} outside the profile domain (0, {}]",
            profile.grid().outer_radius()
        )));
    }
    let derivative = profile.grid().derivative(profile.values())?;
    let mut value_gap = 0.0_f64;
    let mut derivative_gap = 0.0_f64;
    for (i, &r) in profile.grid().nodes().iter().enumerate() {
        if r > compare_radius {
            break;
        }
        value_gap = value_gap.max((profile.values()[i] - z_star(r)).abs());
        derivative_gap = derivative_gap.max((derivative[i] - z_star_prime(r)).abs());
    }
    Ok(C1Gap {
        sup_value_gap: value_gap,
        sup_derivative_gap: derivative_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shooting::stationary_solution;
    use std::f64::consts::PI;

    fn unit_grid(n: usize) -> RadialGrid {
        RadialGrid::uniform(n, 1.0).unwrap()
    }

    #[test]
    fn z_star_pointwise_values() {
        assert_eq!(z_star(0.0), 0.0);
        assert!((z_star(8.0_f64.sqrt()) + 2.0 * 2.0_f64.ln()).abs() < 1e-15);
        assert_eq!(z_star_prime(0.0), 0.0);
    }

    #[test]
    fn laplacian_of_z_star_at_origin() {
        // -Delta z*(0) = 1 = e^{z*(0)}; the radial Laplacian of even data at
        // the origin is 2 z''(0), and z* is even in r.
        let h = 1e-4;
        let second = 2.0 * (z_star(h) - z_star(0.0)) / (h * h);
        assert!((2.0 * second + 1.0).abs() < 1e-6);
    }

    #[test]
    fn liouville_equation_residual_second_order() {
        // -Delta z* = e^{z*} pointwise, via second differences on two grids.
        let residual = |n: usize| {
            let g = RadialGrid::uniform(n, 12.0).unwrap();
            let h = g.spacing();
            let z: Vec<f64> = g.nodes().iter().map(|&r| z_star(r)).collect();
            let mut worst = 0.0_f64;
            for i in 1..n - 1 {
                let r = g.nodes()[i];
                let lap = (z[i + 1] - 2.0 * z[i] + z[i - 1]) / (h * h)
                    + (z[i + 1] - z[i - 1]) / (2.0 * h * r);
                worst = worst.max((-lap - e_z_star(r)).abs());
            }
            worst
        };
        let coarse = residual(401);
        let fine = residual(801);
        assert!(coarse < 1e-3);
        assert!(coarse / fine > 3.5, "order ratio {}", coarse / fine);
    }

    #[test]
    fn liouville_masses_with_certified_tails() {
        let radius = 200.0;
        let g = RadialGrid::uniform(20001, radius).unwrap();
        let e1: Vec<f64> = g.nodes().iter().map(|&r| e_z_star(r)).collect();
        let e2: Vec<f64> = e1.iter().map(|v| v * v).collect();
        let e3: Vec<f64> = e1.iter().map(|v| v * v * v).collect();
        let q1 = g.integrate(&e1).unwrap();
        let q2 = g.integrate(&e2).unwrap();
        let q3 = g.integrate(&e3).unwrap();
        assert!((q1 - 8.0 * PI).abs() < 1e-3 + e_z_star_tail_bound(radius));
        assert!((q2 - 8.0 * PI / 3.0).abs() < 1e-3);
        assert!((q3 - 8.0 * PI / 5.0).abs() < 1e-3);
    }

    #[test]
    fn z_profile_vanishes_at_origin_and_converges() {
        let g = unit_grid(401);
        let target = RadialGrid::uniform(1601, 8.0).unwrap();
        let coarse = rescaled_profile(&stationary_solution(50.0, 2, &g).unwrap(), &target).unwrap();
        let fine = rescaled_profile(&stationary_solution(200.0, 2, &g).unwrap(), &target).unwrap();
        assert_eq!(coarse.values()[0], 0.0);
        assert!(coarse.values()[1] <= 0.0);
        let gap_coarse = c1loc_distance(&coarse, 5.0).unwrap();
        let gap_fine = c1loc_distance(&fine, 5.0).unwrap();
        assert!(gap_fine.sup_value_gap < gap_coarse.sup_value_gap);
        assert!(gap_fine.sup_derivative_gap < gap_coarse.sup_derivative_gap);
    }

    #[test]
    fn potential_profile_bounds_and_center_value() {
        let g = unit_grid(401);
        let target = RadialGrid::uniform(1601, 8.0).unwrap();
        for p in [50.0, 200.0] {
            let sol = stationary_solution(p, 2, &g).unwrap();
            let pot = potential_profile(&sol, &target).unwrap();
            assert_eq!(pot.values()[0], 1.0);
            assert!(pot.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
        // Uniform convergence toward e^{z*} on the compact ball r <= 5.
        let sup_gap = |p: f64| {
            let sol = stationary_solution(p, 2, &g).unwrap();
            let pot = potential_profile(&sol, &target).unwrap();
            target
                .nodes()
                .iter()
                .zip(pot.values())
                .filter(|(&r, _)| r <= 5.0)
                .map(|(&r, &v)| (v - e_z_star(r)).abs())
                .fold(0.0_f64, f64::max)
        };
        assert!(sup_gap(200.0) < sup_gap(50.0));
    }

    #[test]
    fn exact_z_star_samples_have_no_gap() {
        let target = RadialGrid::uniform(2001, 6.0).unwrap();
        let values: Vec<f64> = target.nodes().iter().map(|&r| z_star(r)).collect();
        let profile = RescaledProfile::new(target, values, ProfileKind::ZProfile, f64::INFINITY, 1);
        let gap = c1loc_distance(&profile, 5.0).unwrap();
        assert!(gap.sup_value_gap < 1e-12);
        // Derivative gap is pure finite-difference error, O(h^2).
        assert!(gap.sup_derivative_gap < 1e-4);
    }

    #[test]
    fn gaps_stable_under_grid_refinement() {
        let g = unit_grid(401);
        let sol = stationary_solution(100.0, 2, &g).unwrap();
        let base = c1loc_distance(
            &rescaled_profile(&sol, &RadialGrid::uniform(1601, 8.0).unwrap()).unwrap(),
            5.0,
        )
        .unwrap();
        let halved = c1loc_distance(
            &rescaled_profile(&sol, &RadialGrid::uniform(3201, 8.0).unwrap()).unwrap(),
            5.0,
        )
        .unwrap();
        assert!((base.sup_value_gap - halved.sup_value_gap).abs() / halved.sup_value_gap < 0.1);
        assert!(
            (base.sup_derivative_gap - halved.sup_derivative_gap).abs() / halved.sup_derivative_gap
                < 0.1
        );
    }

    #[test]
    fn domain_and_kind_preconditions() {
        // At p = 3, K = 1 the rescaled domain radius 1/epsilon is below 10,
        // so a 10-wide target grid must be rejected.
        let sol = stationary_solution(3.0, 1, &unit_grid(401)).unwrap();
        assert!(sol.rescaled_radius() < 10.0);
        let too_wide = RadialGrid::uniform(101, 10.0).unwrap();
        assert!(rescaled_profile(&sol, &too_wide).is_err());
        assert!(potential_profile(&sol, &too_wide).is_err());

        let ok = RadialGrid::uniform(101, 2.0).unwrap();
        let pot = potential_profile(&sol, &ok).unwrap();
        assert!(c1loc_distance(&pot, 1.0).is_err());
    }

    #[test]
    fn extension_by_zero() {
        let sol = stationary_solution(20.0, 1, &unit_grid(401)).unwrap();
        let target = RadialGrid::uniform(401, 6.0).unwrap();
        let prof = rescaled_profile(&sol, &target).unwrap();
        assert_eq!(prof.eval(7.0), 0.0);
        assert!((prof.eval(3.0) - prof.values()[200]).abs() < 1e-9);
    }
}
