//! Shooting construction of the radial sign-changing stationary profiles.
//!
//! The normalized radial profile `w` solves
//!
//! ```text
//! w'' + w'/r + |w|^{p-1} w = 0,   w(0) = 1,  w'(0) = 0,
//! ```
//!
//! and its successive zeros `rho_1 < rho_2 < ...` are located on the dense
//! output of an adaptive Dormand-Prince 5(4) integration. The stationary
//! solution with `K` nodal regions on the unit disk is the exact rescaling
//!
//! ```text
//! u(r) = rho_K^{2/(p-1)} w(rho_K r),
//! ```
//!
//! so its amplitude, nodal radii and energy integrals all come from the one
//! trajectory. The Dirichlet and `L^{p+1}` integrals are accumulated as extra
//! quadrature states of the same integration; for large `p` the nodal layers
//! live on scales far below any fixed output grid, so grid quadrature of the
//! resampled values would lose them.

use serde::{Deserialize, Serialize};

use crate::dopri::{DenseSegment, Dopri5};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Start radius for the desingularized integration; below it the two-term
/// series `w = 1 - r^2/4` is used.
const SERIES_RADIUS: f64 = 1e-8;

/// Hard ceiling on the integration range. The K-th zero grows like
/// `exp(O(p))`, so the ceiling sits just under the f64 overflow edge.
const RADIUS_CEILING: f64 = 1e300;

/// Tolerances and limits for the Lane-Emden integration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Give up if the requested zero has not appeared by this radius.
    pub r_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            r_max: 1e6,
            max_steps: 20_000_000,
        }
    }
}

/// `sign(w) |w|^q` evaluated in log space; `q` may be in the hundreds.
pub(crate) fn signed_power(w: f64, q: f64) -> f64 {
    let a = w.abs();
    if a < 1e-300 {
        return 0.0;
    }
    let v = (q * a.ln()).exp();
    if w < 0.0 {
        -v
    } else {
        v
    }
}

/// State layout: `[w, w', I_grad, I_pow]` with
/// `I_grad = int_0^r 2 pi s w'(s)^2 ds` and
/// `I_pow  = int_0^r 2 pi s |w(s)|^{p+1} ds`.
fn lane_emden_rhs(p: f64) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    move |r: f64, y: &[f64; 4]| {
        let tau = 2.0 * std::f64::consts::PI * r;
        [
            y[1],
            -y[1] / r - signed_power(y[0], p),
            tau * y[1] * y[1],
            tau * signed_power(y[0].abs(), p + 1.0),
        ]
    }
}

/// The integrated profile `w`, its zeros, and per-region extrema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaneEmdenTrajectory {
    p: f64,
    zeros: Vec<f64>,
    /// `max |w|` over each nodal region, one entry per zero found.
    region_maxima: Vec<f64>,
    segments: Vec<DenseSegment<4>>,
    /// `int_0^{rho_K} 2 pi s w'^2 ds`
    grad_integral: f64,
    /// `int_0^{rho_K} 2 pi s |w|^{p+1} ds`
    pow_integral: f64,
}

impl LaneEmdenTrajectory {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn region_maxima(&self) -> &[f64] {
        &self.region_maxima
    }

    pub(crate) fn grad_integral(&self) -> f64 {
        self.grad_integral
    }

    pub(crate) fn pow_integral(&self) -> f64 {
        self.pow_integral
    }

    /// `(w, w')` at radius `s`, using the series below the start radius and
    /// dense output beyond it. `s` past the last zero clamps to it.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        if s < SERIES_RADIUS {
            return (1.0 - s * s / 4.0, -s / 2.0);
        }
        let last = self.segments.last().expect("nonempty trajectory");
        let s = s.min(last.end());
        let idx = self
            .segments
            .partition_point(|seg| seg.end() < s)
            .min(self.segments.len() - 1);
        let v = self.segments[idx].eval(s);
        (v[0], v[1])
    }
}

/// Integrate the profile until `zero_target` zeros are bracketed and refined.
pub fn integrate_lane_emden(
    p: f64,
    zero_target: usize,
    control: &StepControl,
) -> Result<LaneEmdenTrajectory> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::invalid(format!("exponent p must exceed 1, got {p}")));
    }
    if zero_target == 0 {
        return Err(Error::invalid("zero_target must be at least 1"));
    }

    let r0 = SERIES_RADIUS;
    let y0 = [
        1.0 - r0 * r0 / 4.0,
        -r0 / 2.0,
        std::f64::consts::PI * r0.powi(4) / 8.0,
        std::f64::consts::PI * r0 * r0,
    ];
    let mut solver = Dopri5::new(
        lane_emden_rhs(p),
        r0,
        y0,
        r0,
        control.abs_tol,
        control.rel_tol,
    );

    let mut segments: Vec<DenseSegment<4>> = Vec::new();
    let mut zeros: Vec<f64> = Vec::new();
    let mut region_maxima: Vec<f64> = Vec::new();
    let mut current_max = 1.0_f64; // |w(0)|
    let mut w_prev = y0[0];
    let mut wp_prev = y0[1];
    let mut steps = 0usize;

    while zeros.len() < zero_target {
        if steps >= control.max_steps {
            return Err(Error::NoConvergence(format!(
                "{} zeros not found within {} steps (p = {p})",
                zero_target, control.max_steps
            )));
        }
        steps += 1;
        let seg = solver.step()?;
        let w_new = solver.y()[0];
        let wp_new = solver.y()[1];

        // Walk probe points across the step: refine interior extrema of |w|
        // for the running region maximum and bracket zero crossings the
        // endpoints alone could miss.
        let mut probes = [seg.r0, 0.0, 0.0, 0.0, seg.end()];
        probes[1] = seg.r0 + 0.25 * seg.h;
        probes[2] = seg.r0 + 0.5 * seg.h;
        probes[3] = seg.r0 + 0.75 * seg.h;
        let mut prev_r = probes[0];
        let mut prev_w = w_prev;
        let mut prev_wp = wp_prev;
        for &pr in &probes[1..] {
            let (w_here, wp_here) = if pr == seg.end() {
                (w_new, wp_new)
            } else {
                let v = seg.eval(pr);
                (v[0], v[1])
            };
            if prev_wp * wp_here < 0.0 {
                let s = refine_sign_change(&seg, 1, prev_r, pr);
                current_max = current_max.max(seg.eval(s)[0].abs());
            }
            current_max = current_max.max(w_here.abs());
            if prev_w * w_here < 0.0 || (w_here == 0.0 && prev_w != 0.0) {
                let s = refine_sign_change(&seg, 0, prev_r, pr);
                zeros.push(s);
                region_maxima.push(current_max);
                // Seed the next region with the value past the crossing.
                current_max = w_here.abs();
                if zeros.len() == zero_target {
                    break;
                }
            }
            prev_r = pr;
            prev_w = w_here;
            prev_wp = wp_here;
        }

        segments.push(seg);
        w_prev = w_new;
        wp_prev = wp_new;

        if zeros.len() < zero_target && solver.r() > control.r_max.min(RADIUS_CEILING) {
            return Err(Error::NoConvergence(format!(
                "zero {} of the profile not found below r = {:e} (p = {p})",
                zeros.len() + 1,
                control.r_max.min(RADIUS_CEILING)
            )));
        }
    }

    let rho_last = *zeros.last().expect("at least one zero");
    let tail = segments.last().expect("nonempty").eval(rho_last);
    Ok(LaneEmdenTrajectory {
        p,
        zeros,
        region_maxima,
        segments,
        grad_integral: tail[2],
        pow_integral: tail[3],
    })
}

/// Bisect the dense output of `component` to the sign change in `[lo, hi]`.
fn refine_sign_change(seg: &DenseSegment<4>, component: usize, lo: f64, hi: f64) -> f64 {
    let mut lo = lo;
    let mut hi = hi;
    let mut flo = seg.eval(lo)[component];
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fmid = seg.eval(mid)[component];
        if flo * fmid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

/// A K-nodal radial stationary solution on the unit disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationarySolution {
    p: f64,
    nodal_regions: usize,
    grid: RadialGrid,
    values: Vec<f64>,
    nodal_radii: Vec<f64>,
    amplitude: f64,
    epsilon: f64,
    region_maxima: Vec<f64>,
    dirichlet_integral: f64,
    lp1_integral: f64,
    trajectory: LaneEmdenTrajectory,
}

impl StationarySolution {
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Number of nodal regions `K`.
    pub fn nodal_regions(&self) -> usize {
        self.nodal_regions
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `u` sampled at the grid nodes.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `K - 1` interior nodal radii, strictly increasing in `(0, 1)`.
    pub fn nodal_radii(&self) -> &[f64] {
        &self.nodal_radii
    }

    /// `u(0)`, also the sup norm.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// The intrinsic scale, `epsilon^{-2} = p u(0)^{p-1}`.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `M_j = max |u|` over the j-th nodal region, strictly decreasing.
    pub fn local_maxima(&self) -> &[f64] {
        &self.region_maxima
    }

    /// `int_disk |grad u|^2`
    pub fn dirichlet_integral(&self) -> f64 {
        self.dirichlet_integral
    }

    /// `int_disk |u|^{p+1}`
    pub fn lp1_integral(&self) -> f64 {
        self.lp1_integral
    }

    /// Radius of the rescaled domain, `1/epsilon`.
    pub fn rescaled_radius(&self) -> f64 {
        1.0 / self.epsilon
    }

    /// Last zero of the underlying profile, `rho_K`.
    pub(crate) fn final_profile_zero(&self) -> f64 {
        *self.trajectory.zeros.last().expect("K >= 1")
    }

    /// `(u(r), u'(r))` for `r` in `[0, 1]` from the dense trajectory.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let rho = self.final_profile_zero();
        let (w, wp) = self.trajectory.eval(rho * r);
        (self.amplitude * w, self.amplitude * rho * wp)
    }

    /// `(w, w')` of the normalized profile at `s = rho_K r`; the rescaled
    /// quantities `z_p`, `V_p` depend on `w` alone.
    pub(crate) fn profile_eval(&self, s: f64) -> (f64, f64) {
        self.trajectory.eval(s)
    }
}

/// Construct the unique K-nodal radial stationary solution, resampled on
/// `grid` (which must span the unit disk).
pub fn stationary_solution(
    p: f64,
    nodal_regions: usize,
    grid: &RadialGrid,
) -> Result<StationarySolution> {
    if (grid.outer_radius() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "stationary solutions live on the unit disk; grid has R = {}",
            grid.outer_radius()
        )));
    }
    if nodal_regions == 0 {
        return Err(Error::invalid("nodal region count must be at least 1"));
    }
    let control = StepControl {
        r_max: RADIUS_CEILING,
        ..StepControl::default()
    };
    let trajectory = integrate_lane_emden(p, nodal_regions, &control)?;
    let rho = *trajectory.zeros().last().expect("K zeros");

    // amplitude = rho^{2/(p-1)}, evaluated in log space for large p.
    let amplitude = (2.0 / (p - 1.0) * rho.ln()).exp();
    // epsilon^{-2} = p u(0)^{p-1}; the definitional form is used whenever it
    // stays in range, the log form when p u(0)^{p-1} would overflow.
    let log_inv_eps_sq = p.ln() + (p - 1.0) * amplitude.ln();
    let epsilon = if log_inv_eps_sq < 700.0 {
        (p * amplitude.powf(p - 1.0)).powf(-0.5)
    } else {
        (-0.5 * log_inv_eps_sq).exp()
    };

    let n = grid.len();
    let mut values = Vec::with_capacity(n);
    values.push(amplitude);
    for &r in &grid.nodes()[1..n - 1] {
        values.push(amplitude * trajectory.eval(rho * r).0);
    }
    values.push(0.0);

    let nodal_radii: Vec<f64> = trajectory.zeros()[..nodal_regions - 1]
        .iter()
        .map(|z| z / rho)
        .collect();
    let region_maxima: Vec<f64> = trajectory
        .region_maxima()
        .iter()
        .map(|m| amplitude * m)
        .collect();

    let amp2 = amplitude * amplitude;
    Ok(StationarySolution {
        p,
        nodal_regions,
        grid: grid.clone(),
        values,
        nodal_radii,
        amplitude,
        epsilon,
        region_maxima,
        dirichlet_integral: amp2 * trajectory.grad_integral(),
        lp1_integral: amp2 * trajectory.pow_integral(),
        trajectory,
    })
}
