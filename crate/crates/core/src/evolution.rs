//! Time integration of the radial nonlinear heat equation
//! `v_t - Delta v = |v|^{p-1} v` on the unit disk with Dirichlet data, and
//! blowup/decay classification for initial data `lambda u`.
//!
//! One step treats diffusion with Crank-Nicolson (tridiagonal solve) and the
//! reaction explicitly through a Heun predictor-corrector, which is second
//! order in `dt` and yields a built-in local error estimate from the
//! predictor-corrector difference. The reaction increment `dt |v|^{p-1} v`
//! is assembled in log space so large exponents cannot overflow before the
//! product is formed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::shooting::StationarySolution;

/// Classification of an evolution run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Blowup,
    GlobalDecay,
    Undecided,
}

/// Outcome of evolving `lambda u` under the nonlinear heat flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionOutcome {
    pub classification: Classification,
    /// Present exactly for blowup outcomes.
    pub blowup_time_estimate: Option<f64>,
    /// `(t, sup norm)` samples with strictly increasing times.
    pub supnorm_trace: Vec<(f64, f64)>,
    pub final_time: f64,
    pub lambda: f64,
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Controls {
    pub t_max: f64,
    pub dt_init: f64,
    pub blowup_threshold: f64,
    pub decay_threshold: f64,
    pub dt_floor: f64,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            t_max: 10.0,
            dt_init: 1e-6,
            blowup_threshold: 1e8,
            decay_threshold: 1e-3,
            dt_floor: 1e-14,
        }
    }
}

impl Controls {
    fn validate(&self) -> Result<()> {
        let positive = self.t_max > 0.0
            && self.dt_init > 0.0
            && self.blowup_threshold > 0.0
            && self.decay_threshold > 0.0
            && self.dt_floor > 0.0;
        if !positive {
            return Err(Error::invalid("all evolution controls must be positive"));
        }
        if self.blowup_threshold < 1e6 {
            return Err(Error::invalid(
                "blowup threshold below 1e6 cannot separate blowup from transients",
            ));
        }
        Ok(())
    }
}

/// `dt * |v|^{p-1} v` with the product formed in log space.
fn reaction_increment(v: f64, p: f64, dt: f64) -> f64 {
    let a = v.abs();
    if a < 1e-300 || dt == 0.0 {
        return 0.0;
    }
    let log = dt.ln() + p * a.ln();
    let magnitude = if log > 709.0 {
        f64::INFINITY
    } else {
        log.exp()
    };
    magnitude.copysign(v)
}

/// One accepted-or-rejected IMEX step proposal.
pub struct StepProposal {
    pub candidate: Vec<f64>,
    /// Scaled local error; infinite when the candidate is not finite.
    pub error: f64,
}

/// Crank-Nicolson diffusion with explicit Heun reaction on a radial grid.
///
/// Each step also computes the backward-Euler companion solution; the
/// CN-BE difference enters the local error so the controller keeps the step
/// small while under-resolved diffusion modes are still active (plain CN
/// leaves them oscillating undamped forever).
pub struct HeatStepper {
    p: f64,
    mass: Vec<f64>,
    flux: Vec<f64>,
    abs_tol: f64,
    rel_tol: f64,
    /// Absolute scale for the diffusion part of the error estimate.
    pub diffusion_abs_tol: f64,
}

impl HeatStepper {
    pub fn new(grid: &RadialGrid, p: f64) -> Result<Self> {
        if p.is_nan() || p <= 1.0 {
            return Err(Error::invalid("exponent p must exceed 1"));
        }
        let n = grid.len();
        let h = grid.spacing();
        let tau = 2.0 * std::f64::consts::PI;
        let m = n - 1;
        let mut mass = vec![0.0; m];
        let mut flux = vec![0.0; m];
        mass[0] = tau * h * h / 8.0;
        flux[0] = tau * (h / 2.0) / h;
        for i in 1..m {
            let r = grid.nodes()[i];
            mass[i] = tau * r * h;
            flux[i] = tau * (r + h / 2.0) / h;
        }
        Ok(HeatStepper {
            p,
            mass,
            flux,
            abs_tol: 1e-10,
            rel_tol: 1e-5,
            diffusion_abs_tol: 1e-8,
        })
    }

    fn interior(&self) -> usize {
        self.mass.len()
    }

    /// `(S v)_i` for the Dirichlet stiffness matrix of `-Delta`.
    fn apply_stiffness(&self, v: &[f64], out: &mut [f64]) {
        let m = self.interior();
        for i in 0..m {
            let left = if i > 0 {
                self.flux[i - 1] * (v[i] - v[i - 1])
            } else {
                0.0
            };
            let next = if i + 1 < m { v[i + 1] } else { 0.0 };
            out[i] = left + self.flux[i] * (v[i] - next);
        }
    }

    /// Solve `(M + c S) x = rhs` by the Thomas algorithm; the matrix is
    /// symmetric positive definite and diagonally dominant for `c >= 0`.
    fn diffusion_solve(&self, c: f64, rhs: &[f64]) -> Vec<f64> {
        let m = self.interior();
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m - 1];
        for i in 0..m {
            let left = if i > 0 { self.flux[i - 1] } else { 0.0 };
            diag[i] = self.mass[i] + c * (left + self.flux[i]);
            if i + 1 < m {
                upper[i] = -c * self.flux[i];
            }
        }
        let mut x = rhs.to_vec();
        for i in 1..m {
            let w = upper[i - 1] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            x[i] -= w * x[i - 1];
        }
        x[m - 1] /= diag[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = (x[i] - upper[i] * x[i + 1]) / diag[i];
        }
        x
    }

    /// Pure Crank-Nicolson diffusion step (reaction off), full-node vector.
    pub fn diffusion_step(&self, v: &[f64], dt: f64) -> Vec<f64> {
        let m = self.interior();
        let c = 0.5 * dt;
        let mut sv = vec![0.0; m];
        self.apply_stiffness(&v[..m], &mut sv);
        let rhs: Vec<f64> = (0..m).map(|i| self.mass[i] * v[i] - c * sv[i]).collect();
        let mut out = self.diffusion_solve(c, &rhs);
        out.push(0.0);
        out
    }

    /// One IMEX predictor-corrector step from the full-node state `v`.
    pub fn step(&self, v: &[f64], dt: f64) -> StepProposal {
        let m = self.interior();
        let c = 0.5 * dt;
        let mut sv = vec![0.0; m];
        self.apply_stiffness(&v[..m], &mut sv);
        let explicit: Vec<f64> = (0..m).map(|i| self.mass[i] * v[i] - c * sv[i]).collect();

        // Predictor: full explicit reaction from the current state.
        let g0: Vec<f64> = v[..m]
            .iter()
            .map(|&vi| reaction_increment(vi, self.p, dt))
            .collect();
        let rhs: Vec<f64> = (0..m).map(|i| explicit[i] + self.mass[i] * g0[i]).collect();
        let predictor = self.diffusion_solve(c, &rhs);

        // Corrector: average the reaction between the endpoint states.
        let rhs: Vec<f64> = (0..m)
            .map(|i| {
                let g1 = reaction_increment(predictor[i], self.p, dt);
                explicit[i] + self.mass[i] * 0.5 * (g0[i] + g1)
            })
            .collect();
        let mut corrector = self.diffusion_solve(c, &rhs);

        // Backward-Euler companion with the same explicit reaction.
        let rhs: Vec<f64> = (0..m).map(|i| self.mass[i] * (v[i] + g0[i])).collect();
        let companion = self.diffusion_solve(dt, &rhs);

        let mut error = 0.0_f64;
        let mut finite = true;
        for i in 0..m {
            let scale = self.abs_tol + self.rel_tol * v[i].abs().max(corrector[i].abs());
            error = error.max((corrector[i] - predictor[i]).abs() / scale);
            let scale = self.diffusion_abs_tol + 1e-3 * v[i].abs().max(corrector[i].abs());
            error = error.max((corrector[i] - companion[i]).abs() / scale);
            finite &= corrector[i].is_finite();
        }
        corrector.push(0.0);
        StepProposal {
            candidate: corrector,
            error: if finite { error } else { f64::INFINITY },
        }
    }
}

/// True when the hottest value certifies pointwise blowup faster than any
/// representable step: the local reaction timescale underflows f64 while the
/// reaction dominates the discrete diffusion by a wide margin.
fn certified_runaway(norm: f64, p: f64, h: f64) -> bool {
    if norm <= 1.0 {
        return false;
    }
    let log_timescale = -(0.1_f64.ln().abs()) + (1.0 - p) * norm.ln();
    let log_dominance = (p - 1.0) * norm.ln() + (h * h / 4.0).ln();
    log_timescale < -708.0 && log_dominance > 14.0
}

/// Fit `norm ~ c (T - t)^{-1/(p-1)}` on the trace tail; fall back to the
/// pointwise reaction timescale when the tail is degenerate.
fn estimate_blowup_time(trace: &[(f64, f64)], p: f64, t_end: f64, norm_end: f64) -> f64 {
    let log_rem = -(p - 1.0).ln() + (1.0 - p) * norm_end.ln();
    let remainder = if log_rem < -740.0 { 0.0 } else { log_rem.exp() };
    let fallback = t_end + remainder;

    let tail: Vec<(f64, f64)> = trace
        .iter()
        .copied()
        .filter(|&(t, v)| v >= norm_end / 10.0 && t < t_end && v < norm_end)
        .collect();
    if tail.len() < 4 {
        return fallback;
    }
    let beta = 1.0 / (p - 1.0);
    let sse = |t_b: f64| {
        let logs: Vec<f64> = tail
            .iter()
            .map(|&(t, v)| v.ln() + beta * (t_b - t).ln())
            .collect();
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>()
    };
    // Golden-section search over the offset past t_end.
    let mut lo = (t_end - tail[0].0).max(1e-300) * 1e-6;
    let mut hi = (t_end - tail[0].0 + remainder) * 10.0 + lo;
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = sse(t_end + x1);
    let mut f2 = sse(t_end + x2);
    for _ in 0..120 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = sse(t_end + x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = sse(t_end + x2);
        }
    }
    t_end + 0.5 * (lo + hi)
}

/// Evolve `v0 = lambda u` and classify the outcome.
pub fn evolve_classify(
    sol: &StationarySolution,
    lambda: f64,
    controls: &Controls,
) -> Result<EvolutionOutcome> {
    controls.validate()?;
    if !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "initial-data scaling must be finite, got {lambda}"
        )));
    }
    let grid = sol.grid();
    let mut stepper = HeatStepper::new(grid, sol.p())?;
    let p = sol.p();
    let h = grid.spacing();

    let mut v: Vec<f64> = sol.values().iter().map(|u| lambda * u).collect();
    let norm0 = v.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    // Keep unresolved diffusion modes below the decay target, or they would
    // plateau the sup norm above it.
    stepper.diffusion_abs_tol = (0.02 * controls.decay_threshold * norm0).max(1e-300);
    let mut trace = vec![(0.0, norm0)];
    if norm0 == 0.0 {
        return Ok(EvolutionOutcome {
            classification: Classification::GlobalDecay,
            blowup_time_estimate: None,
            supnorm_trace: trace,
            final_time: 0.0,
            lambda,
        });
    }

    let mut t = 0.0_f64;
    let mut dt = controls.dt_init;
    let mut norm = norm0;
    let mut growth_streak = 0usize;
    let dt_max = controls.t_max / 50.0;

    for _ in 0..20_000_000usize {
        if certified_runaway(norm, p, h) && (growth_streak >= 3 || t == 0.0) {
            let estimate = estimate_blowup_time(&trace, p, t, norm);
            return Ok(EvolutionOutcome {
                classification: Classification::Blowup,
                blowup_time_estimate: Some(estimate),
                supnorm_trace: trace,
                final_time: t,
                lambda,
            });
        }

        // Reaction cap keeps the explicit term a small fraction of the state.
        let cap_log = 0.1_f64.ln() + (1.0 - p) * norm.ln();
        if cap_log > -700.0 {
            dt = dt.min(cap_log.exp());
        }
        dt = dt.min(dt_max).min(controls.t_max - t).max(1e-320);

        let proposal = stepper.step(&v, dt);
        if !proposal.error.is_finite() {
            dt *= 0.5;
            if dt < 1e-310 {
                return Ok(EvolutionOutcome {
                    classification: Classification::Undecided,
                    blowup_time_estimate: None,
                    supnorm_trace: trace,
                    final_time: t,
                    lambda,
                });
            }
            continue;
        }
        if proposal.error > 1.0 {
            dt *= (0.9 / proposal.error.sqrt()).clamp(0.2, 0.9);
            continue;
        }

        t += dt;
        v = proposal.candidate;
        let new_norm = v.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        if new_norm > norm {
            growth_streak += 1;
        } else {
            growth_streak = 0;
        }
        norm = new_norm;
        match trace.last_mut() {
            Some(last) if t > last.0 => trace.push((t, norm)),
            Some(last) => last.1 = norm,
            None => unreachable!(),
        }
        if trace.len() >= 200_000 {
            // Long hovering runs: halve the sampling density, keeping the
            // times strictly increasing.
            let mut index = 0;
            trace.retain(|_| {
                index += 1;
                index % 2 == 1
            });
        }

        if norm >= controls.blowup_threshold && dt <= controls.dt_floor && growth_streak >= 1 {
            let estimate = estimate_blowup_time(&trace, p, t, norm);
            return Ok(EvolutionOutcome {
                classification: Classification::Blowup,
                blowup_time_estimate: Some(estimate),
                supnorm_trace: trace,
                final_time: t,
                lambda,
            });
        }
        if norm <= controls.decay_threshold * norm0 && nonincreasing_tail(&trace) {
            return Ok(EvolutionOutcome {
                classification: Classification::GlobalDecay,
                blowup_time_estimate: None,
                supnorm_trace: trace,
                final_time: t,
                lambda,
            });
        }
        if t >= controls.t_max * (1.0 - 1e-12) {
            break;
        }

        let err = proposal.error.max(1e-10);
        dt *= (0.9 / err.sqrt()).clamp(0.3, 3.0);
    }

    Ok(EvolutionOutcome {
        classification: Classification::Undecided,
        blowup_time_estimate: None,
        supnorm_trace: trace,
        final_time: t,
        lambda,
    })
}

fn nonincreasing_tail(trace: &[(f64, f64)]) -> bool {
    let start = trace.len().saturating_sub(8);
    trace[start..]
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12))
}

/// Classify every `lambda` in order; runs are independent parallel tasks.
pub fn lambda_scan(
    sol: &StationarySolution,
    lambdas: &[f64],
    controls: &Controls,
) -> Result<Vec<EvolutionOutcome>> {
    controls.validate()?;
    let mut outcomes: Vec<Result<EvolutionOutcome>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = lambdas
            .iter()
            .map(|&lambda| scope.spawn(move || evolve_classify(sol, lambda, controls)))
            .collect();
        for handle in handles {
            outcomes.push(handle.join().expect("scan task panicked"));
        }
    });
    outcomes.into_iter().collect()
}
