//! Coordinate descent for the dual-link estimation of `G`.
//!
//! The dual-link samples are bilinear in the rows of `G`:
//! `y_{m1,m2,t} = sum_n G[m1,n] G[m2,n] theta_t[n] + noise` with `m1 != m2`,
//! so each entry `G[m,n]` appears *linearly* in every residual it touches
//! (the quadratic diagonal terms are exactly the excluded `m1 = m2` pairs).
//! Cyclic coordinate descent therefore has a closed-form one-dimensional
//! complex LS step per entry, and the objective is non-increasing across
//! every single update. The objective is nonconvex in `G` jointly, so the
//! solver multi-starts from random initializations and returns the best
//! restart.
//!
//! The data determine `G` only up to an independent sign per column: flipping
//! column `n` flips both factors of every product `G[m1,n] G[m2,n]`. Score
//! estimates with per-column sign alignment, or through the cascaded product
//! where the ambiguity cancels.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::Error;
use crate::linalg::{C64, CMat};
use crate::pilot::DualLinkObservation;
use crate::sampling::complex_gaussian;

/// Solver controls. The defaults are artifact choices: cyclic sweeps in
/// lexicographic `(m, n)` order, convergence when the per-sweep relative
/// cost decrease falls below `rel_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordDescentOptions {
    pub max_sweeps: usize,
    pub rel_tol: f64,
    pub restarts: usize,
}

impl Default for CoordDescentOptions {
    fn default() -> Self {
        CoordDescentOptions {
            max_sweeps: 200,
            rel_tol: 1e-8,
            restarts: 5,
        }
    }
}

impl CoordDescentOptions {
    fn validate(&self) -> Result<(), Error> {
        if self.max_sweeps == 0 || self.restarts == 0 {
            return Err(Error::InvalidConfig(
                "max_sweeps and restarts must be at least 1".into(),
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidConfig(
                "rel_tol must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

/// Best-of-restarts coordinate-descent estimate of `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GEstimate {
    pub g_hat: CMat,
    /// Whether the returned restart met the relative-decrease criterion
    /// within `max_sweeps`. Non-convergence is reported, not raised.
    pub converged: bool,
    /// Final value of the squared-error objective.
    pub residual: f64,
    /// Sweeps used by the returned restart.
    pub sweeps: usize,
    /// Objective after every coordinate update, per restart (first entry of
    /// each trace is the initial cost).
    pub traces: Vec<Vec<f64>>,
    pub best_restart: usize,
}

/// Minimizes `sum |y_{m1,m2,t} - g_{m2}^T diag(g_{m1}) theta_t|^2` over the
/// entries of `G` by cyclic closed-form coordinate updates.
///
/// An all-zero observation short-circuits to the zero matrix. A restart that
/// exhausts `max_sweeps` without meeting `rel_tol` is returned flagged
/// `converged: false` rather than as an error.
pub fn estimate_g_coord_descent<R: Rng + ?Sized>(
    obs: &DualLinkObservation,
    opts: &CoordDescentOptions,
    rng: &mut R,
) -> Result<GEstimate, Error> {
    opts.validate()?;
    let m = obs.antennas();
    let n = obs.elements();
    if m < 2 {
        return Err(Error::Identifiability(
            "dual-link sounding needs at least 2 BS antennas".into(),
        ));
    }

    if obs.entries().all(|(.., y)| y.norm_sqr() == 0.0) {
        return Ok(GEstimate {
            g_hat: CMat::zeros(m, n),
            converged: true,
            residual: 0.0,
            sweeps: 0,
            traces: alloc::vec![alloc::vec![0.0]],
            best_restart: 0,
        });
    }

    let mut best: Option<Restart> = None;
    let mut traces = Vec::with_capacity(opts.restarts);
    let mut best_restart = 0;
    for r in 0..opts.restarts {
        let init = CMat::from_fn(m, n, |_, _| complex_gaussian(1.0, rng));
        let run = descend(obs, init, opts);
        traces.push(run.trace.clone());
        let better = best.as_ref().map_or(true, |b| run.cost < b.cost);
        if better {
            best_restart = r;
            best = Some(run);
        }
    }
    let best = best.expect("restarts >= 1");
    Ok(GEstimate {
        g_hat: best.g,
        converged: best.converged,
        residual: best.cost.max(0.0),
        sweeps: best.sweeps,
        traces,
        best_restart,
    })
}

struct Restart {
    g: CMat,
    cost: f64,
    converged: bool,
    sweeps: usize,
    trace: Vec<f64>,
}

fn descend(obs: &DualLinkObservation, mut g: CMat, opts: &CoordDescentOptions) -> Restart {
    let m = obs.antennas();
    let n = obs.elements();
    let t_sub = obs.subframes();

    // Residuals e[t][(m1, m2)] = y - model, model symmetric in (m1, m2).
    let mut e: Vec<CMat> = Vec::with_capacity(t_sub);
    let mut cost = 0.0;
    for t in 0..t_sub {
        let theta = obs.schedule(t).theta();
        let mut et = CMat::zeros(m, m);
        for m1 in 0..m {
            for m2 in 0..m {
                if m1 == m2 {
                    continue;
                }
                let mut p = C64::new(0.0, 0.0);
                for col in 0..n {
                    p += g[(m1, col)] * g[(m2, col)] * theta[col];
                }
                let r = obs.sample(m1, m2, t) - p;
                et[(m1, m2)] = r;
                cost += r.norm_sqr();
            }
        }
        e.push(et);
    }

    let mut trace = Vec::with_capacity(1 + opts.max_sweeps * m * n);
    trace.push(cost);
    let mut converged = false;
    let mut sweeps = 0;
    for _sweep in 0..opts.max_sweeps {
        let sweep_start = cost;
        for mi in 0..m {
            for ni in 0..n {
                // One-dimensional LS step on x = G[mi, ni]: every term where
                // antenna mi transmits or receives depends on x with
                // coefficient a = G[q, ni] * theta_t[ni].
                let mut num = C64::new(0.0, 0.0);
                let mut den = 0.0;
                for t in 0..t_sub {
                    let th = obs.schedule(t).theta()[ni];
                    if th.norm_sqr() == 0.0 {
                        continue;
                    }
                    for q in 0..m {
                        if q == mi {
                            continue;
                        }
                        let a = g[(q, ni)] * th;
                        num += a.conj() * (e[t][(mi, q)] + e[t][(q, mi)]);
                        den += 2.0 * a.norm_sqr();
                    }
                }
                if den <= f64::MIN_POSITIVE {
                    trace.push(cost);
                    continue;
                }
                let step = num / den;
                g[(mi, ni)] += step;
                for t in 0..t_sub {
                    let th = obs.schedule(t).theta()[ni];
                    if th.norm_sqr() == 0.0 {
                        continue;
                    }
                    for q in 0..m {
                        if q == mi {
                            continue;
                        }
                        let delta = g[(q, ni)] * th * step;
                        for &(i, j) in &[(mi, q), (q, mi)] {
                            let old = e[t][(i, j)];
                            let new = old - delta;
                            cost += new.norm_sqr() - old.norm_sqr();
                            e[t][(i, j)] = new;
                        }
                    }
                }
                trace.push(cost);
            }
        }
        sweeps += 1;
        let decrease = sweep_start - cost;
        if decrease <= opts.rel_tol * sweep_start.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    Restart {
        g,
        cost,
        converged,
        sweeps,
        trace,
    }
}
