//! Multi-user correlation estimation.
//!
//! All users share the RIS-to-BS channel, so column `n` of user `k`'s
//! cascaded channel is a scalar multiple of the typical user's column:
//! `h_{k,n} = lambda_{k,n} h_{1,n}` with `lambda_{k,n} = t_{k,n} / t_{1,n}`,
//! the ratio of the users' channels to RIS element `n`. Once the typical
//! user is estimated in full (DFT protocol), every further user needs only
//! `N` scalars, recovered here by stacking a handful of slots into one
//! linear LS over `lambda`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent std float methods shadow this in test builds
use num_traits::Float;

use crate::error::Error;
use crate::estimators::{ChannelEstimate, Scheme};
use crate::linalg::{lstsq, vec_norm, C64, CMat};
use crate::pilot::{PilotObservation, ReflectionSchedule};

/// Relative column-norm floor below which a typical-user column cannot
/// anchor a ratio estimate.
const DEGENERATE_REL_TOL: f64 = 1e-9;

/// Per-column correlation ratios `lambda_{k,n}` of one user against the
/// typical user.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCoefficients {
    lambda: Vec<C64>,
}

impl CorrelationCoefficients {
    pub fn lambda(&self) -> &[C64] {
        &self.lambda
    }
}

/// Deterministic follow-up schedule for users `k >= 2`: the first `t_k`
/// columns of the DFT schedule, which keep the stacked system
/// well-conditioned.
pub fn correlation_schedule(n: usize, t_k: usize) -> ReflectionSchedule {
    let dft = ReflectionSchedule::dft(n);
    ReflectionSchedule::custom(dft.vectors()[..t_k.min(n)].to_vec()).expect("uniform lengths")
}

/// Estimates `lambda` and the cascaded channel of user `k` from `T_k` slots,
/// given the typical user's estimate `h1_hat` and the user's own direct
/// channel estimate.
///
/// Slot `t` contributes the `M x N` matrix `A_t` with column
/// `n = h1_hat[:, n] * theta_t[n]`; stacking over slots and solving LS
/// against the direct-corrected snapshots yields `lambda` in one shot, and
/// `H_k_hat = h1_hat diag(lambda)`. Exact in the noiseless case with exact
/// inputs and a full-column-rank stacking, which needs
/// `T_k >= ceil(N / M)`.
pub fn estimate_lambda_multiuser(
    h1_hat: &CMat,
    obs: &PilotObservation,
    h_d_hat: &[C64],
) -> Result<(CorrelationCoefficients, ChannelEstimate), Error> {
    let (m, n) = h1_hat.shape();
    if obs.y().rows() != m || obs.schedule().elements() != n || h_d_hat.len() != m {
        return Err(Error::ShapeMismatch {
            context: "estimate_lambda_multiuser",
        });
    }
    let t = obs.slots();
    if m * t < n {
        return Err(Error::Identifiability(format!(
            "correlation LS needs M*T_k >= N, got {} < {n}",
            m * t
        )));
    }

    // A ratio against a vanishing column is meaningless; report all such
    // indices at once.
    let col_floor = DEGENERATE_REL_TOL * h1_hat.fro_norm() / (n as f64).sqrt();
    let degenerate: Vec<usize> = (0..n)
        .filter(|&c| vec_norm(&h1_hat.col(c)) < col_floor)
        .collect();
    if !degenerate.is_empty() {
        return Err(Error::DegenerateColumns(degenerate));
    }

    let mut a = CMat::zeros(m * t, n);
    let mut rhs = alloc::vec![C64::new(0.0, 0.0); m * t];
    for slot in 0..t {
        let s = obs.pilots()[slot];
        let theta = obs.schedule().vector(slot).theta();
        for r in 0..m {
            let row = slot * m + r;
            for col in 0..n {
                a[(row, col)] = h1_hat[(r, col)] * theta[col] * s;
            }
            rhs[row] = obs.y()[(r, slot)] - h_d_hat[r] * s;
        }
    }
    let lambda = lstsq(&a, &rhs).map_err(|rd| {
        Error::Identifiability(format!(
            "stacked correlation system is rank deficient (rank {} of {n})",
            rd.rank
        ))
    })?;

    let h_hat = h1_hat.mul_diag(&lambda);
    let estimate = ChannelEstimate::cascaded_only(Scheme::Correlation, h_hat, t);
    Ok((CorrelationCoefficients { lambda }, estimate))
}
