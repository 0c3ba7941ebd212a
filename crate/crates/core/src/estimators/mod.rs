//! Channel estimation schemes.
//!
//! Every estimator is a pure function from observations (plus any previously
//! estimated quantities it builds on) to an estimate, and is exact on
//! noiseless data whenever its identifiability precondition holds — the one
//! exception is the nonconvex coordinate-descent solver for `G`, which is
//! exact only up to an independent sign per column and only on converged
//! restarts.

mod coord_descent;
mod ls;
mod multiuser;
mod omp;
mod two_timescale;

pub use coord_descent::{estimate_g_coord_descent, CoordDescentOptions, GEstimate};
pub use ls::{
    estimate_cascaded_dft, estimate_cascaded_ls, estimate_cascaded_onoff, estimate_direct_ls,
    estimate_small_timescale_ls, small_timescale_schedule,
};
pub use multiuser::{correlation_schedule, estimate_lambda_multiuser, CorrelationCoefficients};
pub use omp::{estimate_angular_omp, sensing_matrix, OmpEstimate, OmpStop};
pub use two_timescale::{two_timescale_pipeline, TwoTimescaleOutcome};

use alloc::vec::Vec;

use crate::linalg::{C64, CMat};

/// Estimation scheme tags, as exposed to configuration and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    OnOff,
    Dft,
    Correlation,
    Omp,
    TwoTimescale,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::OnOff => "onoff",
            Scheme::Dft => "dft",
            Scheme::Correlation => "correlation",
            Scheme::Omp => "omp",
            Scheme::TwoTimescale => "two_timescale",
        }
    }

    pub fn all() -> [Scheme; 5] {
        [
            Scheme::OnOff,
            Scheme::Dft,
            Scheme::Correlation,
            Scheme::Omp,
            Scheme::TwoTimescale,
        ]
    }
}

impl core::fmt::Display for Scheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Output of an estimation scheme: the cascaded channel and/or its
/// components, plus the pilot slots the producing schedule consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub scheme: Scheme,
    pub h_hat: Option<CMat>,
    pub h_d_hat: Option<Vec<C64>>,
    pub g_hat: Option<CMat>,
    pub h_r_hat: Option<Vec<C64>>,
    /// Slots consumed by the schedule(s) this estimate was computed from.
    pub slots: usize,
}

impl ChannelEstimate {
    /// New estimate holding only a cascaded channel.
    pub fn cascaded_only(scheme: Scheme, h_hat: CMat, slots: usize) -> Self {
        ChannelEstimate {
            scheme,
            h_hat: Some(h_hat),
            h_d_hat: None,
            g_hat: None,
            h_r_hat: None,
            slots,
        }
    }

    /// The cascaded channel: directly if present, otherwise composed as
    /// `G_hat diag(h_r_hat)`.
    pub fn cascaded(&self) -> Option<CMat> {
        if let Some(h) = &self.h_hat {
            return Some(h.clone());
        }
        match (&self.g_hat, &self.h_r_hat) {
            (Some(g), Some(h_r)) => Some(g.mul_diag(h_r)),
            _ => None,
        }
    }
}
