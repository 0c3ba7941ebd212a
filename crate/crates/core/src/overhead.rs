//! Unknown-coefficient counts and pilot-slot accounting per scheme.
//!
//! The point of the overhead-reduced schemes is visible in plain arithmetic
//! before any simulation runs: a cascaded estimate carries `M * N` unknowns
//! per user (16384 already at `M = 64`, `N = 256`) versus `M` for a
//! conventional no-RIS link, and the protocols differ in how many pilot
//! slots they spend per unknown. These formulas are cross-checked against
//! the simulators' actual slot consumption by the test suites.

use alloc::format;

use crate::channel::SystemDims;
use crate::error::Error;
use crate::estimators::Scheme;

/// Accounting knobs shared by the overhead formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverheadInputs {
    /// Direct-channel (all-OFF) slots spent per user before cascaded
    /// estimation.
    pub t_d: usize,
    /// Amortization period in coherence blocks for large-timescale pilots.
    pub p: usize,
    /// Sub-surface group size `B`; `None` disables grouping.
    pub group_size: Option<usize>,
    /// Slot count of the OMP measurement schedule (required for
    /// [`Scheme::Omp`]).
    pub omp_slots: Option<usize>,
}

impl Default for OverheadInputs {
    fn default() -> Self {
        OverheadInputs {
            t_d: 1,
            p: 100,
            group_size: None,
            omp_slots: None,
        }
    }
}

/// Raw slots for one full estimation round, and the per-coherence-block cost
/// once large-timescale pilots are amortized. For the per-block schemes the
/// two coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotOverhead {
    pub raw_slots: usize,
    pub amortized_slots: f64,
}

/// Number of unknown channel coefficients the scheme estimates.
///
/// Cascaded schemes (ON/OFF, DFT, OMP) face `M * N` per user; the
/// correlation scheme needs only `N` scalars per additional user (the
/// typical user still costs `M * N`); two-timescale splits into `M * N`
/// large-timescale plus `M + N` small-timescale unknowns.
pub fn count_unknowns(dims: SystemDims, scheme: Scheme) -> usize {
    let (m, n) = (dims.m(), dims.n());
    match scheme {
        Scheme::OnOff | Scheme::Dft | Scheme::Omp => m * n,
        Scheme::Correlation => n,
        Scheme::TwoTimescale => m * n + m + n,
    }
}

/// Unknowns of the conventional no-RIS baseline: just the `M` direct-channel
/// coefficients.
pub fn conventional_unknowns(dims: SystemDims) -> usize {
    dims.m()
}

/// Pilot slots consumed by a scheme for all `K` users.
///
/// Grouping with sub-surfaces of size `B` replaces `N` by `N / B` in every
/// formula. Per-user protocols: ON/OFF and DFT spend `T_d + N` each;
/// correlation spends `T_d + N` on the typical user and
/// `T_d + ceil(N / M)` on each further one; OMP spends `T_d + T` each;
/// two-timescale spends `(N + 1) M` once per period plus
/// `T_d + 1 + ceil(N / M)` per user per block.
pub fn pilot_overhead(
    dims: SystemDims,
    scheme: Scheme,
    inputs: &OverheadInputs,
) -> Result<PilotOverhead, Error> {
    if inputs.p == 0 {
        return Err(Error::InvalidConfig(
            "amortization period P must be at least 1".into(),
        ));
    }
    let (m, k) = (dims.m(), dims.k());
    let n = match inputs.group_size {
        None => dims.n(),
        Some(b) => {
            if b == 0 || dims.n() % b != 0 {
                return Err(Error::InvalidConfig(format!(
                    "group size B={b} must divide N={}",
                    dims.n()
                )));
            }
            dims.n() / b
        }
    };
    let t_d = inputs.t_d;

    let per_block = |raw: usize| PilotOverhead {
        raw_slots: raw,
        amortized_slots: raw as f64,
    };
    Ok(match scheme {
        Scheme::OnOff | Scheme::Dft => per_block(k * (t_d + n)),
        Scheme::Correlation => per_block(k * t_d + n + (k - 1) * n.div_ceil(m)),
        Scheme::Omp => {
            let t = inputs.omp_slots.ok_or_else(|| {
                Error::InvalidConfig("OMP overhead needs the schedule slot count T".into())
            })?;
            per_block(k * (t_d + t))
        }
        Scheme::TwoTimescale => {
            let large = (n + 1) * m;
            let small = k * (t_d + 1 + n.div_ceil(m));
            PilotOverhead {
                raw_slots: large + small,
                amortized_slots: large as f64 / inputs.p as f64 + small as f64,
            }
        }
    })
}
