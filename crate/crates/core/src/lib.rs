//! Link-level models and estimators for uplink channel estimation in
//! RIS-assisted multi-antenna systems.
//!
//! An `M`-antenna base station serves `K` single-antenna users through both a
//! direct channel `h_d` and a reflecting link via an `N`-element passive
//! surface: the RIS-to-BS channel `G` composed with the user-to-RIS channel
//! `h_r`. What beamforming ultimately needs is the cascaded channel
//! `H = G diag(h_r)`, and this crate provides:
//!
//! - channel generation (rich-scattering and geometric/sparse models) and the
//!   cascaded/angular-domain transforms ([`channel`], [`angular`]),
//! - RIS reflection schedules and noisy pilot synthesis for the uplink and
//!   dual-link (BS-to-RIS-to-BS) measurement models ([`pilot`]),
//! - the estimation schemes built on those measurements: ON/OFF and
//!   DFT-protocol least squares, multi-user correlation, angular-domain OMP,
//!   and the two-timescale decomposition with coordinate descent
//!   ([`estimators`]),
//! - NMSE/overhead accounting used to compare them ([`metrics`], [`overhead`]).
//!
//! Everything here is `no_std` (with `alloc`) and pure: all randomness comes
//! through explicit [`rand::Rng`] streams, so any result is a deterministic
//! function of configuration and seed. Angles are expressed in normalized
//! spatial frequency (cycles per element); no carrier frequency or element
//! spacing is assumed.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod angular;
pub mod channel;
mod error;
pub mod estimators;
pub mod linalg;
pub mod metrics;
pub mod overhead;
pub mod pilot;
pub mod sampling;

pub use error::Error;
pub use linalg::{CMat, C64};

pub use angular::{dft_dictionary, from_angular, to_angular, AngularDictionary};
pub use channel::{
    cascaded_channel, gen_geometric, gen_rayleigh, group_reduce, CascadedChannel, ChannelSet,
    GeometricPathConfig, GroupingConfig, SystemDims,
};
pub use estimators::{ChannelEstimate, CoordDescentOptions, OmpStop, Scheme};
pub use metrics::{effective_power, nmse, Alignment};
pub use overhead::{count_unknowns, pilot_overhead, OverheadInputs, PilotOverhead};
pub use pilot::{
    simulate_dual_link, simulate_uplink, DualLinkObservation, NoiseConfig, PilotObservation,
    ReflectionSchedule, ReflectionVector, ScheduleKind,
};
