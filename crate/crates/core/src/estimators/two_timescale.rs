//! Two-timescale estimation pipeline.
//!
//! The RIS-to-BS channel `G` is quasi-static (both ends are fixed
//! infrastructure), while the user-side channels change every coherence
//! block. The pipeline therefore sounds `G` once per large-timescale period
//! with dual-link pilots and coordinate descent, then solves the small joint
//! LS for `(h_d, h_r)` per user per block. Amortized over `P` blocks, the
//! expensive `(N + 1) M` dual-link slots shrink to a negligible share of the
//! per-block overhead.
//!
//! The per-column sign ambiguity of the coordinate-descent `G` estimate
//! cancels in the cascaded reconstruction: a flipped column of `G_hat` is
//! compensated by a flipped entry of `h_r_hat`, leaving
//! `G_hat diag(h_r_hat)` unchanged.

use alloc::vec::Vec;

use rand::Rng;

use crate::channel::ChannelSet;
use crate::error::Error;
use crate::estimators::{
    estimate_g_coord_descent, estimate_small_timescale_ls, small_timescale_schedule,
    ChannelEstimate, CoordDescentOptions, GEstimate, Scheme,
};
use crate::pilot::{dual_link_schedules, simulate_dual_link, simulate_uplink, NoiseConfig};

/// Pipeline output: the shared `G` estimate plus one per-user estimate, with
/// the slot ledger split into the once-per-period and per-block parts.
#[derive(Debug, Clone)]
pub struct TwoTimescaleOutcome {
    pub g: GEstimate,
    pub per_user: Vec<ChannelEstimate>,
    /// Dual-link slots consumed once per large-timescale period:
    /// `(N + 1) * M`.
    pub large_slots: usize,
    /// Uplink slots consumed per user per coherence block:
    /// `t_d + 1 + ceil(N / M)`.
    pub small_slots_per_user: usize,
}

impl TwoTimescaleOutcome {
    /// Slots per coherence block once the dual-link cost is spread over an
    /// amortization period of `p` blocks.
    pub fn amortized_slots_per_block(&self, p: usize) -> f64 {
        self.large_slots as f64 / p as f64
            + (self.small_slots_per_user * self.per_user.len()) as f64
    }
}

/// Runs the full two-timescale protocol on one channel realization: a
/// dual-link sounding of `G` (DFT columns padded with one all-ones vector,
/// `N + 1` sub-frames), then the per-user small-timescale LS with `t_d`
/// additional all-OFF slots folded into the joint solve.
///
/// A non-converged coordinate descent is carried through in the returned
/// [`GEstimate`], not raised; callers decide whether to score or discard.
pub fn two_timescale_pipeline<R: Rng + ?Sized>(
    chan: &ChannelSet,
    noise: &NoiseConfig,
    opts: &CoordDescentOptions,
    t_d: usize,
    rng: &mut R,
) -> Result<TwoTimescaleOutcome, Error> {
    let dims = chan.dims();
    let (m, n) = (dims.m(), dims.n());

    let schedules = dual_link_schedules(n);
    let dual = simulate_dual_link(chan.g(), &schedules, noise, rng)?;
    let large_slots = dual.slots();
    let g = estimate_g_coord_descent(&dual, opts, rng)?;

    let sched = small_timescale_schedule(m, n, t_d);
    let mut per_user = Vec::with_capacity(dims.k());
    for user in 0..dims.k() {
        let obs = simulate_uplink(chan, user, &sched, noise, rng)?;
        let (h_d_hat, h_r_hat) = estimate_small_timescale_ls(&obs, &g.g_hat)?;
        let h_hat = g.g_hat.mul_diag(&h_r_hat);
        per_user.push(ChannelEstimate {
            scheme: Scheme::TwoTimescale,
            h_hat: Some(h_hat),
            h_d_hat: Some(h_d_hat),
            g_hat: Some(g.g_hat.clone()),
            h_r_hat: Some(h_r_hat),
            slots: obs.slots(),
        });
    }
    let small_slots_per_user = sched.slots();
    Ok(TwoTimescaleOutcome {
        g,
        per_user,
        large_slots,
        small_slots_per_user,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gen_rayleigh, SystemDims};
    use crate::metrics::{nmse, nmse_vec, Alignment};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_cascade_is_exact_despite_sign_ambiguity() {
        let dims = SystemDims::new(4, 8, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let chan = gen_rayleigh(dims, &mut rng);
        let out = two_timescale_pipeline(
            &chan,
            &NoiseConfig::noiseless(),
            &CoordDescentOptions::default(),
            0,
            &mut rng,
        )
        .unwrap();
        assert!(out.g.converged);
        let est = &out.per_user[0];
        let err = nmse(
            chan.cascaded(0).matrix(),
            &est.cascaded().unwrap(),
            Alignment::None,
        )
        .unwrap();
        assert!(err <= 1e-6, "cascaded NMSE {err}");
        let derr = nmse_vec(chan.h_d(0), est.h_d_hat.as_ref().unwrap()).unwrap();
        assert!(derr <= 1e-6, "direct NMSE {derr}");
    }

    #[test]
    fn slot_accounting_matches_protocol() {
        // M=8, N=32: large = 33 * 8 = 264, small per block = 1 + 4 = 5,
        // amortized over 100 blocks: 264/100 + 5 = 7.64.
        let dims = SystemDims::new(8, 32, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let chan = gen_rayleigh(dims, &mut rng);
        let out = two_timescale_pipeline(
            &chan,
            &NoiseConfig::noiseless(),
            &CoordDescentOptions {
                max_sweeps: 1,
                rel_tol: 1e-8,
                restarts: 1,
            },
            0,
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.large_slots, 264);
        assert_eq!(out.small_slots_per_user, 5);
        assert!((out.amortized_slots_per_block(100) - 7.64).abs() < 1e-12);
    }

    #[test]
    fn extra_direct_slots_enlarge_small_schedule() {
        let dims = SystemDims::new(2, 4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let chan = gen_rayleigh(dims, &mut rng);
        let out = two_timescale_pipeline(
            &chan,
            &NoiseConfig::noiseless(),
            &CoordDescentOptions::default(),
            3,
            &mut rng,
        )
        .unwrap();
        // t_d + 1 + ceil(4/2) = 3 + 1 + 2
        assert_eq!(out.small_slots_per_user, 6);
        assert_eq!(out.per_user.len(), 2);
        assert_eq!(out.per_user[0].slots, 6);
    }
}
