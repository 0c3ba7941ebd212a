//! Least-squares estimators: direct channel, ON/OFF and DFT cascaded
//! protocols, and the small-timescale joint solve for `(h_d, h_r)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::estimators::{ChannelEstimate, Scheme};
use crate::linalg::{lstsq, C64, CMat};
use crate::pilot::{PilotObservation, ReflectionSchedule, ScheduleKind};

/// Direct-channel LS over an all-OFF schedule: with the RIS dark the system
/// degenerates to a conventional link, and averaging the per-slot snapshots
/// `Y[:, t] / s_t` is the LS solution. Per-entry error variance is
/// `sigma2_w / T_d`.
pub fn estimate_direct_ls(obs: &PilotObservation) -> Result<Vec<C64>, Error> {
    if !obs.schedule().is_all_off() {
        return Err(Error::SchemeMisuse {
            expected: "all-OFF direct sounding",
            got: obs.schedule().kind().name(),
        });
    }
    let t = obs.slots();
    if t == 0 {
        return Err(Error::InvalidConfig(
            "direct-channel estimation needs at least one slot".into(),
        ));
    }
    let m = obs.y().rows();
    let scale = 1.0 / t as f64;
    let mut h_d = alloc::vec![C64::new(0.0, 0.0); m];
    for slot in 0..t {
        let s = obs.pilots()[slot];
        for r in 0..m {
            h_d[r] += obs.y()[(r, slot)] / s * scale;
        }
    }
    Ok(h_d)
}

/// ON/OFF cascaded estimation: stage `n` turns on only element `n`, so after
/// removing the known direct channel the snapshot *is* column `n` of `H`.
/// Per-entry error variance is `sigma2_w` given an exact `h_d_hat`.
pub fn estimate_cascaded_onoff(
    obs: &PilotObservation,
    h_d_hat: &[C64],
) -> Result<ChannelEstimate, Error> {
    if obs.schedule().kind() != ScheduleKind::OnOff {
        return Err(Error::SchemeMisuse {
            expected: "onoff",
            got: obs.schedule().kind().name(),
        });
    }
    let (m, n) = (obs.y().rows(), obs.schedule().elements());
    if h_d_hat.len() != m {
        return Err(Error::ShapeMismatch {
            context: "estimate_cascaded_onoff",
        });
    }
    let mut h = CMat::zeros(m, n);
    for col in 0..n {
        let s = obs.pilots()[col];
        for r in 0..m {
            h[(r, col)] = obs.y()[(r, col)] / s - h_d_hat[r];
        }
    }
    Ok(ChannelEstimate::cascaded_only(
        Scheme::OnOff,
        h,
        obs.slots(),
    ))
}

/// DFT-protocol cascaded estimation: all elements stay on and the stacked
/// reflection matrix is the `N x N` DFT, so the LS inverse collapses to
/// `H_hat = Y_tilde Theta^H / N`. Per-entry error variance is
/// `sigma2_w / N` given an exact `h_d_hat` — an `N`-fold gain over ON/OFF.
pub fn estimate_cascaded_dft(
    obs: &PilotObservation,
    h_d_hat: &[C64],
) -> Result<ChannelEstimate, Error> {
    if obs.schedule().kind() != ScheduleKind::Dft {
        return Err(Error::SchemeMisuse {
            expected: "dft",
            got: obs.schedule().kind().name(),
        });
    }
    let (m, n) = (obs.y().rows(), obs.schedule().elements());
    if obs.slots() != n {
        return Err(Error::InvalidConfig(format!(
            "DFT protocol needs T = N slots, got T={} for N={n}",
            obs.slots()
        )));
    }
    if h_d_hat.len() != m {
        return Err(Error::ShapeMismatch {
            context: "estimate_cascaded_dft",
        });
    }
    let corrected = corrected_observation(obs, h_d_hat);
    let theta_h = obs.schedule().stacked().adjoint();
    let h = corrected.mul(&theta_h).scale(C64::new(1.0 / n as f64, 0.0));
    Ok(ChannelEstimate::cascaded_only(Scheme::Dft, h, obs.slots()))
}

/// Cascaded LS for an arbitrary schedule with `T >= N` and a full-rank
/// stacked reflection matrix; solves `min ||Y_tilde - H Theta||_F` by QR.
/// [`estimate_cascaded_dft`] is the closed-form special case.
pub fn estimate_cascaded_ls(
    obs: &PilotObservation,
    h_d_hat: &[C64],
) -> Result<ChannelEstimate, Error> {
    let (m, n) = (obs.y().rows(), obs.schedule().elements());
    if h_d_hat.len() != m {
        return Err(Error::ShapeMismatch {
            context: "estimate_cascaded_ls",
        });
    }
    if obs.slots() < n {
        return Err(Error::Identifiability(format!(
            "cascaded LS needs T >= N slots, got T={} for N={n}",
            obs.slots()
        )));
    }
    let corrected = corrected_observation(obs, h_d_hat);
    // Row m of H solves Theta^T h_m = y_tilde_m.
    let a = obs.schedule().stacked().transpose();
    let mut h = CMat::zeros(m, n);
    for r in 0..m {
        let rhs = corrected.row(r).to_vec();
        let x = lstsq(&a, &rhs).map_err(|rd| {
            Error::Identifiability(format!(
                "stacked reflection matrix is rank deficient (rank {} of {n})",
                rd.rank
            ))
        })?;
        for (col, v) in x.into_iter().enumerate() {
            h[(r, col)] = v;
        }
    }
    Ok(ChannelEstimate::cascaded_only(
        Scheme::Dft,
        h,
        obs.slots(),
    ))
}

/// `Y / s - h_d_hat 1^T`: pilot-normalized observation with the direct
/// channel removed.
fn corrected_observation(obs: &PilotObservation, h_d_hat: &[C64]) -> CMat {
    let (m, t) = obs.y().shape();
    CMat::from_fn(m, t, |r, c| obs.y()[(r, c)] / obs.pilots()[c] - h_d_hat[r])
}

/// Deterministic small-timescale schedule: `1 + extra_off` all-OFF slots
/// followed by the first `ceil(n / m)` DFT columns, giving a full-rank
/// stacked system for the joint `(h_d, h_r)` solve with `M T >= M + N`.
pub fn small_timescale_schedule(m: usize, n: usize, extra_off: usize) -> ReflectionSchedule {
    let dft = ReflectionSchedule::dft(n);
    let needed = n.div_ceil(m);
    let mut vectors = Vec::with_capacity(1 + extra_off + needed);
    for _ in 0..(1 + extra_off) {
        vectors.push(crate::pilot::ReflectionVector::off(n));
    }
    vectors.extend(dft.vectors()[..needed].iter().cloned());
    ReflectionSchedule::custom(vectors).expect("uniform lengths")
}

/// Small-timescale LS of the two fast-varying channels given the
/// quasi-static `G`: slot `t` contributes
/// `y_t = h_d s_t + G_hat diag(theta_t) h_r s_t + w_t`, and stacking the `T`
/// slots gives a linear system in the concatenated unknown `[h_d; h_r]`.
/// Exact when noiseless and `G_hat` exact; a per-column sign flip of `G_hat`
/// is absorbed into `h_r_hat` with the cascaded product unchanged.
pub fn estimate_small_timescale_ls(
    obs: &PilotObservation,
    g_hat: &CMat,
) -> Result<(Vec<C64>, Vec<C64>), Error> {
    let (m, n) = g_hat.shape();
    if obs.y().rows() != m || obs.schedule().elements() != n {
        return Err(Error::ShapeMismatch {
            context: "estimate_small_timescale_ls",
        });
    }
    let t = obs.slots();
    if m * t < m + n {
        return Err(Error::Identifiability(format!(
            "small-timescale LS needs M*T >= M+N measurements, got {} < {}",
            m * t,
            m + n
        )));
    }

    let mut a = CMat::zeros(m * t, m + n);
    let mut rhs = alloc::vec![C64::new(0.0, 0.0); m * t];
    for slot in 0..t {
        let s = obs.pilots()[slot];
        let reflect = g_hat.mul_diag(obs.schedule().vector(slot).theta());
        for r in 0..m {
            let row = slot * m + r;
            a[(row, r)] = s;
            for col in 0..n {
                a[(row, m + col)] = reflect[(r, col)] * s;
            }
            rhs[row] = obs.y()[(r, slot)];
        }
    }
    let x = lstsq(&a, &rhs).map_err(|rd| {
        Error::Identifiability(format!(
            "small-timescale stacking is rank deficient (rank {} of {}; schedule kind {}, T={t})",
            rd.rank,
            m + n,
            obs.schedule().kind().name(),
        ))
    })?;
    Ok((x[..m].to_vec(), x[m..].to_vec()))
}
