//! RIS reflection schedules and noisy pilot synthesis.
//!
//! Uplink pilots: in slot `t` the user transmits a known symbol while the
//! RIS holds the reflecting vector `theta_t`, and the BS receives
//! `y_t = (h_d + H theta_t) s_t + w_t`. Different users sound the channel in
//! disjoint slot blocks, so a single-user simulation per user suffices.
//!
//! Dual-link pilots: the BS sounds `G` itself by transmitting from one
//! antenna and receiving the RIS reflection on the others, one transmit
//! antenna per slot, over `N + 1` sub-frames of `M` slots. The sample at
//! receive antenna `m2` for transmit antenna `m1` in sub-frame `t` is
//! bilinear in the rows of `G`:
//! `y = (g_{m2}^T diag(g_{m1}) theta_t + z_{m1,m2}) s + w`, where `z` is the
//! residual self-interference of the antenna pair (constant within a
//! session) and TDD reciprocity makes the downlink channel `G^T`.
//!
//! All pilot symbols are fixed to 1: least squares is invariant to any known
//! unit-modulus pilot, so nothing is lost. Noise is strictly additive and
//! drawn in a documented order, which makes
//! `noisy(seed) == noiseless + awgn_matrix(seed)` an exact identity.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex;
use rand::Rng;

use crate::channel::ChannelSet;
use crate::error::Error;
use crate::linalg::{C64, CMat};
use crate::sampling::{complex_gaussian, unit_phase};

/// Amplitude tolerance: reflecting coefficients may not exceed unit modulus.
const AMPL_TOL: f64 = 1e-9;

/// Per-slot RIS configuration `theta`, entries `beta_n e^{i phi_n}` with
/// `beta_n` in [0, 1]. OFF elements are exact zeros (perfect absorption).
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionVector {
    theta: Vec<C64>,
}

impl ReflectionVector {
    pub fn new(theta: Vec<C64>) -> Result<Self, Error> {
        if let Some((i, z)) = theta
            .iter()
            .enumerate()
            .find(|(_, z)| z.norm() > 1.0 + AMPL_TOL)
        {
            return Err(Error::InvalidConfig(format!(
                "reflecting amplitude |theta[{i}]| = {} exceeds 1",
                z.norm()
            )));
        }
        Ok(ReflectionVector { theta })
    }

    /// All elements OFF.
    pub fn off(n: usize) -> Self {
        ReflectionVector {
            theta: alloc::vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Only element `idx` ON (unit amplitude, zero phase).
    pub fn basis(n: usize, idx: usize) -> Self {
        let mut theta = alloc::vec![C64::new(0.0, 0.0); n];
        theta[idx] = C64::new(1.0, 0.0);
        ReflectionVector { theta }
    }

    /// All elements ON with zero phase.
    pub fn all_ones(n: usize) -> Self {
        ReflectionVector {
            theta: alloc::vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[C64] {
        &self.theta
    }

    pub fn is_all_off(&self) -> bool {
        self.theta.iter().all(|z| z.norm_sqr() == 0.0)
    }
}

/// Protocol family a schedule was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    OnOff,
    Dft,
    RandomPhase,
    Custom,
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::OnOff => "onoff",
            ScheduleKind::Dft => "dft",
            ScheduleKind::RandomPhase => "random_phase",
            ScheduleKind::Custom => "custom",
        }
    }
}

/// Sequence of reflecting vectors, one per pilot slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSchedule {
    kind: ScheduleKind,
    vectors: Vec<ReflectionVector>,
}

impl ReflectionSchedule {
    /// ON/OFF protocol: slot `n` turns on only element `n` (`T = N`).
    pub fn onoff(n: usize) -> Self {
        ReflectionSchedule {
            kind: ScheduleKind::OnOff,
            vectors: (0..n).map(|i| ReflectionVector::basis(n, i)).collect(),
        }
    }

    /// DFT protocol: slot `t` applies the `t`th column of the unnormalized
    /// `N x N` DFT matrix, so every element stays on at unit amplitude and
    /// the stacked matrix satisfies `Theta^H Theta = N I`.
    pub fn dft(n: usize) -> Self {
        let vectors = (0..n)
            .map(|t| {
                let theta = (0..n)
                    .map(|e| {
                        let ph = (e * t) % n;
                        Complex::from_polar(
                            1.0,
                            -2.0 * core::f64::consts::PI * ph as f64 / n as f64,
                        )
                    })
                    .collect();
                ReflectionVector { theta }
            })
            .collect();
        ReflectionSchedule {
            kind: ScheduleKind::Dft,
            vectors,
        }
    }

    /// `t` slots of i.i.d. unit-modulus entries with uniform phases.
    pub fn random_phase<R: Rng + ?Sized>(t: usize, n: usize, rng: &mut R) -> Self {
        let vectors = (0..t)
            .map(|_| ReflectionVector {
                theta: (0..n).map(|_| unit_phase(rng)).collect(),
            })
            .collect();
        ReflectionSchedule {
            kind: ScheduleKind::RandomPhase,
            vectors,
        }
    }

    /// `t` slots with every element OFF (direct-channel sounding).
    pub fn all_off(t: usize, n: usize) -> Self {
        ReflectionSchedule {
            kind: ScheduleKind::Custom,
            vectors: (0..t).map(|_| ReflectionVector::off(n)).collect(),
        }
    }

    pub fn custom(vectors: Vec<ReflectionVector>) -> Result<Self, Error> {
        if let Some(first) = vectors.first() {
            if vectors.iter().any(|v| v.len() != first.len()) {
                return Err(Error::ShapeMismatch {
                    context: "ReflectionSchedule::custom",
                });
            }
        }
        Ok(ReflectionSchedule {
            kind: ScheduleKind::Custom,
            vectors,
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// Slot count `T`.
    pub fn slots(&self) -> usize {
        self.vectors.len()
    }

    /// RIS element count `N`.
    pub fn elements(&self) -> usize {
        self.vectors.first().map_or(0, ReflectionVector::len)
    }

    pub fn vector(&self, t: usize) -> &ReflectionVector {
        &self.vectors[t]
    }

    pub fn vectors(&self) -> &[ReflectionVector] {
        &self.vectors
    }

    /// Stacked `N x T` matrix with column `t = theta_t`, so that a noiseless
    /// zero-direct-channel observation satisfies `Y = H Theta`.
    pub fn stacked(&self) -> CMat {
        let (n, t) = (self.elements(), self.slots());
        CMat::from_fn(n, t, |e, slot| self.vectors[slot].theta[e])
    }

    pub fn is_all_off(&self) -> bool {
        self.vectors.iter().all(ReflectionVector::is_all_off)
    }
}

/// Noise levels for the simulators. Zero variance means exactly noiseless
/// (no RNG draws are consumed for that component).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    sigma2_w: f64,
    sigma2_z: f64,
}

impl NoiseConfig {
    /// `sigma2_w`: receiver noise variance per complex sample.
    /// `sigma2_z`: residual self-interference variance (dual-link only).
    pub fn new(sigma2_w: f64, sigma2_z: f64) -> Result<Self, Error> {
        if !(sigma2_w >= 0.0 && sigma2_w.is_finite() && sigma2_z >= 0.0 && sigma2_z.is_finite()) {
            return Err(Error::InvalidConfig(
                "noise variances must be finite and nonnegative".into(),
            ));
        }
        Ok(NoiseConfig { sigma2_w, sigma2_z })
    }

    pub fn noiseless() -> Self {
        NoiseConfig {
            sigma2_w: 0.0,
            sigma2_z: 0.0,
        }
    }

    /// Receiver noise only.
    pub fn receiver(sigma2_w: f64) -> Result<Self, Error> {
        NoiseConfig::new(sigma2_w, 0.0)
    }

    pub fn sigma2_w(&self) -> f64 {
        self.sigma2_w
    }

    pub fn sigma2_z(&self) -> f64 {
        self.sigma2_z
    }
}

/// Received uplink pilots for one user: column `t` of `y` is the BS snapshot
/// in slot `t` of the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    y: CMat,
    schedule: ReflectionSchedule,
    pilots: Vec<C64>,
    user: usize,
}

impl PilotObservation {
    pub fn new(
        y: CMat,
        schedule: ReflectionSchedule,
        pilots: Vec<C64>,
        user: usize,
    ) -> Result<Self, Error> {
        if y.cols() != schedule.slots() || pilots.len() != schedule.slots() {
            return Err(Error::ShapeMismatch {
                context: "PilotObservation",
            });
        }
        Ok(PilotObservation {
            y,
            schedule,
            pilots,
            user,
        })
    }

    pub fn y(&self) -> &CMat {
        &self.y
    }

    pub fn schedule(&self) -> &ReflectionSchedule {
        &self.schedule
    }

    pub fn pilots(&self) -> &[C64] {
        &self.pilots
    }

    pub fn user(&self) -> usize {
        self.user
    }

    /// Pilot slots consumed.
    pub fn slots(&self) -> usize {
        self.schedule.slots()
    }
}

/// Synthesizes uplink pilots for user `k`:
/// `Y[:, t] = (h_d + H theta_t) s_t + w_t` with `s_t = 1` and receiver noise
/// CN(0, sigma2_w) per entry. With `sigma2_w = 0` the model is exact and no
/// randomness is consumed.
pub fn simulate_uplink<R: Rng + ?Sized>(
    chan: &ChannelSet,
    user: usize,
    schedule: &ReflectionSchedule,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<PilotObservation, Error> {
    if user >= chan.dims().k() {
        return Err(Error::InvalidConfig(format!(
            "user index {user} out of range for K={}",
            chan.dims().k()
        )));
    }
    if schedule.slots() > 0 && schedule.elements() != chan.dims().n() {
        return Err(Error::ShapeMismatch {
            context: "simulate_uplink",
        });
    }
    let m = chan.dims().m();
    let h = chan.cascaded(user);
    let h_d = chan.h_d(user);
    let mut y = CMat::zeros(m, schedule.slots());
    for t in 0..schedule.slots() {
        let reflected = h.matrix().mul_vec(schedule.vector(t).theta());
        for r in 0..m {
            let mut v = h_d[r] + reflected[r];
            if noise.sigma2_w() > 0.0 {
                v += complex_gaussian(noise.sigma2_w(), rng);
            }
            y[(r, t)] = v;
        }
    }
    let pilots = alloc::vec![C64::new(1.0, 0.0); schedule.slots()];
    PilotObservation::new(y, schedule.clone(), pilots, user)
}

/// Dual-link pilot samples: `subframes[t]` holds `y_{m1, m2, t}` at row
/// `m1` (transmit antenna), column `m2` (receive antenna). Diagonal entries
/// do not exist physically (an antenna never receives its own slot) and are
/// stored as zero; [`DualLinkObservation::entries`] skips them.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLinkObservation {
    m: usize,
    n: usize,
    subframes: Vec<CMat>,
    schedules: Vec<ReflectionVector>,
}

impl DualLinkObservation {
    pub fn new(
        m: usize,
        n: usize,
        subframes: Vec<CMat>,
        schedules: Vec<ReflectionVector>,
    ) -> Result<Self, Error> {
        if subframes.len() != schedules.len() {
            return Err(Error::ShapeMismatch {
                context: "DualLinkObservation",
            });
        }
        if subframes.iter().any(|s| s.shape() != (m, m))
            || schedules.iter().any(|v| v.len() != n)
        {
            return Err(Error::ShapeMismatch {
                context: "DualLinkObservation",
            });
        }
        Ok(DualLinkObservation {
            m,
            n,
            subframes,
            schedules,
        })
    }

    pub fn antennas(&self) -> usize {
        self.m
    }

    pub fn elements(&self) -> usize {
        self.n
    }

    pub fn subframes(&self) -> usize {
        self.subframes.len()
    }

    pub fn schedule(&self, t: usize) -> &ReflectionVector {
        &self.schedules[t]
    }

    /// Sample for transmit antenna `m1`, receive antenna `m2` (`m1 != m2`).
    pub fn sample(&self, m1: usize, m2: usize, t: usize) -> C64 {
        assert_ne!(m1, m2, "no self-reception sample exists");
        self.subframes[t][(m1, m2)]
    }

    /// Iterates `(m1, m2, t, y)` over all off-diagonal samples.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, C64)> + '_ {
        let m = self.m;
        self.subframes.iter().enumerate().flat_map(move |(t, sf)| {
            (0..m).flat_map(move |m1| {
                (0..m)
                    .filter(move |&m2| m2 != m1)
                    .map(move |m2| (m1, m2, t, sf[(m1, m2)]))
            })
        })
    }

    /// Pilot slots consumed: one slot per transmit antenna per sub-frame.
    pub fn slots(&self) -> usize {
        self.subframes.len() * self.m
    }
}

/// Default dual-link reflection sequence: the `N` DFT columns padded with
/// one all-ones vector to fill the `N + 1` sub-frames the protocol uses.
pub fn dual_link_schedules(n: usize) -> Vec<ReflectionVector> {
    let mut v = ReflectionSchedule::dft(n).vectors().to_vec();
    v.push(ReflectionVector::all_ones(n));
    v
}

/// Synthesizes the dual-link sounding of `G`:
/// `y_{m1,m2,t} = (g_{m2}^T diag(g_{m1}) theta_t + z_{m1,m2}) s + w`, with
/// `z` drawn once per ordered antenna pair and `w` per sample, `s = 1`.
///
/// The protocol uses exactly `N + 1` sub-frames; any other schedule count is
/// a configuration error. Draw order: `z` row-major over pairs, then `w`
/// sub-frame by sub-frame, row-major within each.
pub fn simulate_dual_link<R: Rng + ?Sized>(
    g: &CMat,
    schedules: &[ReflectionVector],
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<DualLinkObservation, Error> {
    let (m, n) = g.shape();
    if schedules.len() != n + 1 {
        return Err(Error::InvalidConfig(format!(
            "dual-link pilot needs N+1 = {} sub-frames, got {}",
            n + 1,
            schedules.len()
        )));
    }
    if schedules.iter().any(|v| v.len() != n) {
        return Err(Error::ShapeMismatch {
            context: "simulate_dual_link",
        });
    }

    let mut z = CMat::zeros(m, m);
    if noise.sigma2_z() > 0.0 {
        for m1 in 0..m {
            for m2 in 0..m {
                if m1 != m2 {
                    z[(m1, m2)] = complex_gaussian(noise.sigma2_z(), rng);
                }
            }
        }
    }

    let mut subframes = Vec::with_capacity(schedules.len());
    for sched in schedules {
        let theta = sched.theta();
        let mut sf = CMat::zeros(m, m);
        for m1 in 0..m {
            for m2 in 0..m {
                if m1 == m2 {
                    continue;
                }
                // sum_n G[m2, n] G[m1, n] theta[n]
                let mut p = C64::new(0.0, 0.0);
                for e in 0..n {
                    p += g[(m2, e)] * g[(m1, e)] * theta[e];
                }
                let mut v = p + z[(m1, m2)];
                if noise.sigma2_w() > 0.0 {
                    v += complex_gaussian(noise.sigma2_w(), rng);
                }
                sf[(m1, m2)] = v;
            }
        }
        subframes.push(sf);
    }
    DualLinkObservation::new(m, n, subframes, schedules.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gen_rayleigh, SystemDims};
    use crate::linalg::vec_norm;
    use crate::sampling::awgn_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn onoff_schedule_is_identity_stack() {
        let s = ReflectionSchedule::onoff(2);
        assert_eq!(s.vector(0).theta(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(s.vector(1).theta(), &[c(0.0, 0.0), c(1.0, 0.0)]);
        for n in [1usize, 5] {
            let stacked = ReflectionSchedule::onoff(n).stacked();
            assert!(stacked.sub(&CMat::identity(n)).max_abs() == 0.0);
        }
    }

    #[test]
    fn dft_schedule_small_cases() {
        let s1 = ReflectionSchedule::dft(1);
        assert_eq!(s1.slots(), 1);
        assert!((s1.vector(0).theta()[0] - c(1.0, 0.0)).norm() < 1e-15);

        let s2 = ReflectionSchedule::dft(2);
        assert!((s2.vector(0).theta()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s2.vector(0).theta()[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s2.vector(1).theta()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s2.vector(1).theta()[1] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dft_schedule_orthogonality() {
        let s = ReflectionSchedule::dft(8);
        let theta = s.stacked();
        let gram = theta.adjoint().mul(&theta);
        let dev = gram.sub(&CMat::identity(8).scale(c(8.0, 0.0))).max_abs();
        assert!(dev <= 1e-12, "deviation {dev}");
    }

    #[test]
    fn random_phase_unit_modulus_and_deterministic() {
        let a = ReflectionSchedule::random_phase(4, 6, &mut ChaCha8Rng::seed_from_u64(3));
        let b = ReflectionSchedule::random_phase(4, 6, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        for t in 0..4 {
            for z in a.vector(t).theta() {
                assert!((z.norm() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn random_phase_mean_near_zero() {
        let s = ReflectionSchedule::random_phase(64, 32, &mut ChaCha8Rng::seed_from_u64(4));
        let mut acc = c(0.0, 0.0);
        for t in 0..64 {
            for z in s.vector(t).theta() {
                acc += z;
            }
        }
        let mean = acc / c(2048.0, 0.0);
        assert!(mean.norm() < 0.05, "mean magnitude {}", mean.norm());
    }

    #[test]
    fn reflection_vector_rejects_over_unit_amplitude() {
        assert!(ReflectionVector::new(alloc::vec![c(1.5, 0.0)]).is_err());
        assert!(ReflectionVector::new(alloc::vec![c(0.6, 0.6)]).is_ok());
    }

    #[test]
    fn uplink_scalar_arithmetic() {
        // M=1, N=1: h_d=1, G=2, h_r=3, theta=1 -> y = 1 + 2*3 = 7.
        let dims = SystemDims::new(1, 1, 1).unwrap();
        let chan = ChannelSet::new(
            dims,
            alloc::vec![alloc::vec![c(1.0, 0.0)]],
            CMat::from_rows(&[&[c(2.0, 0.0)]]),
            alloc::vec![alloc::vec![c(3.0, 0.0)]],
        )
        .unwrap();
        let sched = ReflectionSchedule::custom(alloc::vec![ReflectionVector::all_ones(1)]).unwrap();
        let obs = simulate_uplink(
            &chan,
            0,
            &sched,
            &NoiseConfig::noiseless(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert!((obs.y()[(0, 0)] - c(7.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn uplink_all_off_sees_direct_channel_only() {
        let dims = SystemDims::new(3, 4, 1).unwrap();
        let chan = gen_rayleigh(dims, &mut ChaCha8Rng::seed_from_u64(5));
        let sched = ReflectionSchedule::all_off(2, 4);
        let obs = simulate_uplink(
            &chan,
            0,
            &sched,
            &NoiseConfig::noiseless(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        for t in 0..2 {
            for r in 0..3 {
                assert!((obs.y()[(r, t)] - chan.h_d(0)[r]).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn uplink_matches_cascaded_model() {
        let dims = SystemDims::new(3, 4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let chan = gen_rayleigh(dims, &mut rng);
        let sched = ReflectionSchedule::random_phase(5, 4, &mut rng);
        let obs = simulate_uplink(&chan, 1, &sched, &NoiseConfig::noiseless(), &mut rng).unwrap();
        let h = chan.cascaded(1);
        for t in 0..5 {
            let expect = h.matrix().mul_vec(sched.vector(t).theta());
            for r in 0..3 {
                let dev = (obs.y()[(r, t)] - (chan.h_d(1)[r] + expect[r])).norm();
                assert!(dev <= 1e-12);
            }
        }
    }

    #[test]
    fn uplink_dft_with_zero_direct_is_h_theta() {
        let dims = SystemDims::new(3, 4, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base = gen_rayleigh(dims, &mut rng);
        let chan = ChannelSet::new(
            dims,
            alloc::vec![alloc::vec![c(0.0, 0.0); 3]],
            base.g().clone(),
            alloc::vec![base.h_r(0).to_vec()],
        )
        .unwrap();
        let sched = ReflectionSchedule::dft(4);
        let obs = simulate_uplink(&chan, 0, &sched, &NoiseConfig::noiseless(), &mut rng).unwrap();
        let expect = chan.cascaded(0).matrix().mul(&sched.stacked());
        assert!(obs.y().sub(&expect).max_abs() <= 1e-12);
    }

    #[test]
    fn noise_is_additive_with_shared_seed() {
        let dims = SystemDims::new(3, 4, 1).unwrap();
        let chan = gen_rayleigh(dims, &mut ChaCha8Rng::seed_from_u64(8));
        let sched = ReflectionSchedule::dft(4);
        let clean = simulate_uplink(
            &chan,
            0,
            &sched,
            &NoiseConfig::noiseless(),
            &mut ChaCha8Rng::seed_from_u64(99),
        )
        .unwrap();
        let noisy = simulate_uplink(
            &chan,
            0,
            &sched,
            &NoiseConfig::receiver(0.5).unwrap(),
            &mut ChaCha8Rng::seed_from_u64(99),
        )
        .unwrap();
        let w = awgn_matrix(3, 4, 0.5, &mut ChaCha8Rng::seed_from_u64(99));
        assert!(noisy.y().sub(&clean.y().add(&w)).max_abs() == 0.0);
    }

    #[test]
    fn dual_link_hand_example() {
        // M=2, N=1, G = [1; 2]: y_{1,2} = g_2 g_1 theta = 2.
        let g = CMat::from_rows(&[&[c(1.0, 0.0)], &[c(2.0, 0.0)]]);
        let schedules = dual_link_schedules(1);
        let obs = simulate_dual_link(
            &g,
            &schedules,
            &NoiseConfig::noiseless(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        // Zero-based: transmit antenna 0, receive antenna 1.
        assert!((obs.sample(0, 1, 0) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((obs.sample(1, 0, 0) - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dual_link_zero_channel_sees_only_interference() {
        let g = CMat::zeros(3, 2);
        let noise = NoiseConfig::new(0.0, 1.0).unwrap();
        let obs = simulate_dual_link(
            &g,
            &dual_link_schedules(2),
            &noise,
            &mut ChaCha8Rng::seed_from_u64(9),
        )
        .unwrap();
        // z is constant across sub-frames for each pair.
        for (m1, m2, _, y) in obs.entries() {
            assert_eq!(y, obs.sample(m1, m2, 0));
        }
    }

    #[test]
    fn dual_link_invariant_to_column_sign_flip() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = CMat::from_fn(3, 2, |_, _| complex_gaussian(1.0, &mut rng));
        let mut flipped = g.clone();
        for r in 0..3 {
            flipped[(r, 1)] = -flipped[(r, 1)];
        }
        let schedules = dual_link_schedules(2);
        let a = simulate_dual_link(
            &g,
            &schedules,
            &NoiseConfig::noiseless(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        let b = simulate_dual_link(
            &flipped,
            &schedules,
            &NoiseConfig::noiseless(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        for ((.., ya), (.., yb)) in a.entries().zip(b.entries()) {
            assert!((ya - yb).norm() <= 1e-12);
        }
    }

    #[test]
    fn dual_link_requires_n_plus_one_subframes() {
        let g = CMat::zeros(2, 3);
        let schedules = dual_link_schedules(3);
        assert!(simulate_dual_link(
            &g,
            &schedules[..3],
            &NoiseConfig::noiseless(),
            &mut ChaCha8Rng::seed_from_u64(0)
        )
        .is_err());
    }

    #[test]
    fn dual_link_slot_count() {
        let g = CMat::zeros(4, 8);
        let obs = simulate_dual_link(
            &g,
            &dual_link_schedules(8),
            &NoiseConfig::noiseless(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(obs.slots(), 9 * 4);
    }

    #[test]
    fn snr_calibration_sanity() {
        // Empirical E||h_d + H theta||^2 close to M(1+N) for unit-modulus theta.
        let dims = SystemDims::new(4, 8, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 3000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let chan = gen_rayleigh(dims, &mut rng);
            let sched = ReflectionSchedule::random_phase(1, 8, &mut rng);
            let obs =
                simulate_uplink(&chan, 0, &sched, &NoiseConfig::noiseless(), &mut rng).unwrap();
            acc += vec_norm(&obs.y().col(0)).powi(2);
        }
        let mean = acc / trials as f64;
        let expect = (dims.m() * (1 + dims.n())) as f64;
        assert!((mean - expect).abs() < 0.1 * expect, "mean {mean} vs {expect}");
    }
}
