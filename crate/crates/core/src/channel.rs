//! System geometry, ground-truth channel generation, and the cascaded
//! channel transform.
//!
//! The uplink model sees three links per user: the direct channel `h_d`
//! (BS-side, length `M`), the RIS-to-BS channel `G` (`M x N`, shared by all
//! users), and the user-to-RIS channel `h_r` (length `N`). The reflecting
//! link enters the received signal only through `G diag(theta) h_r`, so the
//! object estimators actually target is the cascaded channel
//! `H = G diag(h_r)`: its column `n` is the `n`th column of `G` scaled by the
//! `n`th entry of `h_r`, and `G diag(theta) h_r = H theta` for every
//! reflecting vector.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex;
#[allow(unused_imports)] // inherent std float methods shadow this in test builds
use num_traits::Float;
use rand::Rng;

use crate::error::Error;
use crate::linalg::{C64, CMat};
use crate::sampling::complex_gaussian;

/// Problem geometry: BS antennas, RIS elements, users.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemDims {
    m: usize,
    n: usize,
    k: usize,
}

impl SystemDims {
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self, Error> {
        if m == 0 || n == 0 || k == 0 {
            return Err(Error::InvalidConfig(format!(
                "dimensions must be positive, got M={m}, N={n}, K={k}"
            )));
        }
        Ok(SystemDims { m, n, k })
    }

    /// BS antenna count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// RIS element count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// User count.
    pub fn k(&self) -> usize {
        self.k
    }
}

/// One ground-truth channel realization for all `K` users.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    dims: SystemDims,
    h_d: Vec<Vec<C64>>,
    g: CMat,
    h_r: Vec<Vec<C64>>,
}

impl ChannelSet {
    pub fn new(
        dims: SystemDims,
        h_d: Vec<Vec<C64>>,
        g: CMat,
        h_r: Vec<Vec<C64>>,
    ) -> Result<Self, Error> {
        let shapes_ok = h_d.len() == dims.k()
            && h_r.len() == dims.k()
            && h_d.iter().all(|v| v.len() == dims.m())
            && h_r.iter().all(|v| v.len() == dims.n())
            && g.shape() == (dims.m(), dims.n());
        if !shapes_ok {
            return Err(Error::ShapeMismatch {
                context: "ChannelSet",
            });
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        let all_finite = h_d.iter().flatten().all(finite)
            && h_r.iter().flatten().all(finite)
            && g.data().iter().all(finite);
        if !all_finite {
            return Err(Error::InvalidConfig(
                "channel entries must be finite".into(),
            ));
        }
        Ok(ChannelSet { dims, h_d, g, h_r })
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    /// Direct channel of user `k`.
    pub fn h_d(&self, k: usize) -> &[C64] {
        &self.h_d[k]
    }

    /// RIS-to-BS channel, shared by all users.
    pub fn g(&self) -> &CMat {
        &self.g
    }

    /// User-to-RIS channel of user `k`.
    pub fn h_r(&self, k: usize) -> &[C64] {
        &self.h_r[k]
    }

    /// Cascaded channel `H_k = G diag(h_{r,k})` of user `k`.
    pub fn cascaded(&self, k: usize) -> CascadedChannel {
        cascaded_channel(&self.g, &self.h_r[k]).expect("shapes validated at construction")
    }
}

/// Cascaded user-RIS-BS channel `H = G diag(h_r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedChannel {
    h: CMat,
}

impl CascadedChannel {
    pub fn from_matrix(h: CMat) -> Self {
        CascadedChannel { h }
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    pub fn into_matrix(self) -> CMat {
        self.h
    }

    /// Column associated with RIS element `n`.
    pub fn col(&self, n: usize) -> Vec<C64> {
        self.h.col(n)
    }
}

/// Forms `H = G diag(h_r)`: column `n` is `G[:, n] * h_r[n]`.
pub fn cascaded_channel(g: &CMat, h_r: &[C64]) -> Result<CascadedChannel, Error> {
    if g.cols() != h_r.len() {
        return Err(Error::ShapeMismatch {
            context: "cascaded_channel",
        });
    }
    Ok(CascadedChannel {
        h: g.mul_diag(h_r),
    })
}

/// Rich-scattering baseline: every channel entry i.i.d. CN(0, 1).
///
/// Draw order (fixed for reproducibility): `h_d` per user, then `G` column by
/// column, then `h_r` per user.
pub fn gen_rayleigh<R: Rng + ?Sized>(dims: SystemDims, rng: &mut R) -> ChannelSet {
    let h_d: Vec<Vec<C64>> = (0..dims.k())
        .map(|_| (0..dims.m()).map(|_| complex_gaussian(1.0, rng)).collect())
        .collect();
    let mut g = CMat::zeros(dims.m(), dims.n());
    for c in 0..dims.n() {
        for r in 0..dims.m() {
            g[(r, c)] = complex_gaussian(1.0, rng);
        }
    }
    let h_r: Vec<Vec<C64>> = (0..dims.k())
        .map(|_| (0..dims.n()).map(|_| complex_gaussian(1.0, rng)).collect())
        .collect();
    ChannelSet { dims, h_d, g, h_r }
}

/// Path structure for the geometric (sparse multipath) model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricPathConfig {
    /// Paths between the RIS and the BS.
    pub l_g: usize,
    /// Paths between each user and the RIS.
    pub l_r: usize,
    /// Draw angles from the DFT grid (without replacement) so the angular
    /// cascaded channel is exactly sparse.
    pub on_grid: bool,
    /// Variance of the complex Gaussian path gains.
    pub gain_variance: f64,
}

impl GeometricPathConfig {
    pub fn new(l_g: usize, l_r: usize, on_grid: bool, gain_variance: f64) -> Self {
        GeometricPathConfig {
            l_g,
            l_r,
            on_grid,
            gain_variance,
        }
    }

    fn validate(&self, dims: SystemDims) -> Result<(), Error> {
        if self.l_g == 0 || self.l_r == 0 {
            return Err(Error::InvalidConfig(
                "path counts L_G and L_r must be at least 1".into(),
            ));
        }
        if !(self.gain_variance > 0.0 && self.gain_variance.is_finite()) {
            return Err(Error::InvalidConfig(
                "gain_variance must be positive and finite".into(),
            ));
        }
        if self.on_grid {
            if self.l_g > dims.m().min(dims.n()) {
                return Err(Error::InvalidConfig(format!(
                    "on-grid capacity exceeded: L_G={} > min(M, N)={}",
                    self.l_g,
                    dims.m().min(dims.n())
                )));
            }
            if self.l_r > dims.n() {
                return Err(Error::InvalidConfig(format!(
                    "on-grid capacity exceeded: L_r={} > N={}",
                    self.l_r,
                    dims.n()
                )));
            }
        }
        Ok(())
    }
}

/// Geometric multipath model with a limited number of scatterers.
///
/// `G` is a sum of `L_G` rank-1 outer products of BS- and RIS-side steering
/// vectors; each `h_r` is a sum of `L_r` RIS-side steering vectors. Both
/// arrays are modeled as uniform linear arrays so the steering vectors are
/// DFT-style phase ramps in normalized spatial frequency. In on-grid mode the
/// frequencies are drawn without replacement from the DFT grid, which makes
/// the angular cascaded channel of every user exactly `L_G * L_r`-sparse.
///
/// Deterministic scale factors normalize the model so that with
/// `gain_variance = 1` the expected Frobenius power of `G`, `h_r`, and the
/// cascaded `H` all match the Rayleigh baseline. Direct channels have no
/// RIS-side geometry and stay i.i.d. CN(0, 1).
pub fn gen_geometric<R: Rng + ?Sized>(
    dims: SystemDims,
    paths: GeometricPathConfig,
    rng: &mut R,
) -> Result<ChannelSet, Error> {
    paths.validate(dims)?;
    let (m, n) = (dims.m(), dims.n());

    let h_d: Vec<Vec<C64>> = (0..dims.k())
        .map(|_| (0..m).map(|_| complex_gaussian(1.0, rng)).collect())
        .collect();

    // G = sqrt(M N / L_G) * sum_l gain_l * a_M(f_l) a_N(q_l)^T
    let g_scale = ((m * n) as f64 / paths.l_g as f64).sqrt();
    let bs_freqs = draw_frequencies(m, paths.l_g, paths.on_grid, rng);
    let ris_freqs = draw_frequencies(n, paths.l_g, paths.on_grid, rng);
    let mut g = CMat::zeros(m, n);
    for l in 0..paths.l_g {
        let gain = complex_gaussian(paths.gain_variance, rng) * g_scale;
        let a_bs = steering(m, bs_freqs[l]);
        let a_ris = steering(n, ris_freqs[l]);
        for r in 0..m {
            for c in 0..n {
                g[(r, c)] += gain * a_bs[r] * a_ris[c];
            }
        }
    }

    // h_r = sqrt(N / L_r) * sum_j gain_j * a_N(f_j), per user.
    let r_scale = (n as f64 / paths.l_r as f64).sqrt();
    let h_r: Vec<Vec<C64>> = (0..dims.k())
        .map(|_| {
            let freqs = draw_frequencies(n, paths.l_r, paths.on_grid, rng);
            let mut v = alloc::vec![C64::new(0.0, 0.0); n];
            for &f in &freqs {
                let gain = complex_gaussian(paths.gain_variance, rng) * r_scale;
                for (vi, si) in v.iter_mut().zip(steering(n, f)) {
                    *vi += gain * si;
                }
            }
            v
        })
        .collect();

    Ok(ChannelSet { dims, h_d, g, h_r })
}

/// Unit-norm ULA steering vector at normalized spatial frequency `f`:
/// entry `i` is `exp(-2 pi i * i * f) / sqrt(dim)`.
fn steering(dim: usize, f: f64) -> Vec<C64> {
    let scale = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|i| Complex::from_polar(scale, -2.0 * core::f64::consts::PI * (i as f64) * f))
        .collect()
}

/// On-grid: distinct grid indices `i / dim`; off-grid: uniform on [0, 1).
fn draw_frequencies<R: Rng + ?Sized>(
    dim: usize,
    count: usize,
    on_grid: bool,
    rng: &mut R,
) -> Vec<f64> {
    if on_grid {
        // Partial Fisher-Yates over the grid indices.
        let mut idx: Vec<usize> = (0..dim).collect();
        for i in 0..count {
            let j = i + rng.random_range(0..(dim - i));
            idx.swap(i, j);
        }
        idx[..count].iter().map(|&i| i as f64 / dim as f64).collect()
    } else {
        (0..count).map(|_| rng.random::<f64>()).collect()
    }
}

/// Sub-surface grouping: `B` adjacent RIS elements share one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupingConfig {
    b: usize,
}

impl GroupingConfig {
    pub fn new(b: usize, n: usize) -> Result<Self, Error> {
        if b == 0 || n % b != 0 {
            return Err(Error::InvalidConfig(format!(
                "group size B={b} must divide N={n}"
            )));
        }
        Ok(GroupingConfig { b })
    }

    pub fn group_size(&self) -> usize {
        self.b
    }
}

/// Collapses the cascaded channel onto sub-surfaces: reduced column `j` is
/// the sum of the `B` consecutive columns in group `j`, so that
/// `H theta = H_reduced theta_bar` whenever `theta` is constant within each
/// group with per-group value `theta_bar[j]`.
pub fn group_reduce(h: &CascadedChannel, cfg: GroupingConfig) -> Result<CMat, Error> {
    let (m, n) = h.matrix().shape();
    if n % cfg.group_size() != 0 {
        return Err(Error::InvalidConfig(format!(
            "group size B={} must divide N={n}",
            cfg.group_size()
        )));
    }
    let groups = n / cfg.group_size();
    let mut out = CMat::zeros(m, groups);
    for j in 0..groups {
        for b in 0..cfg.group_size() {
            let src = j * cfg.group_size() + b;
            for r in 0..m {
                out[(r, j)] += h.matrix()[(r, src)];
            }
        }
    }
    Ok(out)
}

/// Expands a reduced reflecting vector to the physical array by repeating
/// each per-group value across its `B` elements.
pub fn expand_grouped_theta(theta_bar: &[C64], b: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(theta_bar.len() * b);
    for &v in theta_bar {
        for _ in 0..b {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::{to_angular, AngularDictionary};
    use crate::linalg::vec_sub;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dims_reject_zero() {
        assert!(SystemDims::new(0, 4, 1).is_err());
        assert!(SystemDims::new(4, 0, 1).is_err());
        assert!(SystemDims::new(4, 4, 0).is_err());
        assert!(SystemDims::new(1, 1, 1).is_ok());
    }

    #[test]
    fn cascaded_diagonal_scaling() {
        // G = I2, h_r = [2, 3i] -> H = [[2, 0], [0, 3i]]
        let g = CMat::identity(2);
        let h = cascaded_channel(&g, &[c(2.0, 0.0), c(0.0, 3.0)]).unwrap();
        assert_eq!(h.matrix()[(0, 0)], c(2.0, 0.0));
        assert_eq!(h.matrix()[(1, 1)], c(0.0, 3.0));
        assert_eq!(h.matrix()[(0, 1)], c(0.0, 0.0));
        assert_eq!(h.matrix()[(1, 0)], c(0.0, 0.0));
    }

    #[test]
    fn cascaded_zero_h_r_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = CMat::from_fn(3, 4, |_, _| complex_gaussian(1.0, &mut rng));
        let h = cascaded_channel(&g, &[c(0.0, 0.0); 4]).unwrap();
        assert_eq!(h.matrix().max_abs(), 0.0);
    }

    #[test]
    fn cascaded_shape_mismatch_rejected() {
        let g = CMat::zeros(3, 4);
        assert!(cascaded_channel(&g, &[c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn reflected_signal_identity_random_instance() {
        // h_d + G diag(theta) h_r == h_d + H theta for 10 random theta.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dims = SystemDims::new(3, 4, 1).unwrap();
        let chan = gen_rayleigh(dims, &mut rng);
        let h = chan.cascaded(0);
        for _ in 0..10 {
            let theta: Vec<C64> = (0..4)
                .map(|_| crate::sampling::unit_phase(&mut rng))
                .collect();
            let via_g = chan.g().mul_diag(&theta).mul_vec(chan.h_r(0));
            let via_h = h.matrix().mul_vec(&theta);
            let dev = via_g
                .iter()
                .zip(&via_h)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dev <= 1e-12, "deviation {dev}");
        }
    }

    #[test]
    fn rayleigh_is_deterministic_given_seed() {
        let dims = SystemDims::new(4, 8, 2).unwrap();
        let a = gen_rayleigh(dims, &mut ChaCha8Rng::seed_from_u64(42));
        let b = gen_rayleigh(dims, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }

    #[test]
    fn rayleigh_shapes_match_dims() {
        let dims = SystemDims::new(4, 8, 2).unwrap();
        let chan = gen_rayleigh(dims, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(chan.h_d(0).len(), 4);
        assert_eq!(chan.h_d(1).len(), 4);
        assert_eq!(chan.g().shape(), (4, 8));
        assert_eq!(chan.h_r(0).len(), 8);
        assert_eq!(chan.h_r(1).len(), 8);
    }

    #[test]
    fn rayleigh_unit_variance_statistics() {
        // 10^5 G entries: empirical per-entry variance within 2% of 1.
        let dims = SystemDims::new(100, 1000, 1).unwrap();
        let chan = gen_rayleigh(dims, &mut ChaCha8Rng::seed_from_u64(4));
        let var = chan.g().fro_norm_sqr() / 1e5;
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn geometric_single_path_is_rank_one_sparse() {
        let dims = SystemDims::new(8, 16, 1).unwrap();
        let paths = GeometricPathConfig::new(1, 1, true, 1.0);
        let chan = gen_geometric(dims, paths, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let dict = AngularDictionary::dft(8, 16);
        let ht = to_angular(&chan.cascaded(0), &dict).unwrap();
        let nnz = ht.data().iter().filter(|z| z.norm() > 1e-9).count();
        assert_eq!(nnz, 1);
    }

    #[test]
    fn geometric_sparsity_bounded_by_path_product() {
        let dims = SystemDims::new(8, 16, 2).unwrap();
        let paths = GeometricPathConfig::new(2, 3, true, 1.0);
        let chan = gen_geometric(dims, paths, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        let dict = AngularDictionary::dft(8, 16);
        for k in 0..2 {
            let ht = to_angular(&chan.cascaded(k), &dict).unwrap();
            let nnz = ht.data().iter().filter(|z| z.norm() > 1e-9).count();
            assert!(nnz <= 6, "nnz {nnz}");
        }
    }

    #[test]
    fn geometric_rejects_zero_paths() {
        let dims = SystemDims::new(4, 8, 1).unwrap();
        let paths = GeometricPathConfig::new(1, 0, true, 1.0);
        assert!(gen_geometric(dims, paths, &mut ChaCha8Rng::seed_from_u64(7)).is_err());
    }

    #[test]
    fn geometric_rejects_capacity_overflow() {
        let dims = SystemDims::new(2, 8, 1).unwrap();
        let paths = GeometricPathConfig::new(3, 1, true, 1.0);
        assert!(gen_geometric(dims, paths, &mut ChaCha8Rng::seed_from_u64(8)).is_err());
    }

    #[test]
    fn geometric_power_matches_rayleigh_baseline() {
        // E||H||_F^2 should be close to M*N at gain_variance = 1.
        let dims = SystemDims::new(4, 8, 1).unwrap();
        let paths = GeometricPathConfig::new(2, 2, true, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials = 2000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let chan = gen_geometric(dims, paths, &mut rng).unwrap();
            acc += chan.cascaded(0).matrix().fro_norm_sqr();
        }
        let mean = acc / trials as f64;
        let expect = (dims.m() * dims.n()) as f64;
        assert!(
            (mean - expect).abs() < 0.15 * expect,
            "mean power {mean} vs {expect}"
        );
    }

    #[test]
    fn group_reduce_sums_adjacent_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = CMat::from_fn(3, 4, |_, _| complex_gaussian(1.0, &mut rng));
        let h = CascadedChannel::from_matrix(g.clone());
        let cfg = GroupingConfig::new(2, 4).unwrap();
        let red = group_reduce(&h, cfg).unwrap();
        for r in 0..3 {
            assert_eq!(red[(r, 0)], g[(r, 0)] + g[(r, 1)]);
            assert_eq!(red[(r, 1)], g[(r, 2)] + g[(r, 3)]);
        }
    }

    #[test]
    fn group_reduce_b1_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = CMat::from_fn(2, 4, |_, _| complex_gaussian(1.0, &mut rng));
        let h = CascadedChannel::from_matrix(g.clone());
        let red = group_reduce(&h, GroupingConfig::new(1, 4).unwrap()).unwrap();
        assert_eq!(red, g);
    }

    #[test]
    fn group_reduce_rejects_non_divisor() {
        assert!(GroupingConfig::new(3, 4).is_err());
    }

    #[test]
    fn grouped_theta_preserves_product() {
        // H theta == H_reduced theta_bar for group-constant theta.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = CMat::from_fn(3, 8, |_, _| complex_gaussian(1.0, &mut rng));
        let h = CascadedChannel::from_matrix(g);
        let cfg = GroupingConfig::new(4, 8).unwrap();
        let red = group_reduce(&h, cfg).unwrap();
        let theta_bar: Vec<C64> = (0..2)
            .map(|_| crate::sampling::unit_phase(&mut rng))
            .collect();
        let theta = expand_grouped_theta(&theta_bar, 4);
        let full = h.matrix().mul_vec(&theta);
        let reduced = red.mul_vec(&theta_bar);
        let dev = vec_sub(&full, &reduced)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-12);
    }
}
