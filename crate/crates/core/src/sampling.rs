//! Complex Gaussian and unit-modulus draws shared by the channel generators
//! and the pilot simulators.
//!
//! Draw order is part of the determinism contract: matrices fill column by
//! column, complex scalars draw real part before imaginary part.

use core::f64::consts::PI;

use num_complex::Complex;
#[allow(unused_imports)] // inherent std float methods shadow this in test builds
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{C64, CMat};

/// One CN(0, sigma2) sample.
pub fn complex_gaussian<R: Rng + ?Sized>(sigma2: f64, rng: &mut R) -> C64 {
    let s = (sigma2 / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * s, im * s)
}

/// Vector of i.i.d. CN(0, sigma2) samples.
pub fn complex_gaussian_vec<R: Rng + ?Sized>(
    len: usize,
    sigma2: f64,
    rng: &mut R,
) -> alloc::vec::Vec<C64> {
    (0..len).map(|_| complex_gaussian(sigma2, rng)).collect()
}

/// Matrix of i.i.d. CN(0, sigma2) samples, drawn column by column.
///
/// This is the noise block added by the simulators, exposed so that the
/// additive-noise identity `noisy(seed) == noiseless + awgn_matrix(seed)` can
/// be checked directly.
pub fn awgn_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, sigma2: f64, rng: &mut R) -> CMat {
    let mut out = CMat::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            out[(r, c)] = complex_gaussian(sigma2, rng);
        }
    }
    out
}

/// Unit-modulus sample with phase uniform on [0, 2*pi).
pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let phi: f64 = 2.0 * PI * rng.random::<f64>();
    Complex::from_polar(1.0, phi)
}
