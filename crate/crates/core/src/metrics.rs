//! Estimation-accuracy metrics.

use crate::error::Error;
use crate::linalg::{dot_conj, C64, CMat};

/// Optional alignment applied to the estimate before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alignment {
    /// Compare as-is.
    None,
    /// Flip the sign of each estimate column to best match the reference;
    /// used for quantities identified only up to per-column signs (the
    /// dual-link estimate of `G`).
    ColumnSign,
}

/// Normalized mean squared error
/// `||truth - est||_F^2 / ||truth||_F^2`.
pub fn nmse(truth: &CMat, est: &CMat, align: Alignment) -> Result<f64, Error> {
    if truth.shape() != est.shape() {
        return Err(Error::ShapeMismatch { context: "nmse" });
    }
    let denom = truth.fro_norm_sqr();
    if denom <= 0.0 {
        return Err(Error::UndefinedMetric("NMSE of a zero reference channel"));
    }
    let num = match align {
        Alignment::None => truth.sub(est).fro_norm_sqr(),
        Alignment::ColumnSign => {
            let mut acc = 0.0;
            for c in 0..truth.cols() {
                let t = truth.col(c);
                let e = est.col(c);
                // Pick s in {+1, -1} minimizing ||t - s e||^2.
                let cross = dot_conj(&t, &e).re;
                let sign = if cross >= 0.0 { 1.0 } else { -1.0 };
                acc += t
                    .iter()
                    .zip(&e)
                    .map(|(a, b)| (a - b * sign).norm_sqr())
                    .sum::<f64>();
            }
            acc
        }
    };
    Ok(num / denom)
}

/// NMSE for vector-valued channels (no alignment variants apply).
pub fn nmse_vec(truth: &[C64], est: &[C64]) -> Result<f64, Error> {
    if truth.len() != est.len() {
        return Err(Error::ShapeMismatch { context: "nmse_vec" });
    }
    let denom: f64 = truth.iter().map(|z| z.norm_sqr()).sum();
    if denom <= 0.0 {
        return Err(Error::UndefinedMetric("NMSE of a zero reference channel"));
    }
    let num: f64 = truth
        .iter()
        .zip(est)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(num / denom)
}

/// Power of the effective reflecting link, `||H theta||^2` — the quantity
/// reflect-beamforming designs optimize.
pub fn effective_power(h: &CMat, theta: &[C64]) -> Result<f64, Error> {
    if h.cols() != theta.len() {
        return Err(Error::ShapeMismatch {
            context: "effective_power",
        });
    }
    Ok(h.mul_vec(theta).iter().map(|z| z.norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{cascaded_channel, gen_rayleigh, SystemDims};
    use crate::sampling::unit_phase;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn nmse_zero_for_exact_estimate() {
        let h = CMat::identity(3);
        assert_eq!(nmse(&h, &h, Alignment::None).unwrap(), 0.0);
    }

    #[test]
    fn nmse_one_for_zero_estimate() {
        let h = CMat::identity(3);
        let z = CMat::zeros(3, 3);
        assert!((nmse(&h, &z, Alignment::None).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nmse_hand_value() {
        // truth [1, 0], est [0, 1] -> (1 + 1) / 1 = 2.
        let t = CMat::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)]]);
        let e = CMat::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!((nmse(&t, &e, Alignment::None).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nmse_rejects_zero_reference() {
        let z = CMat::zeros(2, 2);
        assert!(matches!(
            nmse(&z, &z, Alignment::None),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn column_sign_alignment_forgives_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let h = CMat::from_fn(3, 4, |_, _| crate::sampling::complex_gaussian(1.0, &mut rng));
        let mut flipped = h.clone();
        for r in 0..3 {
            flipped[(r, 1)] = -flipped[(r, 1)];
            flipped[(r, 2)] = -flipped[(r, 2)];
        }
        assert!(nmse(&h, &flipped, Alignment::None).unwrap() > 0.5);
        assert!(nmse(&h, &flipped, Alignment::ColumnSign).unwrap() <= 1e-30);
    }

    #[test]
    fn effective_power_identity() {
        let h = CMat::identity(2);
        let p = effective_power(&h, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((p - 2.0).abs() < 1e-15);
        assert_eq!(effective_power(&h, &[c(0.0, 0.0); 2]).unwrap(), 0.0);
    }

    #[test]
    fn effective_power_matches_component_form() {
        // ||H theta||^2 == ||G diag(h_r) theta||^2.
        let dims = SystemDims::new(3, 5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let chan = gen_rayleigh(dims, &mut rng);
        let theta: alloc::vec::Vec<C64> = (0..5).map(|_| unit_phase(&mut rng)).collect();
        let h = cascaded_channel(chan.g(), chan.h_r(0)).unwrap();
        let via_h = effective_power(h.matrix(), &theta).unwrap();
        let via_g: f64 = chan
            .g()
            .mul_diag(chan.h_r(0))
            .mul_vec(&theta)
            .iter()
            .map(|z| z.norm_sqr())
            .sum();
        assert!((via_h - via_g).abs() <= 1e-12 * via_g.max(1.0));
    }
}
