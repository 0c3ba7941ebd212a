//! Virtual angular-domain representation of the cascaded channel.
//!
//! With unitary dictionaries `U_M` (BS side) and `U_N` (RIS side), the
//! cascaded channel decomposes as `H = U_M H_tilde U_N^T`; multipath
//! channels with few scatterers are sparse in `H_tilde`, which is what the
//! OMP estimator exploits. Both arrays are treated as uniform linear arrays,
//! so the dictionaries are the unitary DFT matrices.

use alloc::vec::Vec;

use num_complex::Complex;
#[allow(unused_imports)] // inherent std float methods shadow this in test builds
use num_traits::Float;

use crate::channel::CascadedChannel;
use crate::error::Error;
use crate::linalg::{unitarity_deviation, CMat};

/// Unitary DFT matrix: entry `(a, b) = exp(-2 pi i a b / n) / sqrt(n)`.
pub fn dft_dictionary(n: usize) -> CMat {
    assert!(n >= 1, "dictionary size");
    let scale = 1.0 / (n as f64).sqrt();
    CMat::from_fn(n, n, |a, b| {
        // Reduce the product modulo n so large indices keep exact phases.
        let t = (a * b) % n;
        Complex::from_polar(scale, -2.0 * core::f64::consts::PI * t as f64 / n as f64)
    })
}

/// Dictionary pair for the BS- and RIS-side transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularDictionary {
    u_m: CMat,
    u_n: CMat,
}

impl AngularDictionary {
    /// Builds from explicit unitary matrices; deviation from unitarity above
    /// 1e-12 is rejected.
    pub fn new(u_m: CMat, u_n: CMat) -> Result<Self, Error> {
        if u_m.rows() != u_m.cols() || u_n.rows() != u_n.cols() {
            return Err(Error::ShapeMismatch {
                context: "AngularDictionary",
            });
        }
        if unitarity_deviation(&u_m) > 1e-12 || unitarity_deviation(&u_n) > 1e-12 {
            return Err(Error::InvalidConfig(
                "dictionary matrices must be unitary".into(),
            ));
        }
        Ok(AngularDictionary { u_m, u_n })
    }

    /// The standard ULA choice: DFT dictionaries of size `m` and `n`.
    pub fn dft(m: usize, n: usize) -> Self {
        AngularDictionary {
            u_m: dft_dictionary(m),
            u_n: dft_dictionary(n),
        }
    }

    pub fn u_m(&self) -> &CMat {
        &self.u_m
    }

    pub fn u_n(&self) -> &CMat {
        &self.u_n
    }

    pub fn bs_size(&self) -> usize {
        self.u_m.rows()
    }

    pub fn ris_size(&self) -> usize {
        self.u_n.rows()
    }
}

/// Angular-domain image `H_tilde = U_M^H H conj(U_N)`.
pub fn to_angular(h: &CascadedChannel, dict: &AngularDictionary) -> Result<CMat, Error> {
    let (m, n) = h.matrix().shape();
    if m != dict.bs_size() || n != dict.ris_size() {
        return Err(Error::ShapeMismatch {
            context: "to_angular",
        });
    }
    Ok(dict.u_m.adjoint().mul(h.matrix()).mul(&dict.u_n.conj()))
}

/// Inverse transform `H = U_M H_tilde U_N^T`.
pub fn from_angular(h_tilde: &CMat, dict: &AngularDictionary) -> Result<CascadedChannel, Error> {
    let (m, n) = h_tilde.shape();
    if m != dict.bs_size() || n != dict.ris_size() {
        return Err(Error::ShapeMismatch {
            context: "from_angular",
        });
    }
    Ok(CascadedChannel::from_matrix(
        dict.u_m.mul(h_tilde).mul(&dict.u_n.transpose()),
    ))
}

/// Entries with magnitude above `tol` (the crate-wide sparsity floor is
/// 1e-9, safely above double-precision noise at these scales).
pub fn nnz_above(h: &CMat, tol: f64) -> usize {
    h.data().iter().filter(|z| z.norm() > tol).count()
}

/// Positions (row, col) of entries with magnitude above `tol`.
pub fn support_above(h: &CMat, tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..h.rows() {
        for c in 0..h.cols() {
            if h[(r, c)].norm() > tol {
                out.push((r, c));
            }
        }
    }
    out
}
