//! Receiver-site reduced state, transmission fidelity, one-tangle and entropy.

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::wick::InputState;

/// Float noise tolerated below zero before clamping.
pub const CLAMP_TOL: f64 = 1e-10;

/// Spin expectation values `(<S^x>, <S^y>, <S^z>)` of one site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl BlochVector {
    pub fn new(sx: f64, sy: f64, sz: f64) -> Self {
        Self { sx, sy, sz }
    }

    pub fn norm_sq(&self) -> f64 {
        self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest componentwise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.sx - other.sx)
            .abs()
            .max((self.sy - other.sy).abs())
            .max((self.sz - other.sz).abs())
    }
}

/// 2x2 one-site density matrix in the (up, down) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix(pub Matrix2<Complex64>);

impl ReducedDensityMatrix {
    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.determinant()
    }

    /// Eigenvalues from a Hermitian eigendecomposition, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let eig = SymmetricEigen::new(self.0);
        let (a, b) = (eig.eigenvalues[0], eig.eigenvalues[1]);
        if a <= b {
            [a, b]
        } else {
            [b, a]
        }
    }

    /// `-tr(rho log2 rho)` from the eigenvalues.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }
}

/// ```text
/// rho = [ 1/2 + <S^z>         <S^x> - i<S^y> ]
///       [ <S^x> + i<S^y>      1/2 - <S^z>    ]
/// ```
pub fn reduced_density(b: &BlochVector) -> Result<ReducedDensityMatrix> {
    let len = b.norm();
    if !len.is_finite() || len > 0.5 + 1e-8 {
        return Err(Error::BlochTooLong(len));
    }
    let off = Complex64::new(b.sx, -b.sy);
    Ok(ReducedDensityMatrix(Matrix2::new(
        Complex64::new(0.5 + b.sz, 0.0),
        off,
        off.conj(),
        Complex64::new(0.5 - b.sz, 0.0),
    )))
}

fn clamp_unit(quantity: &'static str, value: f64) -> Result<f64> {
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&value) {
        return Err(Error::OutOfRange { quantity, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `F = sqrt(1/2 + (beta^2 - alpha^2) <S^z> + 2 alpha beta <S^x>)`.
pub fn fidelity(input: InputState, b: &BlochVector) -> Result<f64> {
    let (a, be) = (input.alpha(), input.beta());
    let radicand = 0.5 + (be * be - a * a) * b.sz + 2.0 * a * be * b.sx;
    Ok(clamp_unit("fidelity radicand", radicand)?.sqrt())
}

/// `tau = 4 det(rho) = 1 - 4 |b|^2`.
pub fn one_tangle(b: &BlochVector) -> Result<f64> {
    clamp_unit("one-tangle", 1.0 - 4.0 * b.norm_sq())
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Von Neumann entropy of the site, `h((1 + sqrt(1 - tau)) / 2)`.
pub fn entanglement_entropy(tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::OutOfRange {
            quantity: "one-tangle",
            value: tau,
        });
    }
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - tau).sqrt())))
}

/// Fidelity for `alpha = beta = 1/sqrt(2)` on the isotropic chain,
/// `sqrt(1/2 + (1/2N) sum_k cos[k(r-1) - eps_k t])` with
/// `eps_k = h + J cos k` the single-particle energy.
///
/// `eps_k` equals `lambda_k` whenever every mode has `h + J cos k >= 0`;
/// using the signed energy keeps the identity exact for the other modes too.
pub fn isotropic_fidelity(spec: &ChainSpec, t: f64, r: usize) -> Result<f64> {
    if spec.anisotropy() != 0.0 {
        return Err(Error::NotIsotropic(spec.anisotropy()));
    }
    let n = spec.n_sites();
    if r == 0 || r > n {
        return Err(Error::SiteOutOfRange {
            site: r,
            n_sites: n,
        });
    }
    let d = (r - 1) as f64;
    let sum: f64 = spec
        .modes()
        .iter()
        .map(|m| {
            let eps = spec.field() + spec.coupling() * m.cos_k;
            (m.k * d - eps * t).cos()
        })
        .sum();
    let radicand = 0.5 + 0.5 * sum / n as f64;
    Ok(clamp_unit("fidelity radicand", radicand)?.sqrt())
}
