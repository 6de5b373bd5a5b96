//! Chain parameters, the momentum grid and the Bogoliubov modes that
//! diagonalize the fermionic form of the XY Hamiltonian
//!
//! ```text
//! H = -sum_i { J/2 [ (c_i^+ c_{i+1} - c_i c_{i+1}^+) + gamma (c_i^+ c_{i+1}^+ - c_i c_{i+1}) ]
//!              + h (c_i^+ c_i - 1/2) }
//! ```
//!
//! with c_{N+1} = c_1. The diagonal form is `sum_k lambda_k (eta_k^+ eta_k - 1/2)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A validated periodic XY chain. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    n_sites: usize,
    coupling: f64,
    anisotropy: f64,
    field: f64,
    modes: Vec<BogoliubovMode>,
}

/// One quasiparticle mode: wave number, energy and Bogoliubov amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMode {
    pub m: i64,
    pub k: f64,
    pub sin_k: f64,
    pub cos_k: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl BogoliubovMode {
    /// `lambda == 0`: the amplitudes are pinned to (1, 0).
    pub fn is_degenerate(&self) -> bool {
        self.lambda == 0.0
    }
}

/// Wave numbers `k_m = 2 pi m / N`, `-N/2 < m <= N/2`, ascending in `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    ms: Vec<i64>,
    ks: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites < 3 {
            return Err(Error::TooFewSites(n_sites));
        }
        let n = n_sites as i64;
        let ms: Vec<i64> = (-((n - 1) / 2)..=n / 2).collect();
        let ks = ms.iter().map(|&m| wave_number(m, n)).collect();
        Ok(Self { ms, ks })
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    pub fn indices(&self) -> &[i64] {
        &self.ms
    }

    pub fn wave_numbers(&self) -> &[f64] {
        &self.ks
    }
}

fn wave_number(m: i64, n: i64) -> f64 {
    if 2 * m == n {
        PI
    } else {
        2.0 * PI * m as f64 / n as f64
    }
}

/// (sin k, cos k) with the zeros at k = 0 and k = +-pi made exact.
fn exact_trig(k: f64) -> (f64, f64) {
    if k == 0.0 {
        (0.0, 1.0)
    } else if k.abs() == PI {
        (0.0, -1.0)
    } else {
        k.sin_cos()
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { name, value })
    }
}

impl ChainSpec {
    /// Builds the chain from the canonical parameters `(J, gamma, h)`.
    pub fn new(n_sites: usize, coupling: f64, anisotropy: f64, field: f64) -> Result<Self> {
        check_finite("J", coupling)?;
        check_finite("gamma", anisotropy)?;
        check_finite("h", field)?;
        let grid = MomentumGrid::new(n_sites)?;
        let mut spec = Self {
            n_sites,
            coupling,
            anisotropy,
            field,
            modes: Vec::with_capacity(n_sites),
        };
        spec.modes = grid
            .indices()
            .iter()
            .zip(grid.wave_numbers())
            .map(|(&m, &k)| {
                let (sin_k, cos_k) = exact_trig(k);
                let lambda = spec.dispersion_trig(sin_k, cos_k);
                let (alpha, beta) = spec.amplitudes(sin_k, cos_k, lambda);
                BogoliubovMode {
                    m,
                    k,
                    sin_k,
                    cos_k,
                    lambda,
                    alpha,
                    beta,
                }
            })
            .collect();
        Ok(spec)
    }

    /// Builds the chain from the exchange constants `J^x`, `J^y`:
    /// `J = (J^x + J^y)/2`, `gamma = (J^x - J^y)/(J^x + J^y)`.
    pub fn from_exchange(n_sites: usize, jx: f64, jy: f64, field: f64) -> Result<Self> {
        check_finite("J^x", jx)?;
        check_finite("J^y", jy)?;
        let sum = jx + jy;
        if sum == 0.0 {
            return Err(Error::DegenerateCouplings);
        }
        Self::new(n_sites, 0.5 * sum, (jx - jy) / sum, field)
    }

    /// Same chain with a different anisotropy.
    pub fn with_anisotropy(&self, anisotropy: f64) -> Result<Self> {
        Self::new(self.n_sites, self.coupling, anisotropy, self.field)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn anisotropy(&self) -> f64 {
        self.anisotropy
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    /// `(J^x, J^y) = (J (1 + gamma), J (1 - gamma))`.
    pub fn exchange(&self) -> (f64, f64) {
        (
            self.coupling * (1.0 + self.anisotropy),
            self.coupling * (1.0 - self.anisotropy),
        )
    }

    pub fn modes(&self) -> &[BogoliubovMode] {
        &self.modes
    }

    pub fn momentum_grid(&self) -> MomentumGrid {
        MomentumGrid::new(self.n_sites).expect("validated at construction")
    }

    /// `lambda_k = sqrt((h + J cos k)^2 + J^2 gamma^2 sin^2 k)`.
    pub fn dispersion(&self, k: f64) -> f64 {
        let (s, c) = exact_trig(k);
        self.dispersion_trig(s, c)
    }

    fn dispersion_trig(&self, sin_k: f64, cos_k: f64) -> f64 {
        let diag = self.field + self.coupling * cos_k;
        let pair = self.coupling * self.anisotropy * sin_k;
        diag.hypot(pair)
    }

    /// `(alpha_k, beta_k)` with `sign(0) = +1` for `beta_k` and `(1, 0)` when
    /// `lambda_k = 0`.
    pub fn bogoliubov_coefficients(&self, k: f64) -> (f64, f64) {
        let (s, c) = exact_trig(k);
        self.amplitudes(s, c, self.dispersion_trig(s, c))
    }

    fn amplitudes(&self, sin_k: f64, cos_k: f64, lambda: f64) -> (f64, f64) {
        if lambda == 0.0 {
            return (1.0, 0.0);
        }
        let diag = self.field + self.coupling * cos_k;
        let pair = self.coupling * self.anisotropy * sin_k;
        let ratio = (diag / lambda).clamp(-1.0, 1.0);
        let sign = if pair >= 0.0 { 1.0 } else { -1.0 };
        // alpha * |beta| = |pair| / (2 lambda); take the root without cancellation
        // and recover the other amplitude from the product.
        let half_sin = pair.abs() / (2.0 * lambda);
        let (alpha, beta_abs) = if ratio >= 0.0 {
            let b = ((1.0 + ratio) / 2.0).sqrt();
            (half_sin / b, b)
        } else {
            let a = ((1.0 - ratio) / 2.0).sqrt();
            (a, half_sin / a)
        };
        (alpha, sign * beta_abs)
    }

    /// All `2^N` eigenvalues `sum_k lambda_k (n_k - 1/2)`, sorted ascending.
    pub fn many_body_spectrum(&self) -> Vec<f64> {
        let n = self.n_sites;
        let offset: f64 = -0.5 * self.modes.iter().map(|m| m.lambda).sum::<f64>();
        let mut levels: Vec<f64> = (0..1usize << n)
            .map(|occ| {
                offset
                    + self
                        .modes
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| occ >> i & 1 == 1)
                        .map(|(_, m)| m.lambda)
                        .sum::<f64>()
            })
            .collect();
        levels.sort_by(f64::total_cmp);
        levels
    }
}
