//! Heisenberg-picture evolution of the lattice fermions,
//! `c_j(t) = sum_l [ a~_lj(t) c_l + b~_lj(t) c_l^+ ]`, and the two-operator
//! vacuum contractions of `A_l = c_l^+ + c_l`, `B_l = c_l^+ - c_l` at time t.
//!
//! Everything here is a direct O(N) momentum sum per matrix entry.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::chain::ChainSpec;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `e^{i k d}` for `k = 2 pi m / N`, with the angle reduced modulo `2 pi`
/// before evaluation.
fn lattice_phase(m: i64, d: i64, n: usize) -> Complex64 {
    let n = n as i64;
    let r = (m * d).rem_euclid(n);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r == n {
        return Complex64::new(-1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// Coefficient matrices of the evolved annihilation operators.
/// Column `j` describes `c_{j+1}(t)`; row `l` the weight on `c_{l+1}` / `c_{l+1}^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorPair {
    pub a_tilde: DMatrix<Complex64>,
    pub b_tilde: DMatrix<Complex64>,
    pub time: f64,
}

impl PropagatorPair {
    /// ```text
    /// a~_lj(t) = (1/N) sum_k e^{ik(l-j)} [ e^{i lambda_k t} - 2i alpha_k^2 sin lambda_k t ]
    /// b~_lj(t) = (2/N) sum_k e^{ik(l-j)} alpha_k beta_k sin lambda_k t
    /// ```
    pub fn new(spec: &ChainSpec, t: f64) -> Self {
        let n = spec.n_sites();
        let inv_n = 1.0 / n as f64;
        // Both matrices are circulant: evaluate once per distance l - j.
        let mut a_row = vec![Complex64::new(0.0, 0.0); n];
        let mut b_row = vec![Complex64::new(0.0, 0.0); n];
        for mode in spec.modes() {
            let (s, c) = (mode.lambda * t).sin_cos();
            let a_weight = Complex64::new(c, s) - 2.0 * I * mode.alpha.powi(2) * s;
            let b_weight = 2.0 * mode.alpha * mode.beta * s;
            for (d, (a, b)) in a_row.iter_mut().zip(b_row.iter_mut()).enumerate() {
                let ph = lattice_phase(mode.m, d as i64, n);
                *a += ph * a_weight;
                *b += ph * b_weight;
            }
        }
        let a_tilde = DMatrix::from_fn(n, n, |l, j| a_row[(l + n - j) % n] * inv_n);
        let b_tilde = DMatrix::from_fn(n, n, |l, j| b_row[(l + n - j) % n] * inv_n);
        Self {
            a_tilde,
            b_tilde,
            time: t,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.a_tilde.nrows()
    }

    /// `sum_l |a~_lj|^2 + |b~_lj|^2` for every column `j`.
    pub fn column_weights(&self) -> Vec<f64> {
        (0..self.n_sites())
            .map(|j| {
                self.a_tilde
                    .column(j)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    + self
                        .b_tilde
                        .column(j)
                        .iter()
                        .map(|z| z.norm_sqr())
                        .sum::<f64>()
            })
            .collect()
    }

    /// `<0|A_j(t) c_1^+ + c_1 A_j(t)|0> = 2 Re(a~_1j + b~_1j)`, assembled
    /// from the propagator instead of the closed-form sums.
    pub fn sender_a_anticommutator(&self) -> DVector<Complex64> {
        DVector::from_fn(self.n_sites(), |j, _| {
            Complex64::new(2.0 * (self.a_tilde[(0, j)] + self.b_tilde[(0, j)]).re, 0.0)
        })
    }

    /// `<0|B_j(t) c_1^+ + c_1 B_j(t)|0> = -2i Im(a~_1j + b~_1j)`.
    pub fn sender_b_anticommutator(&self) -> DVector<Complex64> {
        DVector::from_fn(self.n_sites(), |j, _| {
            Complex64::new(0.0, -2.0 * (self.a_tilde[(0, j)] + self.b_tilde[(0, j)]).im)
        })
    }
}

/// All vacuum contractions at time t needed by the Wick engine.
///
/// `ab[(j, m)] = <0|A_j(t) B_m(t)|0>`, and likewise for `aa`, `bb`.
/// `a_c1[j] = <0|A_j(t) c_1^+ + c_1 A_j(t)|0>`, `b_c1` the same with `B_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionTable {
    pub ab: DMatrix<Complex64>,
    pub aa: DMatrix<Complex64>,
    pub bb: DMatrix<Complex64>,
    pub a_c1: DVector<Complex64>,
    pub b_c1: DVector<Complex64>,
    pub time: f64,
}

impl ContractionTable {
    pub fn new(spec: &ChainSpec, t: f64) -> Self {
        let n = spec.n_sites();
        let inv_n = 1.0 / n as f64;

        // Per-distance momentum sums for d = j - m (mod N).
        let zero = Complex64::new(0.0, 0.0);
        let mut ab_d = vec![zero; n];
        let mut aa_d = vec![zero; n];
        let mut bb_d = vec![zero; n];
        // Sender column uses d = 1 - j, i.e. -(j - 1) in 0-based terms.
        let mut ac_d = vec![zero; n];
        let mut bc_d = vec![zero; n];

        for mode in spec.modes() {
            let (a, b) = (mode.alpha, mode.beta);
            let ab2 = a * a * b * b;
            let mixed_b = a * b * (1.0 - 2.0 * b * b);
            let mixed_a = a * b * (1.0 - 2.0 * a * a);
            let (s1, c1) = (mode.lambda * t).sin_cos();
            let sin_sq = s1 * s1;
            let sin_2 = (2.0 * mode.lambda * t).sin();
            for d in 0..n {
                let ph = lattice_phase(mode.m, d as i64, n);
                let (cd, sd) = (ph.re, ph.im);
                ab_d[d] += Complex64::new(
                    -4.0 * (2.0 * ab2 * cd + mixed_b * sd) * sin_sq + 2.0 * a * b * cd * sin_2,
                    0.0,
                );
                aa_d[d] += -4.0 * I * (mixed_a * cd - 2.0 * ab2 * sd) * sin_sq
                    + 2.0 * I * a * b * sd * sin_2;
                bb_d[d] += -4.0 * I * (mixed_a * cd + 2.0 * ab2 * sd) * sin_sq
                    + 2.0 * I * a * b * sd * sin_2;

                // distance 1 - j for 0-based column index d = j - 1
                let phs = lattice_phase(mode.m, -(d as i64), n);
                let (cs, ss) = (phs.re, phs.im);
                ac_d[d] += Complex64::new(
                    2.0 * (cs * c1 - (1.0 - 2.0 * a * a) * ss * s1 + 2.0 * a * b * cs * s1),
                    0.0,
                );
                bc_d[d] +=
                    -2.0 * I * ((1.0 - 2.0 * a * a) * cs * s1 + ss * c1 + 2.0 * a * b * ss * s1);
            }
        }

        let delta = |j: usize, m: usize| if j == m { 1.0 } else { 0.0 };
        let idx = |j: usize, m: usize| (j + n - m) % n;
        Self {
            ab: DMatrix::from_fn(n, n, |j, m| ab_d[idx(j, m)] * inv_n + delta(j, m)),
            aa: DMatrix::from_fn(n, n, |j, m| aa_d[idx(j, m)] * inv_n + delta(j, m)),
            bb: DMatrix::from_fn(n, n, |j, m| bb_d[idx(j, m)] * inv_n - delta(j, m)),
            a_c1: DVector::from_fn(n, |j, _| ac_d[j] * inv_n),
            b_c1: DVector::from_fn(n, |j, _| bc_d[j] * inv_n),
            time: t,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.ab.nrows()
    }
}
