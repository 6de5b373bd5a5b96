//! Brute-force exact diagonalization in the full `2^N` Fock space.
//!
//! Basis index bit `i` is the occupation of site `i + 1` (spin up = occupied,
//! so the fermionic vacuum is the all-down state). `c_i` carries the parity
//! string of the sites below `i`, matching the Jordan-Wigner ordering used by
//! the free-fermion solution. Both Hamiltonians are real symmetric in this
//! basis, so they are stored as real matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::dynamics::{ContractionTable, PropagatorPair};
use crate::error::{Error, Result};
use crate::observables::{self, BlochVector};
use crate::wick::InputState;

/// Largest chain the dense construction accepts.
pub const MAX_ED_SITES: usize = 14;

fn guard(n_sites: usize) -> Result<()> {
    if n_sites > MAX_ED_SITES {
        Err(Error::TooManySites {
            got: n_sites,
            max: MAX_ED_SITES,
        })
    } else {
        Ok(())
    }
}

/// Sign picked up by a fermion operator at `site` (0-based) acting on `state`.
fn parity_below(state: usize, site: usize) -> f64 {
    if (state & ((1 << site) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `c_site` or `c_site^+` on a basis state; `None` if it annihilates it.
fn apply(dagger: bool, site: usize, state: usize) -> Option<(f64, usize)> {
    let occupied = state >> site & 1 == 1;
    if occupied == dagger {
        return None;
    }
    Some((parity_below(state, site), state ^ (1 << site)))
}

/// Product of fermion operators applied right to left.
fn apply_string(ops: &[(bool, usize)], state: usize) -> Option<(f64, usize)> {
    ops.iter()
        .rev()
        .try_fold((1.0, state), |(sign, s), &(dagger, site)| {
            apply(dagger, site, s).map(|(sg, ns)| (sign * sg, ns))
        })
}

/// Dense matrix of `c_site` (0-based site).
pub fn annihilation(n_sites: usize, site: usize) -> DMatrix<f64> {
    let dim = 1 << n_sites;
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        if let Some((sign, t)) = apply(false, site, s) {
            m[(t, s)] = sign;
        }
    }
    m
}

/// A dense operator on the `2^N` space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub n_sites: usize,
    pub matrix: DMatrix<f64>,
}

impl FockOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.transpose()).amax() <= tol
    }

    /// Full eigendecomposition; the result evolves states at any t.
    pub fn diagonalize(&self) -> Spectrum {
        let eig = SymmetricEigen::new(self.matrix.clone());
        Spectrum {
            n_sites: self.n_sites,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    /// Diagonal operator `sum_i n_i`.
    pub fn total_occupation(n_sites: usize) -> Self {
        let dim = 1 << n_sites;
        Self {
            n_sites,
            matrix: DMatrix::from_fn(
                dim,
                dim,
                |i, j| {
                    if i == j {
                        i.count_ones() as f64
                    } else {
                        0.0
                    }
                },
            ),
        }
    }
}

/// The fermionic Hamiltonian with `c_{N+1} = c_1`, including the constant
/// `+h N / 2` from the `-h (n_i - 1/2)` terms.
pub fn build_fermion_hamiltonian(spec: &ChainSpec) -> Result<FockOperator> {
    let n = spec.n_sites();
    guard(n)?;
    let (j, g, h) = (spec.coupling(), spec.anisotropy(), spec.field());
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    // (coefficient, operator string) with H = sum coefficient * string
    let mut terms: Vec<(f64, [(bool, usize); 2])> = Vec::with_capacity(4 * n);
    for i in 0..n {
        let k = (i + 1) % n;
        terms.push((-0.5 * j, [(true, i), (false, k)]));
        terms.push((0.5 * j, [(false, i), (true, k)]));
        terms.push((-0.5 * j * g, [(true, i), (true, k)]));
        terms.push((0.5 * j * g, [(false, i), (false, k)]));
    }
    for s in 0..dim {
        let occupied = s.count_ones() as f64;
        m[(s, s)] += -h * (occupied - 0.5 * n as f64);
        for (coef, ops) in &terms {
            if let Some((sign, t)) = apply_string(ops, s) {
                m[(t, s)] += coef * sign;
            }
        }
    }
    Ok(FockOperator {
        n_sites: n,
        matrix: m,
    })
}

/// The periodic spin Hamiltonian
/// `-sum_i (J^x S^x_i S^x_{i+1} + J^y S^y_i S^y_{i+1}) - h sum_i S^z_i`.
pub fn build_spin_hamiltonian(spec: &ChainSpec) -> Result<FockOperator> {
    let n = spec.n_sites();
    guard(n)?;
    let (jx, jy) = spec.exchange();
    let h = spec.field();
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        m[(s, s)] += -h * (s.count_ones() as f64 - 0.5 * n as f64);
        for i in 0..n {
            let k = (i + 1) % n;
            let (bi, bk) = (s >> i & 1, s >> k & 1);
            let flipped = s ^ (1 << i) ^ (1 << k);
            // S^x S^x + S^y S^y flips both spins: (J^x - J^y)/4 on S+S+ and
            // S-S-, (J^x + J^y)/4 on S+S- and S-S+.
            let amp = if bi == bk { jx - jy } else { jx + jy };
            m[(flipped, s)] += -0.25 * amp;
        }
    }
    Ok(FockOperator {
        n_sites: n,
        matrix: m,
    })
}

/// Normalized state on the `2^N` space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n_sites: usize,
    pub amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// `(alpha + beta c_1^+)|0>`.
    pub fn encoded(n_sites: usize, input: InputState) -> Self {
        let mut amplitudes = DVector::zeros(1 << n_sites);
        amplitudes[0] = Complex64::new(input.alpha(), 0.0);
        amplitudes[1] = Complex64::new(input.beta(), 0.0);
        Self {
            n_sites,
            amplitudes,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<psi|O|psi>` for a real operator.
    pub fn expectation(&self, op: &FockOperator) -> f64 {
        let v = op.matrix.map(|x| Complex64::new(x, 0.0)) * &self.amplitudes;
        self.amplitudes.dotc(&v).re
    }
}

/// One-site spin expectations at 1-based site `r`.
pub fn site_bloch(psi: &StateVector, r: usize) -> Result<BlochVector> {
    if r == 0 || r > psi.n_sites {
        return Err(Error::SiteOutOfRange {
            site: r,
            n_sites: psi.n_sites,
        });
    }
    let bit = 1usize << (r - 1);
    let amps = &psi.amplitudes;
    let mut raise = Complex64::new(0.0, 0.0);
    let mut sz = 0.0;
    for s in 0..amps.len() {
        let p = amps[s].norm_sqr();
        if s & bit == 0 {
            sz -= 0.5 * p;
            // <S^+> = <S^x> + i<S^y>
            raise += amps[s | bit].conj() * amps[s];
        } else {
            sz += 0.5 * p;
        }
    }
    Ok(BlochVector::new(raise.re, raise.im, sz))
}

/// Eigendecomposition `H = V diag(E) V^T`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub n_sites: usize,
    pub energies: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn sorted_energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.energies.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    fn complex_vectors(&self) -> DMatrix<Complex64> {
        self.vectors.map(|x| Complex64::new(x, 0.0))
    }

    /// `psi(t) = e^{-iHt} psi0`.
    pub fn evolve(&self, psi0: &StateVector, t: f64) -> StateVector {
        let v = self.complex_vectors();
        let mut coeffs = v.adjoint() * &psi0.amplitudes;
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        StateVector {
            n_sites: psi0.n_sites,
            amplitudes: v * coeffs,
        }
    }

    /// `e^{-iHt}` as a dense matrix.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let v = self.complex_vectors();
        let phases = DVector::from_iterator(
            self.energies.len(),
            self.energies
                .iter()
                .map(|&e| Complex64::from_polar(1.0, -e * t)),
        );
        let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * phases[j]);
        scaled * v.adjoint()
    }

    /// `O(t) = e^{iHt} O e^{-iHt}`.
    pub fn heisenberg(&self, op: &DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
        let u = self.propagator(t);
        u.adjoint() * op.map(|x| Complex64::new(x, 0.0)) * u
    }

    fn evolved_fermions(&self, t: f64) -> Vec<DMatrix<Complex64>> {
        let u = self.propagator(t);
        let ud = u.adjoint();
        (0..self.n_sites)
            .map(|j| &ud * annihilation(self.n_sites, j).map(|x| Complex64::new(x, 0.0)) * &u)
            .collect()
    }

    /// `a~_lj = {c_j(t), c_l^+}`, `b~_lj = {c_j(t), c_l}` read off the evolved
    /// operators' vacuum matrix elements.
    pub fn propagator_pair(&self, t: f64) -> PropagatorPair {
        let n = self.n_sites;
        let cs = self.evolved_fermions(t);
        PropagatorPair {
            a_tilde: DMatrix::from_fn(n, n, |l, j| cs[j][(0, 1 << l)]),
            b_tilde: DMatrix::from_fn(n, n, |l, j| cs[j][(1 << l, 0)]),
            time: t,
        }
    }

    /// Every vacuum contraction by explicit operator evolution.
    pub fn contraction_table(&self, t: f64) -> ContractionTable {
        let n = self.n_sites;
        let cs = self.evolved_fermions(t);
        let a_ops: Vec<_> = cs.iter().map(|c| c.adjoint() + c).collect();
        let b_ops: Vec<_> = cs.iter().map(|c| c.adjoint() - c).collect();
        let vac = |x: &DMatrix<Complex64>, y: &DMatrix<Complex64>| -> Complex64 {
            (0..x.ncols()).map(|s| x[(0, s)] * y[(s, 0)]).sum()
        };
        // <0|X c_1^+|0> + <0|c_1 X|0> = X[0, 1] + X[1, 0]
        let sender = |x: &DMatrix<Complex64>| x[(0, 1)] + x[(1, 0)];
        ContractionTable {
            ab: DMatrix::from_fn(n, n, |j, m| vac(&a_ops[j], &b_ops[m])),
            aa: DMatrix::from_fn(n, n, |j, m| vac(&a_ops[j], &a_ops[m])),
            bb: DMatrix::from_fn(n, n, |j, m| vac(&b_ops[j], &b_ops[m])),
            a_c1: DVector::from_fn(n, |j, _| sender(&a_ops[j])),
            b_c1: DVector::from_fn(n, |j, _| sender(&b_ops[j])),
            time: t,
        }
    }
}

/// Output of the oracle at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRecord {
    pub bloch: BlochVector,
    pub fidelity: f64,
    pub tangle: f64,
}

/// A diagonalized chain ready to evaluate many times.
#[derive(Debug, Clone)]
pub struct Oracle {
    spectrum: Spectrum,
}

impl Oracle {
    /// Truth source: the fermionic Hamiltonian.
    pub fn fermionic(spec: &ChainSpec) -> Result<Self> {
        Ok(Self {
            spectrum: build_fermion_hamiltonian(spec)?.diagonalize(),
        })
    }

    /// Diagnostic: the periodic spin Hamiltonian, which keeps the parity
    /// dependent boundary term dropped by the fermionic form.
    pub fn spin(spec: &ChainSpec) -> Result<Self> {
        Ok(Self {
            spectrum: build_spin_hamiltonian(spec)?.diagonalize(),
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn bloch(&self, t: f64, r: usize, input: InputState) -> Result<BlochVector> {
        let psi0 = StateVector::encoded(self.spectrum.n_sites, input);
        site_bloch(&self.spectrum.evolve(&psi0, t), r)
    }

    pub fn record(&self, t: f64, r: usize, input: InputState) -> Result<OracleRecord> {
        let bloch = self.bloch(t, r, input)?;
        Ok(OracleRecord {
            bloch,
            fidelity: observables::fidelity(input, &bloch)?,
            tangle: observables::one_tangle(&bloch)?,
        })
    }
}

/// Fermionic ED followed by the observables.
pub fn oracle_pipeline(
    spec: &ChainSpec,
    t: f64,
    r: usize,
    input: InputState,
) -> Result<OracleRecord> {
    Oracle::fermionic(spec)?.record(t, r, input)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anticomm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        a * b + b * a
    }

    #[test]
    fn canonical_anticommutation() {
        let n = 4;
        let dim = 1 << n;
        let cs: Vec<_> = (0..n).map(|i| annihilation(n, i)).collect();
        for i in 0..n {
            for j in 0..n {
                let cc = anticomm(&cs[i], &cs[j]);
                assert_eq!(cc.amax(), 0.0);
                let ccd = anticomm(&cs[i], &cs[j].transpose());
                let want = if i == j {
                    DMatrix::identity(dim, dim)
                } else {
                    DMatrix::zeros(dim, dim)
                };
                assert_eq!(ccd, want);
            }
        }
    }

    #[test]
    fn field_only_counts_occupations() {
        let spec = ChainSpec::new(3, 0.0, 0.7, 1.0).unwrap();
        let h = build_fermion_hamiltonian(&spec).unwrap();
        assert!(h.is_hermitian(0.0));
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(h.matrix[(i, j)], 0.0);
                }
            }
        }
        let e = h.diagonalize().sorted_energies();
        let want = [-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_operator_products() {
        // Same Hamiltonian assembled from explicit matrices.
        let spec = ChainSpec::new(4, 0.8, 0.45, 0.3).unwrap();
        let n = 4;
        let dim = 1 << n;
        let cs: Vec<_> = (0..n).map(|i| annihilation(n, i)).collect();
        let (j, g, h) = (0.8, 0.45, 0.3);
        let mut want = DMatrix::<f64>::zeros(dim, dim);
        let eye = DMatrix::<f64>::identity(dim, dim);
        for i in 0..n {
            let (ci, ck) = (&cs[i], &cs[(i + 1) % n]);
            let hop = ci.transpose() * ck - ci * ck.transpose();
            let pair = ci.transpose() * ck.transpose() - ci * ck;
            want -= (hop + pair * g) * (j / 2.0) + (ci.transpose() * ci - &eye * 0.5) * h;
        }
        let got = build_fermion_hamiltonian(&spec).unwrap();
        assert!((got.matrix - want).amax() < 1e-14);
    }

    #[test]
    fn isotropic_blocks_conserve_occupation() {
        let spec = ChainSpec::new(5, 0.9, 0.0, 0.2).unwrap();
        let h = build_fermion_hamiltonian(&spec).unwrap();
        for i in 0..32usize {
            for j in 0..32usize {
                if i.count_ones() != j.count_ones() {
                    assert_eq!(h.matrix[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn spin_hamiltonian_isotropic_conserves_sz() {
        let spec = ChainSpec::from_exchange(5, 0.6, 0.6, 0.0).unwrap();
        let h = build_spin_hamiltonian(&spec).unwrap();
        assert!(h.is_hermitian(1e-15));
        let sz = FockOperator::total_occupation(5);
        let comm = &h.matrix * &sz.matrix - &sz.matrix * &h.matrix;
        assert!(comm.amax() < 1e-14);
    }

    #[test]
    fn ising_three_sites() {
        // gamma = 1, h = 0: -J^x sum S^x_i S^x_{i+1} with J^x = 2J. In the S^x
        // eigenbasis the energies are -2J/4 * (sum of bond products).
        let spec = ChainSpec::new(3, 1.0, 1.0, 0.0).unwrap();
        let e = build_spin_hamiltonian(&spec)
            .unwrap()
            .diagonalize()
            .sorted_energies();
        let mut want = Vec::new();
        for cfg in 0..8u32 {
            let s: Vec<f64> = (0..3)
                .map(|i| if cfg >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            want.push(-0.5 * (s[0] * s[1] + s[1] * s[2] + s[2] * s[0]));
        }
        want.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn size_guard() {
        let spec = ChainSpec::new(15, 1.0, 0.5, 0.5).unwrap();
        assert!(matches!(
            build_fermion_hamiltonian(&spec),
            Err(Error::TooManySites { .. })
        ));
        assert!(build_spin_hamiltonian(&spec).is_err());
    }

    #[test]
    fn evolution_basics() {
        let spec = ChainSpec::new(4, 1.0, 0.5, 0.1).unwrap();
        let spectrum = build_fermion_hamiltonian(&spec).unwrap().diagonalize();
        let psi0 = StateVector::encoded(4, InputState::from_alpha(0.6).unwrap());
        let same = spectrum.evolve(&psi0, 0.0);
        assert!((same.amplitudes - &psi0.amplitudes).norm() < 1e-14);

        // diagonal H: pure phases
        let diag = ChainSpec::new(4, 0.0, 0.0, 0.7).unwrap();
        let sp = build_fermion_hamiltonian(&diag).unwrap().diagonalize();
        let out = sp.evolve(&psi0, 2.0);
        let e0 = 0.7 * 2.0;
        let e1 = 0.7 * 1.0;
        assert!((out.amplitudes[0] - Complex64::from_polar(0.6, -e0 * 2.0)).norm() < 1e-12);
        assert!((out.amplitudes[1] - Complex64::from_polar(0.8, -e1 * 2.0)).norm() < 1e-12);
    }

    #[test]
    fn norm_and_energy_conserved() {
        let spec = ChainSpec::new(5, 1.0, 0.8, 0.3).unwrap();
        let h = build_fermion_hamiltonian(&spec).unwrap();
        let spectrum = h.diagonalize();
        let psi0 = StateVector::encoded(5, InputState::from_alpha(0.3).unwrap());
        let e0 = psi0.expectation(&h);
        for i in 0..=40 {
            let t = 2.5 * i as f64;
            let psi = spectrum.evolve(&psi0, t);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            assert!((psi.expectation(&h) - e0).abs() < 1e-10);
        }
    }

    #[test]
    fn isotropic_conserves_particle_number() {
        let spec = ChainSpec::new(6, 1.0, 0.0, 0.4).unwrap();
        let spectrum = build_fermion_hamiltonian(&spec).unwrap().diagonalize();
        let occ = FockOperator::total_occupation(6);
        let psi0 = StateVector::encoded(6, InputState::from_alpha(0.5).unwrap());
        let n0 = psi0.expectation(&occ);
        for t in [0.5, 3.0, 27.0] {
            assert!((spectrum.evolve(&psi0, t).expectation(&occ) - n0).abs() < 1e-10);
        }
    }

    #[test]
    fn site_bloch_examples() {
        let vac = StateVector::encoded(5, InputState::vacuum());
        for r in 1..=5 {
            assert_eq!(
                site_bloch(&vac, r).unwrap(),
                BlochVector::new(0.0, 0.0, -0.5)
            );
        }
        let input = InputState::from_alpha(0.6).unwrap();
        let psi = StateVector::encoded(5, input);
        let b = site_bloch(&psi, 1).unwrap();
        assert!((b.sx - 0.48).abs() < 1e-15);
        assert_eq!(b.sy, 0.0);
        assert!((b.sz - (0.64 - 0.5)).abs() < 1e-15);
        assert!(site_bloch(&psi, 6).is_err());
    }

    #[test]
    fn spectrum_reconstruction() {
        for (n, j, g, h) in [(3, 1.0, 0.5, 0.1), (4, 0.5, 1.0, 0.5), (6, 0.3, 0.2, 0.9)] {
            let spec = ChainSpec::new(n, j, g, h).unwrap();
            let ed = build_fermion_hamiltonian(&spec)
                .unwrap()
                .diagonalize()
                .sorted_energies();
            let free = spec.many_body_spectrum();
            for (a, b) in ed.iter().zip(&free) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
