//! One-site spin expectations on `(alpha + beta c_1^+)|0>` via Wick's theorem.
//!
//! With `A_s B_s = 1 - 2 n_s`, the Jordan-Wigner strings are
//!
//! ```text
//! S_r^x = 1/2   A_1 B_1 ... A_{r-1} B_{r-1} A_r
//! S_r^y = -i/2  A_1 B_1 ... A_{r-1} B_{r-1} B_r
//! S_r^z = -1/2  A_r B_r
//! ```
//!
//! Only the cross term `alpha beta (<0|X c_1^+|0> + <0|c_1 X|0>)` survives for
//! the odd strings. Both pieces pair `c_1` with the same string operator and
//! carry the same sign, so the insertion is treated as a single extra operator
//! `C1` placed last, whose contraction with `X` is the symmetrized value. The
//! expectation is then one Pfaffian of a `2r x 2r` antisymmetric matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::dynamics::{ContractionTable, PropagatorPair};
use crate::error::{Error, Result};
use crate::observables::BlochVector;

/// Largest string the matching enumeration accepts.
pub const BRUTEFORCE_MAX_OPS: usize = 12;

/// Imaginary residue tolerated on a physically real quantity.
pub const REALITY_TOL: f64 = 1e-10;

/// Real amplitudes of the state `alpha|0> + beta|1>` encoded on site 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputState {
    alpha: f64,
    beta: f64,
}

impl InputState {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let norm_sq = alpha * alpha + beta * beta;
        if !alpha.is_finite() || !beta.is_finite() || (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { alpha, beta })
    }

    /// `beta = sqrt(1 - alpha^2)`.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::NotNormalized {
                norm_sq: alpha * alpha,
            });
        }
        Self::new(alpha, (1.0 - alpha * alpha).sqrt())
    }

    /// All spins down.
    pub fn vacuum() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    /// `A_l(t) = c_l^+(t) + c_l(t)`
    A,
    /// `B_l(t) = c_l^+(t) - c_l(t)`
    B,
    /// Symmetrized time-zero insertion of `c_1^+` / `c_1`.
    C1,
}

/// One operator in a Wick string. `site` is 1-based and ignored for `C1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Operator {
    pub kind: OpKind,
    pub site: usize,
}

impl Operator {
    pub fn a(site: usize) -> Self {
        Self {
            kind: OpKind::A,
            site,
        }
    }

    pub fn b(site: usize) -> Self {
        Self {
            kind: OpKind::B,
            site,
        }
    }

    pub fn c1() -> Self {
        Self {
            kind: OpKind::C1,
            site: 1,
        }
    }
}

/// An ordered operator product with a scalar prefactor.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaString {
    pub ops: Vec<Operator>,
    pub prefactor: Complex64,
}

impl MajoranaString {
    fn jordan_wigner(r: usize, terminal: Operator, prefactor: Complex64) -> Self {
        let mut ops = Vec::with_capacity(2 * r);
        for s in 1..r {
            ops.push(Operator::a(s));
            ops.push(Operator::b(s));
        }
        ops.push(terminal);
        ops.push(Operator::c1());
        Self { ops, prefactor }
    }

    /// Cross term of `<S_r^x(t)>`, without the `alpha beta` factor.
    pub fn spin_x(r: usize) -> Self {
        Self::jordan_wigner(r, Operator::a(r), Complex64::new(0.5, 0.0))
    }

    /// Cross term of `<S_r^y(t)>`: `A_r -> B_r` and `1/2 -> -i/2`.
    pub fn spin_y(r: usize) -> Self {
        Self::jordan_wigner(r, Operator::b(r), Complex64::new(0.0, -0.5))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn validate(&self, n_sites: usize) -> Result<()> {
        let len = self.ops.len();
        if !len.is_multiple_of(2) {
            return Err(Error::InvalidString {
                len,
                reason: "odd operator count",
            });
        }
        for (i, op) in self.ops.iter().enumerate() {
            match op.kind {
                OpKind::C1 if i + 1 != len => {
                    return Err(Error::InvalidString {
                        len,
                        reason: "C1 must be the last operator",
                    })
                }
                OpKind::A | OpKind::B if op.site == 0 || op.site > n_sites => {
                    return Err(Error::SiteOutOfRange {
                        site: op.site,
                        n_sites,
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Antisymmetric matrix whose `(i, j)`, `i < j`, entry is the contraction
    /// of operator `i` (left) with operator `j` (right).
    pub fn contraction_matrix(&self, table: &ContractionTable) -> Result<DMatrix<Complex64>> {
        self.validate(table.n_sites())?;
        let n = self.ops.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = contraction(table, self.ops[i], self.ops[j]);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        Ok(m)
    }

    /// `prefactor * <0|ops|0>` through the Pfaffian.
    pub fn evaluate(&self, table: &ContractionTable) -> Result<Complex64> {
        Ok(self.prefactor * pfaffian(&self.contraction_matrix(table)?))
    }
}

/// Vacuum contraction `<0|left right|0>` from the cached table.
fn contraction(table: &ContractionTable, left: Operator, right: Operator) -> Complex64 {
    let (l, r) = (left.site.wrapping_sub(1), right.site.wrapping_sub(1));
    match (left.kind, right.kind) {
        (OpKind::A, OpKind::A) => table.aa[(l, r)],
        (OpKind::A, OpKind::B) => table.ab[(l, r)],
        // {A_m, B_l} = 0 at equal times
        (OpKind::B, OpKind::A) => -table.ab[(r, l)],
        (OpKind::B, OpKind::B) => table.bb[(l, r)],
        (OpKind::A, OpKind::C1) => table.a_c1[l],
        (OpKind::B, OpKind::C1) => table.b_c1[l],
        (OpKind::C1, _) => unreachable!("C1 is validated to be last"),
    }
}

/// Pfaffian of an antisymmetric matrix by skew-symmetric Gaussian elimination
/// with partial pivoting. The input is antisymmetrized first; odd dimensions
/// give zero.
pub fn pfaffian(matrix: &DMatrix<Complex64>) -> Complex64 {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "pfaffian needs a square matrix");
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut m = (matrix - matrix.transpose()) * Complex64::new(0.5, 0.0);
    let mut pf = Complex64::new(1.0, 0.0);

    for k in (0..n).step_by(2) {
        // pivot: largest entry in row k right of the diagonal
        let (p, _) = (k + 1..n)
            .map(|j| (j, m[(k, j)].norm()))
            .fold(
                (k + 1, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if p != k + 1 {
            m.swap_rows(k + 1, p);
            m.swap_columns(k + 1, p);
            pf = -pf;
        }
        let piv = m[(k, k + 1)];
        if piv.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| m[(k, j)] / piv).collect();
            let row: Vec<Complex64> = (k + 2..n).map(|j| m[(k + 1, j)]).collect();
            for (a, i) in (k + 2..n).enumerate() {
                for (b, j) in (k + 2..n).enumerate() {
                    m[(i, j)] += row[a] * tau[b] - tau[a] * row[b];
                }
            }
        }
    }
    pf
}

/// Sum over all perfect matchings of the sign of the pairing times the product
/// of contractions. Exponential; a reference for [`MajoranaString::evaluate`].
pub fn wick_bruteforce(string: &MajoranaString, table: &ContractionTable) -> Result<Complex64> {
    if string.len() > BRUTEFORCE_MAX_OPS {
        return Err(Error::InvalidString {
            len: string.len(),
            reason: "too long for matching enumeration",
        });
    }
    let m = string.contraction_matrix(table)?;
    let idx: Vec<usize> = (0..string.len()).collect();
    Ok(string.prefactor * matching_sum(&m, &idx))
}

fn matching_sum(m: &DMatrix<Complex64>, remaining: &[usize]) -> Complex64 {
    if remaining.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let first = remaining[0];
    let mut total = Complex64::new(0.0, 0.0);
    for pos in 1..remaining.len() {
        let rest: Vec<usize> = remaining[1..]
            .iter()
            .enumerate()
            .filter(|&(i, _)| i + 1 != pos)
            .map(|(_, &x)| x)
            .collect();
        let sign = if pos % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * m[(first, remaining[pos])] * matching_sum(m, &rest);
    }
    total
}

/// Strips an imaginary residue below [`REALITY_TOL`]; anything larger is an error.
pub fn assert_real(quantity: &'static str, z: Complex64) -> Result<f64> {
    if z.im.abs() > REALITY_TOL {
        return Err(Error::ImaginaryResidue {
            quantity,
            residue: z.im,
        });
    }
    Ok(z.re)
}

fn check_site(r: usize, n_sites: usize) -> Result<()> {
    if r == 0 || r > n_sites {
        Err(Error::SiteOutOfRange { site: r, n_sites })
    } else {
        Ok(())
    }
}

/// Propagator and contraction table of one `(spec, t)` point.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub propagator: PropagatorPair,
    pub table: ContractionTable,
}

impl Snapshot {
    pub fn new(spec: &ChainSpec, t: f64) -> Self {
        Self {
            propagator: PropagatorPair::new(spec, t),
            table: ContractionTable::new(spec, t),
        }
    }

    pub fn spin_x(&self, r: usize, input: InputState) -> Result<f64> {
        check_site(r, self.table.n_sites())?;
        let pf = MajoranaString::spin_x(r).evaluate(&self.table)?;
        assert_real("<S^x>", input.alpha * input.beta * pf)
    }

    pub fn spin_y(&self, r: usize, input: InputState) -> Result<f64> {
        check_site(r, self.table.n_sites())?;
        let pf = MajoranaString::spin_y(r).evaluate(&self.table)?;
        assert_real("<S^y>", input.alpha * input.beta * pf)
    }

    /// `-1/2 [ <0|A_r B_r|0> + 2 beta^2 (|b~_1r|^2 - |a~_1r|^2) ]`; the cross
    /// terms vanish by parity.
    pub fn spin_z(&self, r: usize, input: InputState) -> Result<f64> {
        check_site(r, self.table.n_sites())?;
        let i = r - 1;
        let ab = assert_real("<0|A_r B_r|0>", self.table.ab[(i, i)])?;
        let a = self.propagator.a_tilde[(0, i)].norm_sqr();
        let b = self.propagator.b_tilde[(0, i)].norm_sqr();
        Ok(-0.5 * (ab + 2.0 * input.beta * input.beta * (b - a)))
    }

    pub fn bloch(&self, r: usize, input: InputState) -> Result<BlochVector> {
        Ok(BlochVector::new(
            self.spin_x(r, input)?,
            self.spin_y(r, input)?,
            self.spin_z(r, input)?,
        ))
    }
}

pub fn spin_x(spec: &ChainSpec, t: f64, r: usize, input: InputState) -> Result<f64> {
    Snapshot::new(spec, t).spin_x(r, input)
}

pub fn spin_y(spec: &ChainSpec, t: f64, r: usize, input: InputState) -> Result<f64> {
    Snapshot::new(spec, t).spin_y(r, input)
}

pub fn spin_z(spec: &ChainSpec, t: f64, r: usize, input: InputState) -> Result<f64> {
    Snapshot::new(spec, t).spin_z(r, input)
}

/// `(<S_r^x>, <S_r^y>, <S_r^z>)` at time t from one shared snapshot.
pub fn bloch_vector(spec: &ChainSpec, t: f64, r: usize, input: InputState) -> Result<BlochVector> {
    Snapshot::new(spec, t).bloch(r, input)
}
