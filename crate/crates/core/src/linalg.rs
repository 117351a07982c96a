//! Fixed-size complex linear algebra for two-qubit operators.
//!
//! Everything here works on 4×4 matrices indexed row-major over the product
//! basis `|00⟩, |01⟩, |10⟩, |11⟩`, plus 2×2 single-qubit blocks. The
//! eigensolvers are hand-rolled: cyclic Jacobi for Hermitian input and a
//! Hessenberg reduction followed by shifted QR for the general case.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// 2×2 complex block, `[row][col]`.
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerances shared by every numerical routine in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Hermiticity, trace and positivity checks.
    pub structural: f64,
    /// Eigenvalue agreement and imaginary-part rejection.
    pub spectral: f64,
    /// Largest negative excursion a scalar measure may clamp to zero.
    pub measure_clamp: f64,
    /// Eigenvalues below this are treated as outside the support.
    pub support: f64,
    pub max_jacobi_sweeps: usize,
    pub max_qr_iterations: usize,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        structural: 1e-10,
        spectral: 1e-8,
        measure_clamp: 1e-9,
        support: 1e-12,
        max_jacobi_sweeps: 60,
        max_qr_iterations: 400,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max |m - m†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
}

/// Which qubit a partial operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Pauli matrices σ₁, σ₂, σ₃.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Maps the conventional index `n ∈ {1, 2, 3}`.
    pub fn from_index(n: usize) -> Option<Pauli> {
        match n {
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn matrix(self) -> Mat2 {
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// Dense 4×4 complex matrix over the two-qubit product basis.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix4(pub [[C64; 4]; 4]);

impl fmt::Debug for ComplexMatrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix4[")?;
        for row in &self.0 {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.0[r][c]
    }
}

impl ComplexMatrix4 {
    pub fn zeros() -> Self {
        ComplexMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::from_real_diag([1.0; 4])
    }

    pub fn from_diag(d: [C64; 4]) -> Self {
        let mut m = Self::zeros();
        for (k, z) in d.into_iter().enumerate() {
            m.0[k][k] = z;
        }
        m
    }

    pub fn from_real_diag(d: [f64; 4]) -> Self {
        Self::from_diag(d.map(|x| C64::new(x, 0.0)))
    }

    /// `|v⟩⟨v|` for an arbitrary (not necessarily normalized) vector.
    pub fn outer(v: &[C64; 4]) -> Self {
        Self::outer2(v, v)
    }

    /// `|a⟩⟨b|`.
    pub fn outer2(a: &[C64; 4], b: &[C64; 4]) -> Self {
        let mut m = Self::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = a[r] * b[c].conj();
            }
        }
        m
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(cols: &[[C64; 4]; 4]) -> Self {
        let mut m = Self::zeros();
        for c in 0..4 {
            for r in 0..4 {
                m.0[r][c] = cols[c][r];
            }
        }
        m
    }

    pub fn column(&self, c: usize) -> [C64; 4] {
        [self.0[0][c], self.0[1][c], self.0[2][c], self.0[3][c]]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.0[c][r].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix4(self.0.map(|row| row.map(|z| z.conj())))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.0[c][r];
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix4(self.0.map(|row| row.map(|z| z * s)))
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|c| self.0[r][c] * v[c]).sum();
        }
        out
    }

    /// `⟨v| m |v⟩`.
    pub fn expectation(&self, v: &[C64; 4]) -> C64 {
        let mv = self.apply(v);
        (0..4).map(|k| v[k].conj() * mv[k]).sum()
    }

    /// Entrywise maximum modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Entrywise `max |m - m†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for r in 0..4 {
            for c in 0..4 {
                acc += self.0[r][c] * other.0[c][r];
            }
        }
        acc
    }

    /// Transposes the indices of one qubit.
    pub fn partial_transpose(&self, which: Subsystem) -> Self {
        let mut out = Self::zeros();
        for i in 0..2 {
            for k in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        let v = self.0[2 * i + k][2 * j + l];
                        match which {
                            Subsystem::First => out.0[2 * j + k][2 * i + l] = v,
                            Subsystem::Second => out.0[2 * i + l][2 * j + k] = v,
                        }
                    }
                }
            }
        }
        out
    }

    /// Traces out one qubit, returning the 2×2 state of the other.
    pub fn partial_trace(&self, traced: Subsystem) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                out[a][b] = match traced {
                    Subsystem::Second => self.0[2 * a][2 * b] + self.0[2 * a + 1][2 * b + 1],
                    Subsystem::First => self.0[a][b] + self.0[2 + a][2 + b],
                };
            }
        }
        out
    }

    /// `U m U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }
}

impl Add for ComplexMatrix4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] += rhs.0[r][c];
            }
        }
        m
    }
}

impl Sub for ComplexMatrix4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] -= rhs.0[r][c];
            }
        }
        m
    }
}

impl Mul for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        m
    }
}

impl Mul<C64> for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        ComplexMatrix4(self.0.map(|row| row.map(|z| z * rhs)))
    }
}

/// Kronecker product: `(a⊗b)[2i+k][2j+l] = a[i][j]·b[k][l]`.
pub fn kron(a: &Mat2, b: &Mat2) -> ComplexMatrix4 {
    let mut m = ComplexMatrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

/// Kronecker product of two single-qubit vectors.
pub fn kron_vec(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            m[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    m
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Eigenvalues of a 2×2 Hermitian matrix, ascending.
pub fn hermitian_eigvals2(a: &Mat2) -> [f64; 2] {
    let p = a[0][0].re;
    let q = a[1][1].re;
    let off = a[0][1].norm();
    let mean = 0.5 * (p + q);
    let rad = (0.25 * (p - q) * (p - q) + off * off).sqrt();
    [mean - rad, mean + rad]
}

/// Eigendecomposition `m = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen {
    pub values: [f64; 4],
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: ComplexMatrix4,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> [C64; 4] {
        self.vectors.column(k)
    }

    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix4 {
        let mut out = ComplexMatrix4::zeros();
        for k in 0..4 {
            let w = f(self.values[k]);
            if w == 0.0 {
                continue;
            }
            let v = self.vector(k);
            out = out + ComplexMatrix4::outer(&v).scale(w);
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix4 {
        self.map_values(|x| x)
    }
}

pub fn hermitian_eig(m: &ComplexMatrix4) -> Result<HermitianEigen, LinalgError> {
    hermitian_eig_with(m, &NumericPolicy::DEFAULT)
}

/// Cyclic Jacobi eigensolver for Hermitian 4×4 matrices.
pub fn hermitian_eig_with(
    m: &ComplexMatrix4,
    policy: &NumericPolicy,
) -> Result<HermitianEigen, LinalgError> {
    let deviation = m.hermiticity_defect();
    if deviation > policy.structural {
        return Err(LinalgError::NotHermitian { deviation });
    }
    let mut a = m.hermitian_part().0;
    let mut v = ComplexMatrix4::identity().0;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..policy.max_jacobi_sweeps {
        let off: f64 = (0..4)
            .flat_map(|r| (0..4).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[r][c].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            converged = true;
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            iterations: policy.max_jacobi_sweeps,
        });
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| a[x][x].re.total_cmp(&a[y][y].re));
    let values = order.map(|k| a[k][k].re);
    let mut vectors = ComplexMatrix4::zeros();
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..4 {
            vectors.0[r][dst] = v[r][src];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn jacobi_rotate(a: &mut [[C64; 4]; 4], v: &mut [[C64; 4]; 4], p: usize, q: usize) {
    let apq = a[p][q];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let phase = apq / abs;
    let theta = (a[q][q].re - a[p][p].re) / (2.0 * abs);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane.
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for row in a.iter_mut() {
        let xp = row[p];
        let xq = row[q];
        row[p] = xp * c + xq * jqp;
        row[q] = xp * jpq + xq * jqq;
    }
    for col in 0..4 {
        let xp = a[p][col];
        let xq = a[q][col];
        a[p][col] = xp * c + xq * jqp.conj();
        a[q][col] = xp * jpq.conj() + xq * jqq.conj();
    }
    a[p][q] = ZERO;
    a[q][p] = ZERO;
    a[p][p].im = 0.0;
    a[q][q].im = 0.0;
    for row in v.iter_mut() {
        let xp = row[p];
        let xq = row[q];
        row[p] = xp * c + xq * jqp;
        row[q] = xp * jpq + xq * jqq;
    }
}

pub fn general_eig4(m: &ComplexMatrix4) -> Result<[C64; 4], LinalgError> {
    general_eig4_with(m, &NumericPolicy::DEFAULT)
}

/// Eigenvalues of an arbitrary complex 4×4 matrix via Householder
/// Hessenberg reduction and Wilkinson-shifted QR with deflation.
pub fn general_eig4_with(
    m: &ComplexMatrix4,
    policy: &NumericPolicy,
) -> Result<[C64; 4], LinalgError> {
    let mut h = hessenberg(m).0;
    let mut eig = [ZERO; 4];
    let mut hi = 3usize;
    let mut total = 0usize;
    let mut since_deflation = 0usize;

    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        // Find the start of the unreduced trailing block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let diag = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            if sub <= f64::EPSILON * diag || sub < 1e-300 {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > policy.max_qr_iterations {
            return Err(LinalgError::NoConvergence { iterations: total });
        }

        let shift = if since_deflation % 11 == 10 {
            h[hi][hi] + C64::new(0.75 * h[hi][hi - 1].norm(), 0.0)
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };

        for k in lo..=hi {
            h[k][k] -= shift;
        }
        let mut rotations = [(0.0f64, ZERO); 3];
        for k in lo..hi {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            rotations[k] = (c, s);
            for col in k..=hi {
                let x = h[k][col];
                let y = h[k + 1][col];
                h[k][col] = x * c + y * s;
                h[k + 1][col] = -x * s.conj() + y * c;
            }
        }
        for k in lo..hi {
            let (c, s) = rotations[k];
            let last = (k + 2).min(hi);
            for row in h.iter_mut().take(last + 1).skip(lo) {
                let x = row[k];
                let y = row[k + 1];
                row[k] = x * c + y * s.conj();
                row[k + 1] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[k][k] += shift;
        }
    }
    Ok(eig)
}

/// Rotation `[[c, s], [-s̄, c]]` with real `c` zeroing the second entry.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Unitary similarity to upper Hessenberg form.
fn hessenberg(m: &ComplexMatrix4) -> ComplexMatrix4 {
    let mut a = m.0;
    for k in 0..2 {
        let norm: f64 = (k + 1..4).map(|r| a[r][k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[k + 1][k];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v = [ZERO; 4];
        for r in (k + 1)..4 {
            v[r] = a[r][k];
        }
        v[k + 1] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // A ← (I - 2vv†) A
        for col in 0..4 {
            let dot: C64 = (0..4).map(|r| v[r].conj() * a[r][col]).sum();
            for r in 0..4 {
                a[r][col] -= v[r] * dot * 2.0;
            }
        }
        // A ← A (I - 2vv†)
        for row in a.iter_mut() {
            let dot: C64 = (0..4).map(|c| row[c] * v[c]).sum();
            for c in 0..4 {
                row[c] -= dot * v[c].conj() * 2.0;
            }
        }
    }
    ComplexMatrix4(a)
}

/// Cyclic Jacobi for a real symmetric `n×n` matrix stored row-major.
/// Returns ascending eigenvalues and the matching eigenvectors as columns
/// (row-major `n×n`).
pub fn symmetric_eig_real(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    assert_eq!(a.len(), n * n);
    let mut a = a.to_vec();
    for r in 0..n {
        for c in (r + 1)..n {
            let m = 0.5 * (a[r * n + c] + a[c * n + r]);
            a[r * n + c] = m;
            a[c * n + r] = m;
        }
    }
    let mut v = vec![0.0; n * n];
    for k in 0..n {
        v[k * n + k] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let sweeps = NumericPolicy::DEFAULT.max_jacobi_sweeps;
    let mut converged = false;
    for _ in 0..sweeps {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[r * n + c].powi(2))
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let xp = a[k * n + p];
                    let xq = a[k * n + q];
                    a[k * n + p] = c * xp - s * xq;
                    a[k * n + q] = s * xp + c * xq;
                }
                for k in 0..n {
                    let xp = a[p * n + k];
                    let xq = a[q * n + k];
                    a[p * n + k] = c * xp - s * xq;
                    a[q * n + k] = s * xp + c * xq;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let xp = v[k * n + p];
                    let xq = v[k * n + q];
                    v[k * n + p] = c * xp - s * xq;
                    v[k * n + q] = s * xp + c * xq;
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { iterations: sweeps });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + dst] = v[r * n + src];
        }
    }
    Ok((values, vectors))
}

/// Takagi factorization of a complex symmetric 4×4 `τ`: unitary `U` (columns)
/// with `τ U* = U diag(σ)`, `σ` descending.
pub fn takagi4(tau: &[[C64; 4]; 4]) -> Result<([[C64; 4]; 4], [f64; 4]), LinalgError> {
    let n = 8;
    let mut m = vec![0.0; n * n];
    for r in 0..4 {
        for c in 0..4 {
            let (x, y) = (tau[r][c].re, tau[r][c].im);
            m[r * n + c] = x;
            m[r * n + c + 4] = y;
            m[(r + 4) * n + c] = y;
            m[(r + 4) * n + c + 4] = -x;
        }
    }
    let (vals, vecs) = symmetric_eig_real(&m, n)?;
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let zero_tol = 1e-10 * scale;
    let column = |k: usize| -> [C64; 4] {
        [0, 1, 2, 3].map(|r| C64::new(vecs[r * n + k], vecs[(r + 4) * n + k]))
    };
    let mut cols: Vec<[C64; 4]> = Vec::with_capacity(4);
    let mut sig = Vec::with_capacity(4);
    // Positive values, descending; their eigenvectors are already complex
    // orthonormal.
    for k in (0..n).rev() {
        if vals[k] > zero_tol && cols.len() < 4 {
            cols.push(column(k));
            sig.push(vals[k]);
        }
    }
    // Null space: complex Gram–Schmidt over every near-zero eigenvector.
    for k in 0..n {
        if cols.len() == 4 {
            break;
        }
        if vals[k].abs() > zero_tol {
            continue;
        }
        let mut v = column(k);
        for u in &cols {
            let d: C64 = (0..4).map(|i| u[i].conj() * v[i]).sum();
            for i in 0..4 {
                v[i] -= u[i] * d;
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-6 {
            cols.push(v.map(|z| z / nv));
            sig.push(0.0);
        }
    }
    if cols.len() < 4 {
        return Err(LinalgError::NoConvergence { iterations: 0 });
    }
    let mut u = [[C64::new(0.0, 0.0); 4]; 4];
    for (c, col) in cols.iter().enumerate() {
        for r in 0..4 {
            u[r][c] = col[r];
        }
    }
    Ok((u, [sig[0], sig[1], sig[2], sig[3]]))
}

/// Base-2 matrix logarithm of a Hermitian PSD matrix on its support.
///
/// Eigen-directions with eigenvalue at or below the support threshold map to
/// zero, which realizes `0·lg 0 = 0` once the result is traced against a
/// state supported inside the same subspace.
pub fn matrix_lg(m: &ComplexMatrix4) -> Result<ComplexMatrix4, LinalgError> {
    let policy = NumericPolicy::DEFAULT;
    let eig = hermitian_eig_with(m, &policy)?;
    if eig.values[0] < -policy.structural {
        return Err(LinalgError::NotPsd {
            min_eigenvalue: eig.values[0],
        });
    }
    Ok(eig.map_values(|x| if x > policy.support { x.log2() } else { 0.0 }))
}
