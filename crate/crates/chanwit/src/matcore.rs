//! Dense complex-matrix kernel: Hermitian eigendecomposition via cyclic
//! Jacobi rotations, trace norm, Kronecker product, partial trace.
//!
//! Everything is value-semantic; operations take references and return fresh
//! matrices, so values can be shared and moved across threads freely.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::consts;
use crate::error::{Error, Result};

/// Shorthand for a real complex number.
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Shorthand for a general complex number.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which tensor factor of a bipartite operator an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Dense complex matrix with row-major storage.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "CMatrix::new",
                detail: format!("{} entries for a {}x{} matrix", data.len(), rows, cols),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch {
                context: "CMatrix::from_rows",
                detail: "empty matrix".into(),
            });
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    context: "CMatrix::from_rows",
                    detail: format!("ragged rows: {} vs {}", row.len(), c),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| cr(x)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = cr(x);
        }
        m
    }

    /// Rank-one matrix u v†.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.scaled_c(cr(s))
    }

    pub fn scaled_c(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entrywise |A - A†|; zero for exactly Hermitian matrices.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (other.rows, other.cols);
        Self::from_fn(ra * rb, ca * cb, |i, j| {
            self[(i / rb, j / cb)] * other[(i % rb, j % cb)]
        })
    }

    /// Partial trace of an operator on a tensor product with factor
    /// dimensions `dims`, tracing out the named subsystem.
    pub fn partial_trace(&self, dims: (usize, usize), traced: Subsystem) -> Result<Self> {
        let (d1, d2) = dims;
        if self.rows != d1 * d2 || self.cols != d1 * d2 {
            return Err(Error::DimensionMismatch {
                context: "partial_trace",
                detail: format!("{}x{} vs factors {}x{}", self.rows, self.cols, d1, d2),
            });
        }
        let out = match traced {
            Subsystem::Second => Self::from_fn(d1, d1, |i, j| {
                (0..d2).map(|k| self[(i * d2 + k, j * d2 + k)]).sum()
            }),
            Subsystem::First => Self::from_fn(d2, d2, |i, j| {
                (0..d1).map(|k| self[(k * d2 + i, k * d2 + j)]).sum()
            }),
        };
        Ok(out)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues sorted descending with orthonormal eigenvector
    /// columns; each column's first nonzero component is phased to be real
    /// positive, so the output is deterministic.
    pub fn hermitian_eig(&self) -> Result<HermEig> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let dev = self.hermiticity_deviation();
        if dev > consts::HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_asymmetry: dev });
        }
        let n = self.rows;
        // Work on the exactly Hermitian part to kill rounding asymmetry.
        let mut a = Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * cr(0.5));
        let mut v = Self::identity(n);
        let scale = 1.0 + a.max_abs();
        let thresh = consts::JACOBI_OFF_TOL * scale;

        let mut converged = n < 2;
        let mut last_off = 0.0;
        for _sweep in 0..consts::JACOBI_MAX_SWEEPS {
            let off = off_diagonal_norm(&a);
            last_off = off;
            if off <= thresh {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) > thresh {
            return Err(Error::EigNotConverged {
                off_norm: last_off,
                sweeps: consts::JACOBI_MAX_SWEEPS,
            });
        }

        let mut order: Vec<usize> = (0..n).collect();
        let vals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap().then(i.cmp(&j)));

        let values: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
        let mut vectors = Self::from_fn(n, n, |i, j| v[(i, order[j])]);
        for j in 0..n {
            fix_column_phase(&mut vectors, j);
        }
        Ok(HermEig { values, vectors })
    }

    /// Sum of |eigenvalues| (the 1-Schatten norm restricted to Hermitian
    /// arguments).
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.hermitian_eig()?.values.iter().map(|x| x.abs()).sum())
    }

    /// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
    pub fn top_eigpair(&self) -> Result<(f64, Vec<Complex64>)> {
        let eig = self.hermitian_eig()?;
        Ok((eig.values[0], eig.vectors.column(0)))
    }
}

/// Result of a Hermitian eigendecomposition: `values` descending, `vectors`
/// the matching orthonormal columns.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    /// Reassembles V diag(f(λ)) V†.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * cr(f(self.values[k])) * self.vectors[(j, k)].conj())
                .sum()
        })
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation zeroing A[p][q], accumulated into V.
///
/// The rotation is U = D·J restricted to the (p,q) plane, with D = diag(1,
/// e^{-iα}) absorbing the phase of A[p][q] and J the real Givens rotation
/// that annihilates the resulting real off-diagonal entry.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{iα}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cth = 1.0 / (1.0 + t * t).sqrt();
    let sth = t * cth;
    let sphase = cr(sth) * phase.conj(); // s·e^{-iα}

    let n = a.rows();
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * cr(cth) - aiq * sphase;
        a[(i, q)] = aip * cr(sth) + aiq * cr(cth) * phase.conj();
        a[(p, i)] = a[(i, p)].conj();
        a[(q, i)] = a[(i, q)].conj();
    }
    a[(p, p)] = cr(app - t * r);
    a[(q, q)] = cr(aqq + t * r);
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * cr(cth) - viq * sphase;
        v[(i, q)] = vip * cr(sth) + viq * cr(cth) * phase.conj();
    }
}

fn fix_column_phase(m: &mut CMatrix, j: usize) {
    let n = m.rows();
    for i in 0..n {
        let z = m[(i, j)];
        if z.norm() > consts::PHASE_FIX_MIN {
            let ph = z.conj() / z.norm();
            for k in 0..n {
                m[(k, j)] *= ph;
            }
            return;
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Inner product ⟨u|v⟩ with conjugation on the left argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Computational basis vector |k⟩ in dimension d.
pub fn basis_vector(d: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::ZERO; d];
    v[k] = cr(1.0);
    v
}

/// Matrix of iid standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    loop {
        let g = ginibre(d, d, rng);
        if let Some(u) = orthonormalize_columns(&g) {
            return u;
        }
    }
}

/// Gram-Schmidt orthonormalization of the columns; None if rank-deficient.
pub fn orthonormalize_columns(m: &CMatrix) -> Option<CMatrix> {
    let mut cols: Vec<Vec<Complex64>> = (0..m.cols()).map(|j| m.column(j)).collect();
    for j in 0..cols.len() {
        // two projection passes for numerical orthogonality
        for _ in 0..2 {
            for k in 0..j {
                let proj = inner(&cols[k], &cols[j]);
                let prev = cols[k].clone();
                for (x, p) in cols[j].iter_mut().zip(&prev) {
                    *x -= proj * p;
                }
            }
        }
        let nrm = vec_norm(&cols[j]);
        if nrm < 1e-12 {
            return None;
        }
        for x in cols[j].iter_mut() {
            *x /= nrm;
        }
    }
    Some(CMatrix::from_fn(m.rows(), m.cols(), |i, j| cols[j][i]))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    pub(crate) fn sigma_x() -> CMatrix {
        CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(1.0), cr(0.0)]]).unwrap()
    }

    pub(crate) fn sigma_z() -> CMatrix {
        CMatrix::diag(&[1.0, -1.0])
    }

    #[test]
    fn eig_identity() {
        let eig = CMatrix::identity(2).hermitian_eig().unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0]);
    }

    #[test]
    fn eig_sigma_z() {
        let eig = sigma_z().hermitian_eig().unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] + 1.0).abs() < 1e-14);
        // descending order puts e0 first, e1 second
        assert!((eig.vectors[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((eig.vectors[(1, 1)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_hadamard_direction() {
        // (σ_X + σ_Z)/√2 has characteristic polynomial λ² - 1
        let m = (&sigma_x() + &sigma_z()).scaled(SQRT_HALF);
        let eig = m.hermitian_eig().unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(0.0)]]).unwrap();
        match m.hermitian_eig() {
            Err(Error::NotHermitian { max_asymmetry }) => {
                assert!((max_asymmetry - 1.0).abs() < 1e-14)
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eig_complex_entries() {
        let m = CMatrix::from_rows(&[vec![cr(1.0), c(0.0, -0.7)], vec![c(0.0, 0.7), cr(-0.5)]])
            .unwrap();
        let eig = m.hermitian_eig().unwrap();
        let rebuilt = eig.map_eigenvalues(|x| x);
        assert!(rebuilt.max_abs_diff(&m) < 1e-12);
        assert!(eig.values[0] > eig.values[1]);
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=8 {
            let g = ginibre(n, n, &mut rng);
            let h = (&g + &g.adjoint()).scaled(0.5);
            let eig = h.hermitian_eig().unwrap();
            let rebuilt = eig.map_eigenvalues(|x| x);
            assert!(rebuilt.max_abs_diff(&h) <= 1e-10 * (1.0 + h.max_abs()));
            // eigenvalue sum equals the trace
            let s: f64 = eig.values.iter().sum();
            assert!((s - h.trace().re).abs() < 1e-10 * (1.0 + h.max_abs()));
            // orthonormal columns
            let vhv = &eig.vectors.adjoint() * &eig.vectors;
            assert!(vhv.max_abs_diff(&CMatrix::identity(n)) < 1e-10);
        }
    }

    #[test]
    fn trace_norm_diagonal() {
        assert!((CMatrix::diag(&[0.6, -0.4]).trace_norm().unwrap() - 1.0).abs() < 1e-14);
        assert!(CMatrix::zeros(3, 3).trace_norm().unwrap() < 1e-14);
        assert!((CMatrix::diag(&[0.3, 0.3, -0.1]).trace_norm().unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3, 5] {
            let g = ginibre(n, n, &mut rng);
            let h = (&g + &g.adjoint()).scaled(0.5);
            let u = haar_unitary(n, &mut rng);
            let rotated = &(&u * &h) * &u.adjoint();
            let a = h.trace_norm().unwrap();
            let b = rotated.trace_norm().unwrap();
            assert!((a - b).abs() < 1e-9 * (1.0 + a));
        }
    }

    #[test]
    fn kron_identity() {
        let k = CMatrix::identity(2).kron(&CMatrix::identity(2));
        assert!(k.max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn partial_trace_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ga = ginibre(2, 2, &mut rng);
        let gb = ginibre(3, 3, &mut rng);
        let a = (&ga + &ga.adjoint()).scaled(0.5);
        let b = (&gb + &gb.adjoint()).scaled(0.5);
        let prod = a.kron(&b);
        let reduced = prod.partial_trace((2, 3), Subsystem::Second).unwrap();
        assert!(reduced.max_abs_diff(&a.scaled(b.trace().re)) < 1e-12);
        let reduced1 = prod.partial_trace((2, 3), Subsystem::First).unwrap();
        assert!(reduced1.max_abs_diff(&b.scaled(a.trace().re)) < 1e-12);
        // trace preservation
        assert!((reduced.trace() - prod.trace()).norm() < 1e-12);
    }

    #[test]
    fn top_eigpair_diagonal() {
        let (val, vec) = CMatrix::diag(&[0.2, 0.9]).top_eigpair().unwrap();
        assert!((val - 0.9).abs() < 1e-14);
        assert!((vec[1].re - 1.0).abs() < 1e-12 && vec[0].norm() < 1e-12);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = haar_unitary(4, &mut rng);
        let uhu = &u.adjoint() * &u;
        assert!(uhu.max_abs_diff(&CMatrix::identity(4)) < 1e-10);
    }
}
