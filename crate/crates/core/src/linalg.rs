//! Fixed-size (2×2 and 4×4) complex Hermitian matrix algebra.
//!
//! Everything the covariance dynamics needs lives here: eigenvalues (closed
//! form for 2×2, a cyclic Jacobi sweep for 4×4), positive-semidefiniteness
//! with a scale-aware tolerance, the PSD square root, inversion, Schur
//! complements, and a thin general complex-matrix type for products and
//! adjoints. No general n×n machinery — the dimensions never exceed 4.

use num_complex::Complex;

use crate::error::Error;
use crate::Result;

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;

/// Asymmetry admitted by the checked [`HermitianMatrix`] constructor.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Default relative tolerance for positivity decisions.
pub const PSD_TOL: f64 = 1e-10;

/// Jacobi sweep convergence: off-diagonal norm below this times the matrix
/// norm counts as diagonal.
const JACOBI_TOL: f64 = 1e-13;

/// Dense row-major complex matrix with no symmetry constraint.
///
/// Holds the non-Hermitian actors of the flow (the diagonal drift matrices
/// and off-diagonal two-mode blocks) and serves as scratch space for
/// products.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds from row-major data; panics if the length does not match.
    pub fn from_data(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + aik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, z: C64) -> Self {
        let data = self.data.iter().map(|a| a * z).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let mut piv = k;
            let mut best = a.get(k, k).norm();
            for r in k + 1..n {
                let v = a.get(r, k).norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if piv != k {
                for j in 0..n {
                    let tmp = a.get(k, j);
                    a.set(k, j, a.get(piv, j));
                    a.set(piv, j, tmp);
                }
                det = -det;
            }
            let akk = a.get(k, k);
            det *= akk;
            for r in k + 1..n {
                let f = a.get(r, k) / akk;
                for j in k..n {
                    let v = a.get(r, j) - f * a.get(k, j);
                    a.set(r, j, v);
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse with partial pivoting; `None` on pivot breakdown.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let mut piv = k;
            let mut best = a.get(k, k).norm();
            for r in k + 1..n {
                let v = a.get(r, k).norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    let t = a.get(k, j);
                    a.set(k, j, a.get(piv, j));
                    a.set(piv, j, t);
                    let t = inv.get(k, j);
                    inv.set(k, j, inv.get(piv, j));
                    inv.set(piv, j, t);
                }
            }
            let akk = a.get(k, k);
            for j in 0..n {
                a.set(k, j, a.get(k, j) / akk);
                inv.set(k, j, inv.get(k, j) / akk);
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a.get(r, k);
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(r, j) - f * a.get(k, j);
                    a.set(r, j, v);
                    let v = inv.get(r, j) - f * inv.get(k, j);
                    inv.set(r, j, v);
                }
            }
        }
        Some(inv)
    }
}

/// Complex Hermitian matrix of dimension 2 or 4.
///
/// Invariant: `entry(j,k) == conj(entry(k,j))` exactly and diagonal
/// imaginary parts are exactly zero. The checked constructor admits inputs
/// whose asymmetry is below [`HERMITICITY_TOL`] and symmetrizes them; the
/// integrators build results through [`HermitianMatrix::from_upper`], which
/// mirrors the upper triangle and therefore cannot drift off the invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    /// Checked constructor from row-major entries.
    ///
    /// Rejects non-finite data, unsupported dimensions and asymmetry above
    /// [`HERMITICITY_TOL`]; below that the matrix is symmetrized to
    /// `(M + M†)/2`.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::Structure(format!("unsupported dimension {dim} (expected 2 or 4)")));
        }
        if entries.len() != dim * dim {
            return Err(Error::Structure(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Structure("non-finite matrix entry".into()));
        }
        for j in 0..dim {
            for k in j..dim {
                let asym = (entries[j * dim + k] - entries[k * dim + j].conj()).norm();
                if asym > HERMITICITY_TOL {
                    return Err(Error::Structure(format!(
                        "matrix is not Hermitian: |M[{j}][{k}] - conj(M[{k}][{j}])| = {asym:e}"
                    )));
                }
            }
        }
        let m = Self {
            dim,
            data: entries,
        };
        Ok(Self::from_upper(dim, |j, k| {
            if j == k {
                C64::new(m.data[j * dim + j].re, 0.0)
            } else {
                0.5 * (m.data[j * dim + k] + m.data[k * dim + j].conj())
            }
        }))
    }

    /// Builds the matrix from its upper triangle: `f(j, k)` is consulted for
    /// `j <= k` only and the lower triangle is filled with conjugates, so the
    /// result is Hermitian by construction.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            for k in j..dim {
                let z = f(j, k);
                if j == k {
                    data[j * dim + j] = C64::new(z.re, 0.0);
                } else {
                    data[j * dim + k] = z;
                    data[k * dim + j] = z.conj();
                }
            }
        }
        Self { dim, data }
    }

    /// Symmetrizes an arbitrary square complex matrix to `(M + M†)/2`.
    ///
    /// This is the re-Hermitization step applied to integrator output; it
    /// does not gate on the size of the asymmetry.
    pub fn symmetrized(m: &ComplexMatrix) -> Self {
        assert_eq!(m.rows(), m.cols());
        Self::from_upper(m.rows(), |j, k| 0.5 * (m.get(j, k) + m.get(k, j).conj()))
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_upper(dim, |j, k| {
            if j == k {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        Self::from_upper(entries.len(), |j, k| {
            if j == k {
                C64::new(entries[j], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> C64 {
        self.data[j * self.dim + k]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_data(self.dim, self.dim, self.data.clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self::from_upper(self.dim, |j, k| self.get(j, k) + rhs.get(j, k))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self::from_upper(self.dim, |j, k| self.get(j, k) - rhs.get(j, k))
    }

    /// Scaling by a real factor (keeps Hermiticity).
    pub fn scale(&self, s: f64) -> Self {
        Self::from_upper(self.dim, |j, k| self.get(j, k) * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|j| self.get(j, j).re).sum()
    }

    /// Determinant (real for a Hermitian matrix).
    pub fn det(&self) -> f64 {
        match self.dim {
            2 => self.get(0, 0).re * self.get(1, 1).re - self.get(0, 1).norm_sqr(),
            _ => self.to_complex().det().re,
        }
    }

    /// Real quadratic form `⟨v|M|v⟩`.
    pub fn quadratic_form(&self, v: &[C64]) -> f64 {
        assert_eq!(v.len(), self.dim);
        let mv = self.to_complex().mul_vec(v);
        v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Eigenvalues in ascending order.
    ///
    /// 2×2 via the closed-form quadratic, 4×4 via a cyclic Jacobi sweep
    /// converged to off-diagonal norm below `1e-13·‖M‖`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.dim {
            2 => {
                let (lo, hi) = self.eig2_values();
                vec![lo, hi]
            }
            _ => self.eigh().0,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Full eigendecomposition `M = U·diag(λ)·U†` with eigenvalues ascending
    /// and the columns of `U` the matching orthonormal eigenvectors.
    pub fn eigh(&self) -> (Vec<f64>, ComplexMatrix) {
        match self.dim {
            2 => self.eigh2(),
            _ => self.eigh_jacobi(),
        }
    }

    fn eig2_values(&self) -> (f64, f64) {
        let a = self.get(0, 0).re;
        let d = self.get(1, 1).re;
        let m = 0.5 * (a + d);
        let h = 0.5 * (a - d);
        let s = (h * h + self.get(0, 1).norm_sqr()).sqrt();
        (m - s, m + s)
    }

    fn eigh2(&self) -> (Vec<f64>, ComplexMatrix) {
        let a = self.get(0, 0).re;
        let b = self.get(0, 1);
        let (lo, hi) = self.eig2_values();
        let scale = self.max_abs().max(1.0);
        let mut u = ComplexMatrix::zeros(2, 2);
        if b.norm() <= 1e-15 * scale {
            // Diagonal within noise: eigenvectors are the basis vectors,
            // ordered by the diagonal.
            let d = self.get(1, 1).re;
            let (c0, c1) = if a <= d { (0, 1) } else { (1, 0) };
            u.set(c0, 0, C64::new(1.0, 0.0));
            u.set(c1, 1, C64::new(1.0, 0.0));
            return (vec![lo, hi], u);
        }
        // (b, λ - a) is an eigenvector for λ; the two columns are orthogonal.
        for (col, lam) in [(0usize, lo), (1usize, hi)] {
            let v = [b, C64::new(lam - a, 0.0)];
            let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            u.set(0, col, v[0] / n);
            u.set(1, col, v[1] / n);
        }
        (vec![lo, hi], u)
    }

    fn eigh_jacobi(&self) -> (Vec<f64>, ComplexMatrix) {
        let n = self.dim;
        let mut a = self.to_complex();
        let mut u = ComplexMatrix::identity(n);
        let scale = self.frobenius();
        if scale == 0.0 {
            return (vec![0.0; n], u);
        }
        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += 2.0 * a.get(p, q).norm_sqr();
                }
            }
            if off.sqrt() <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    let m = apq.norm();
                    if m <= 1e-300 {
                        continue;
                    }
                    let phase = apq / m;
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    let theta = (aqq - app) / (2.0 * m);
                    let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Plane rotation V = diag-phase * real Givens, zeroing a[p][q].
                    let vpp = C64::new(c, 0.0);
                    let vpq = C64::new(s, 0.0);
                    let vqp = -s * phase.conj();
                    let vqq = c * phase.conj();
                    // A <- A·V on columns p, q.
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, akp * vpp + akq * vqp);
                        a.set(k, q, akp * vpq + akq * vqq);
                    }
                    // A <- V†·A on rows p, q.
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, vpp.conj() * apk + vqp.conj() * aqk);
                        a.set(q, k, vpq.conj() * apk + vqq.conj() * aqk);
                    }
                    // U <- U·V accumulates the eigenvector basis.
                    for k in 0..n {
                        let ukp = u.get(k, p);
                        let ukq = u.get(k, q);
                        u.set(k, p, ukp * vpp + ukq * vqp);
                        u.set(k, q, ukp * vpq + ukq * vqq);
                    }
                    a.set(p, q, C64::new(0.0, 0.0));
                    a.set(q, p, C64::new(0.0, 0.0));
                    let dp = a.get(p, p).re;
                    let dq = a.get(q, q).re;
                    a.set(p, p, C64::new(dp, 0.0));
                    a.set(q, q, C64::new(dq, 0.0));
                }
            }
        }
        let mut idx: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|j| a.get(j, j).re).collect();
        idx.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
        let values = idx.iter().map(|&i| diag[i]).collect();
        let mut vecs = ComplexMatrix::zeros(n, n);
        for (col, &i) in idx.iter().enumerate() {
            for k in 0..n {
                vecs.set(k, col, u.get(k, i));
            }
        }
        (values, vecs)
    }

    /// Positive semidefiniteness with a scale-aware cutoff: true iff the
    /// minimum eigenvalue is at least `-tol·(1 + max-abs-entry)`.
    pub fn is_psd(&self, tol: f64) -> bool {
        assert!(tol >= 0.0, "tolerance must be non-negative");
        self.min_eigenvalue() >= -tol * (1.0 + self.max_abs())
    }

    /// Unique PSD square root, by eigendecomposition with negative
    /// eigenvalues within tolerance clamped to zero.
    ///
    /// Fails with [`Error::NotPsd`] if the minimum eigenvalue is below
    /// `-PSD_TOL·(1 + max-abs-entry)`.
    pub fn sqrt_psd(&self) -> Result<Self> {
        let (vals, u) = self.eigh();
        let floor = -PSD_TOL * (1.0 + self.max_abs());
        if vals[0] < floor {
            return Err(Error::NotPsd(vals[0]));
        }
        let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
        let s = u
            .mul(&ComplexMatrix::diagonal(
                &roots.iter().map(|&r| C64::new(r, 0.0)).collect::<Vec<_>>(),
            ))
            .mul(&u.adjoint());
        Ok(Self::symmetrized(&s))
    }

    /// Inverse of a well-conditioned Hermitian matrix.
    ///
    /// Fails with [`Error::Singular`] when
    /// `|det| <= 1e-12·(1 + max-abs-entry)^dim`.
    pub fn inverse(&self) -> Result<Self> {
        let threshold = 1e-12 * (1.0 + self.max_abs()).powi(self.dim as i32);
        if self.det().abs() <= threshold {
            return Err(Error::Singular);
        }
        match self.dim {
            2 => {
                let det = self.det();
                let a = self.get(0, 0).re;
                let d = self.get(1, 1).re;
                let b = self.get(0, 1);
                Ok(Self::from_upper(2, |j, k| match (j, k) {
                    (0, 0) => C64::new(d / det, 0.0),
                    (0, 1) => -b / det,
                    _ => C64::new(a / det, 0.0),
                }))
            }
            _ => {
                let inv = self.to_complex().inverse().ok_or(Error::Singular)?;
                Ok(Self::symmetrized(&inv))
            }
        }
    }

    /// 2×2 block at block coordinates `(bi, bj)` of a 4×4 matrix.
    pub fn block(&self, bi: usize, bj: usize) -> ComplexMatrix {
        assert_eq!(self.dim, 4, "block extraction is for 4x4 matrices");
        let mut out = ComplexMatrix::zeros(2, 2);
        for r in 0..2 {
            for c in 0..2 {
                out.set(r, c, self.get(2 * bi + r, 2 * bj + c));
            }
        }
        out
    }

    /// Diagonal 2×2 block (`which` in {0, 1}) as a Hermitian matrix.
    pub fn diag_block(&self, which: usize) -> Self {
        let b = self.block(which, which);
        Self::symmetrized(&b)
    }

    /// Assembles a 4×4 matrix from 2×2 blocks: diagonal Hermitian blocks
    /// `g1`, `g2` and upper-right block `w` (lower-left becomes `w†`).
    pub fn from_blocks(g1: &Self, g2: &Self, w: &ComplexMatrix) -> Self {
        assert!(g1.dim == 2 && g2.dim == 2 && w.rows() == 2 && w.cols() == 2);
        Self::from_upper(4, |j, k| match (j / 2, k / 2) {
            (0, 0) => g1.get(j, k),
            (1, 1) => g2.get(j - 2, k - 2),
            (0, 1) => w.get(j, k - 2),
            _ => unreachable!("from_upper only visits the upper triangle"),
        })
    }

    /// Schur complement of the lower-right block of a 4×4 Hermitian matrix:
    /// `M11 - M12·M22⁻¹·M21`.
    ///
    /// Fails with [`Error::Singular`] if `M22` is not invertible.
    pub fn schur_complement_upper(&self) -> Result<Self> {
        assert_eq!(self.dim, 4, "Schur complement is defined on 4x4 matrices");
        let m11 = self.diag_block(0);
        let m12 = self.block(0, 1);
        let m22 = self.diag_block(1);
        let m22_inv = m22.inverse()?;
        let prod = m12.mul(&m22_inv.to_complex()).mul(&m12.adjoint());
        Ok(Self::from_upper(2, |j, k| m11.get(j, k) - prod.get(j, k)))
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `v / ‖v‖`; panics on the zero vector.
pub fn vec_normalized(v: &[C64]) -> Vec<C64> {
    let n = vec_norm(v);
    assert!(n > 0.0, "cannot normalize the zero vector");
    v.iter().map(|z| z / n).collect()
}

/// Fixes the global phase so the first component of modulus above
/// `1e-12·‖v‖` is real and positive. Makes eigenvector output reproducible.
pub fn fix_phase(v: &[C64]) -> Vec<C64> {
    let n = vec_norm(v);
    let pivot = v.iter().find(|z| z.norm() > 1e-12 * n);
    match pivot {
        Some(z) => {
            let ph = z.conj() / z.norm();
            v.iter().map(|x| x * ph).collect()
        }
        None => v.to_vec(),
    }
}
