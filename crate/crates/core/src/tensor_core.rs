//! Dense complex linear algebra: tensor products, spectral decompositions,
//! subspace arithmetic, orthogonal projections and the parallel sum.
//!
//! All decompositions are dense; rank decisions threshold singular values at
//! `tol * sigma_max`. Frames are given a deterministic orientation (first
//! significant entry of each column made real positive) so emitted bases are
//! reproducible.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::CoreError;

pub type C64 = Complex<f64>;

/// Default relative threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Entrywise complex conjugation in the standard basis; the antilinear
/// involution J used to pair creation and annihilation operators.
#[derive(Clone, Copy, Debug, Default)]
pub struct RealStructure;

impl RealStructure {
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        v.iter().map(|z| z.conj()).collect()
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        m.conj()
    }
}

/// Dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, CoreError> {
        if data.len() != rows * cols {
            return Err(CoreError::DimMismatch {
                expected: rows * cols,
                got: data.len(),
                what: "CMatrix::new entry count",
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::InvalidSpec(alloc::string::String::from(
                "non-finite matrix entry",
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn col_vec(v: &[C64]) -> Self {
        CMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn from_cols(rows: usize, cols: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        if self.rows * self.cols * rhs.cols >= 32_768 {
            return self.mul_gemm(rhs);
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows * rhs.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(brow.iter()) {
                    *o += a * b;
                }
            }
        }
        CMatrix { rows: self.rows, cols: rhs.cols, data: out }
    }

    /// Complex product via four real gemms.
    fn mul_gemm(&self, rhs: &CMatrix) -> CMatrix {
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let split = |mat: &CMatrix| -> (Vec<f64>, Vec<f64>) {
            let mut re = Vec::with_capacity(mat.data.len());
            let mut im = Vec::with_capacity(mat.data.len());
            for z in &mat.data {
                re.push(z.re);
                im.push(z.im);
            }
            (re, im)
        };
        let (ar, ai) = split(self);
        let (br, bi) = split(rhs);
        let mut cr = vec![0.0f64; m * n];
        let mut ci = vec![0.0f64; m * n];
        let gemm = |alpha: f64, a: &[f64], b: &[f64], beta: f64, c: &mut [f64]| unsafe {
            matrixmultiply::dgemm(
                m, k, n, alpha,
                a.as_ptr(), k as isize, 1,
                b.as_ptr(), n as isize, 1,
                beta,
                c.as_mut_ptr(), n as isize, 1,
            )
        };
        gemm(1.0, &ar, &br, 0.0, &mut cr);
        gemm(-1.0, &ai, &bi, 1.0, &mut cr);
        gemm(1.0, &ar, &bi, 0.0, &mut ci);
        gemm(1.0, &ai, &br, 1.0, &mut ci);
        let data = cr.into_iter().zip(ci).map(|(re, im)| C64::new(re, im)).collect();
        CMatrix { rows: m, cols: n, data }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = C64::new(0.0, 0.0);
            for (&a, &x) in row.iter().zip(v.iter()) {
                acc += a * x;
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn conj(&self) -> CMatrix {
        let data = self.data.iter().map(|z| z.conj()).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn norm_fro(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Operator (spectral) norm, via the Gram matrix.
    pub fn op_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        // Work with the smaller Gram matrix.
        let g = if self.rows >= self.cols {
            self.adjoint().mul(self)
        } else {
            self.mul(&self.adjoint())
        };
        let (vals, _) = eigh(&g);
        let top = vals.last().copied().unwrap_or(0.0).max(0.0);
        libm::sqrt(top)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn hstack(blocks: &[&CMatrix]) -> CMatrix {
        assert!(!blocks.is_empty());
        let rows = blocks[0].rows;
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for r in 0..rows {
                for c in 0..b.cols {
                    out.set(r, off + c, b.get(r, c));
                }
            }
            off += b.cols;
        }
        out
    }

    pub fn vstack(blocks: &[&CMatrix]) -> CMatrix {
        assert!(!blocks.is_empty());
        let cols = blocks[0].cols;
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack col mismatch");
            for r in 0..b.rows {
                for c in 0..cols {
                    out.set(off + r, c, b.get(r, c));
                }
            }
            off += b.rows;
        }
        out
    }

    fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c))
    }
}

/// Kronecker product with lexicographic index order.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, CoreError> {
    let rows = a.rows.checked_mul(b.rows).ok_or(CoreError::SizeOverflow { what: "kron rows" })?;
    let cols = a.cols.checked_mul(b.cols).ok_or(CoreError::SizeOverflow { what: "kron cols" })?;
    rows.checked_mul(cols).ok_or(CoreError::SizeOverflow { what: "kron entries" })?;
    let mut out = CMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let av = a.get(ar, ac);
            if av.re == 0.0 && av.im == 0.0 {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out.set(ar * b.rows + br, ac * b.cols + bc, av * b.get(br, bc));
                }
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending, columns of
/// the returned matrix are the matching orthonormal eigenvectors.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows;
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    // Hermitize defensively so roundoff asymmetry cannot leak in.
    let h = a.add(&a.adjoint()).scale(C64::new(0.5, 0.0));
    let se = nalgebra::SymmetricEigen::new(h.to_dmatrix());
    let vecs = CMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, c)]);
    // The library solver only reaches ~1e-8 reconstruction accuracy on some
    // inputs; polish with Jacobi rotations on the nearly diagonal V* H V.
    let (vals, vecs) = jacobi_polish(&h, vecs);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let sorted_vals: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = CMatrix::from_fn(n, n, |r, c| vecs.get(r, idx[c]));
    (sorted_vals, orient_columns(&sorted_vecs))
}

/// One-sided Jacobi refinement of an approximate Hermitian eigenbasis:
/// diagonalizes B = V* A V (nearly diagonal already) by cyclic complex
/// Jacobi rotations and accumulates them into V. Converges quadratically
/// from the library solver's output.
fn jacobi_polish(a: &CMatrix, v0: CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.rows();
    let mut b = v0.adjoint().mul(a).mul(&v0);
    let mut v = v0;
    let scale = (0..n)
        .map(|i| libm::fabs(b.get(i, i).re))
        .fold(1e-300, f64::max);
    let threshold = scale * 1e-15 * (n as f64).max(1.0);
    for _sweep in 0..20 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(b.get(p, q).norm());
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let beta = b.get(p, q);
                let bn = beta.norm();
                if bn <= threshold {
                    continue;
                }
                let alpha = b.get(p, p).re;
                let gamma = b.get(q, q).re;
                // phase factor realifying the 2x2 block, then a real rotation
                let u = beta / bn;
                let tau = (gamma - alpha) / (2.0 * bn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                // unitary U = diag(1, u) * [[c, s], [-s, c]] on columns (p, q)
                let u00 = C64::new(c, 0.0);
                let u01 = C64::new(s, 0.0);
                let u10 = -u * s;
                let u11 = u * c;
                for i in 0..n {
                    let bip = b.get(i, p);
                    let biq = b.get(i, q);
                    b.set(i, p, bip * u00 + biq * u10);
                    b.set(i, q, bip * u01 + biq * u11);
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * u00 + viq * u10);
                    v.set(i, q, vip * u01 + viq * u11);
                }
                for j in 0..n {
                    let bpj = b.get(p, j);
                    let bqj = b.get(q, j);
                    b.set(p, j, bpj * u00.conj() + bqj * u10.conj());
                    b.set(q, j, bpj * u01.conj() + bqj * u11.conj());
                }
                b.set(p, q, C64::new(0.0, 0.0));
                b.set(q, p, C64::new(0.0, 0.0));
                let bpp = b.get(p, p);
                let bqq = b.get(q, q);
                b.set(p, p, C64::new(bpp.re, 0.0));
                b.set(q, q, C64::new(bqq.re, 0.0));
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| b.get(i, i).re).collect();
    (vals, v)
}

/// Make the first significant entry of each column real positive.
pub fn orient_columns(m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    for c in 0..m.cols() {
        let mut pivot = None;
        for r in 0..m.rows() {
            if m.get(r, c).norm() > 1e-8 {
                pivot = Some(m.get(r, c));
                break;
            }
        }
        if let Some(p) = pivot {
            let phase = p / p.norm();
            let fix = phase.conj();
            for r in 0..m.rows() {
                out.set(r, c, m.get(r, c) * fix);
            }
        }
    }
    out
}

/// Orthonormal column frame spanning a subspace of an ambient space.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub frame: CMatrix,
    pub tol: f64,
}

impl Subspace {
    pub fn new(frame: CMatrix, tol: f64) -> Result<Self, CoreError> {
        let ambient_dim = frame.rows();
        if frame.cols() > ambient_dim {
            return Err(CoreError::DimMismatch {
                expected: ambient_dim,
                got: frame.cols(),
                what: "Subspace frame width",
            });
        }
        let gram = frame.adjoint().mul(&frame);
        let res = gram.sub(&CMatrix::identity(frame.cols())).op_norm();
        if res > 10.0 * tol.max(1e-12) {
            return Err(CoreError::AlgorithmMismatch { what: "frame orthonormality", residual: res });
        }
        Ok(Subspace { ambient_dim, frame, tol })
    }

    pub fn dim(&self) -> usize {
        self.frame.cols()
    }

    pub fn projector(&self) -> CMatrix {
        if self.dim() == 0 {
            return CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        }
        self.frame.mul(&self.frame.adjoint())
    }
}

struct GramSvd {
    sigmas: Vec<f64>,   // descending
    v: CMatrix,         // right singular vectors, columns matching sigmas
}

fn gram_svd(a: &CMatrix) -> GramSvd {
    let g = a.adjoint().mul(a);
    let (vals, vecs) = eigh(&g);
    let n = vals.len();
    let mut sigmas = Vec::with_capacity(n);
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let i = n - 1 - k; // descending
        sigmas.push(libm::sqrt(vals[i].max(0.0)));
        cols.push(vecs.column(i));
    }
    // One Gram pass squares the condition number, so singular values near
    // zero surface at ~sqrt(eps)*sigma_max. Re-resolve the small cluster on
    // its own invariant subspace, where the squaring is harmless.
    let smax = sigmas.first().copied().unwrap_or(0.0);
    let split = 1e-5 * smax;
    let k0 = sigmas.iter().position(|&s| s <= split).unwrap_or(n);
    if k0 < n && smax > 0.0 {
        let vsmall = CMatrix::from_cols(a.cols(), &cols[k0..]);
        let b = a.mul(&vsmall);
        let g2 = b.adjoint().mul(&b);
        let (vals2, w) = eigh(&g2);
        let refined = vsmall.mul(&w);
        let m = vals2.len();
        for k in 0..m {
            let i = m - 1 - k;
            sigmas[k0 + k] = libm::sqrt(vals2[i].max(0.0));
            cols[k0 + k] = refined.column(i);
        }
    }
    GramSvd { sigmas, v: CMatrix::from_cols(a.cols(), &cols) }
}

/// Orthonormal basis of the numerical kernel of `a`.
pub fn kernel_basis(a: &CMatrix, tol: f64) -> Subspace {
    let smax = gram_svd(a).sigmas.first().copied().unwrap_or(0.0);
    kernel_basis_abs(a, tol * smax)
}

/// Kernel with an absolute singular-value cutoff; needed when the matrix
/// itself may be numerically zero (relative thresholds degenerate there).
pub fn kernel_basis_abs(a: &CMatrix, cutoff: f64) -> Subspace {
    let s = gram_svd(a);
    let smax = s.sigmas.first().copied().unwrap_or(0.0);
    let cols: Vec<Vec<C64>> = (0..s.sigmas.len())
        .filter(|&i| s.sigmas[i] <= cutoff || smax == 0.0)
        .map(|i| s.v.column(i))
        .collect();
    let frame = orient_columns(&CMatrix::from_cols(a.cols(), &cols));
    Subspace { ambient_dim: a.cols(), frame, tol: cutoff }
}

/// Orthonormal basis of the numerical column space of `a`.
pub fn range_basis(a: &CMatrix, tol: f64) -> Subspace {
    let s = gram_svd(a);
    let smax = s.sigmas.first().copied().unwrap_or(0.0);
    let cut = tol * smax;
    let mut cols: Vec<Vec<C64>> = Vec::new();
    if smax > 0.0 {
        for i in 0..s.sigmas.len() {
            if s.sigmas[i] > cut {
                let u = a.mul_vec(&s.v.column(i));
                let inv = 1.0 / s.sigmas[i];
                cols.push(u.into_iter().map(|z| z * inv).collect());
            }
        }
    }
    let frame = orient_columns(&CMatrix::from_cols(a.rows(), &cols));
    Subspace { ambient_dim: a.rows(), frame, tol }
}

/// Moore-Penrose inverse of a Hermitian matrix.
pub fn hermitian_pinv(a: &CMatrix, tol: f64) -> CMatrix {
    let (vals, vecs) = eigh(a);
    let top = vals.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
    let n = a.rows();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        if libm::fabs(vals[k]) > tol * top && top > 0.0 {
            let col = vecs.column(k);
            let inv = 1.0 / vals[k];
            for r in 0..n {
                for c in 0..n {
                    out.set(r, c, out.get(r, c) + col[r] * col[c].conj() * inv);
                }
            }
        }
    }
    out
}

fn projection_residual(p: &CMatrix) -> f64 {
    let idem = p.mul(p).sub(p).op_norm();
    let herm = p.sub(&p.adjoint()).op_norm();
    idem.max(herm)
}

/// Orthogonal projection onto ran(p1) n ran(p2), i.e. 2(P1:P2) where ":" is
/// the parallel sum. Computed from the kernel of the stacked matrix
/// [(1-p1); (1-p2)] and cross-checked against the Anderson-Duffin form
/// 2 p1 (p1+p2)^+ p2.
pub fn parallel_sum_projection(p1: &CMatrix, p2: &CMatrix, tol: f64) -> Result<CMatrix, CoreError> {
    if p1.rows() != p2.rows() || p1.cols() != p2.cols() || !p1.is_square() {
        return Err(CoreError::DimMismatch {
            expected: p1.rows(),
            got: p2.rows(),
            what: "parallel_sum_projection",
        });
    }
    let r1 = projection_residual(p1);
    let r2 = projection_residual(p2);
    let res = r1.max(r2);
    if res > 1e-7 {
        return Err(CoreError::NotAProjection { residual: res });
    }
    let n = p1.rows();
    let id = CMatrix::identity(n);
    // Projections have natural scale 1, so threshold absolutely: the stacked
    // matrix is numerically zero when both ranges are the whole space.
    let stacked = CMatrix::vstack(&[&id.sub(p1), &id.sub(p2)]);
    let ker = kernel_basis_abs(&stacked, 4.0 * tol.max(1e-12));
    let p = ker.projector();

    let ad = p1.mul(&hermitian_pinv(&p1.add(p2), tol.max(1e-12))).mul(p2).scale(C64::new(2.0, 0.0));
    let disagreement = p.sub(&ad).op_norm();
    if disagreement > 1e-8 {
        return Err(CoreError::AlgorithmMismatch { what: "parallel sum", residual: disagreement });
    }
    Ok(p)
}

/// Operator-norm distance between the orthogonal projectors of two subspaces.
pub fn subspace_distance(s1: &Subspace, s2: &Subspace) -> Result<f64, CoreError> {
    if s1.ambient_dim != s2.ambient_dim {
        return Err(CoreError::DimMismatch {
            expected: s1.ambient_dim,
            got: s2.ambient_dim,
            what: "subspace_distance ambient",
        });
    }
    Ok(s1.projector().sub(&s2.projector()).op_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(entries: &[f64]) -> CMatrix {
        let n = entries.len();
        CMatrix::from_fn(n, n, |r, q| if r == q { c(entries[r], 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn kron_identities() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), CMatrix::identity(4));
        let a = CMatrix::new(1, 1, vec![c(2.0, 0.0)]).unwrap();
        let b = CMatrix::new(1, 1, vec![c(3.0, 0.0)]).unwrap();
        assert_eq!(kron(&a, &b).unwrap().get(0, 0), c(6.0, 0.0));
    }

    #[test]
    fn kron_flip_block_structure() {
        let flip = CMatrix::from_fn(2, 2, |r, q| if r != q { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let k = kron(&flip, &CMatrix::identity(2)).unwrap();
        // (flip x I) e0 = e2
        let e0 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = k.mul_vec(&e0);
        assert_eq!(out[2], c(1.0, 0.0));
        assert_eq!(out[0], c(0.0, 0.0));
    }

    #[test]
    fn eigh_recovers_spectrum() {
        // Hermitian 3x3 with known action checked by residual.
        let a = CMatrix::new(
            3,
            3,
            vec![
                c(2.0, 0.0), c(0.0, 1.0), c(0.5, 0.0),
                c(0.0, -1.0), c(1.0, 0.0), c(0.0, 0.0),
                c(0.5, 0.0), c(0.0, 0.0), c(-1.0, 0.0),
            ],
        )
        .unwrap();
        let (vals, vecs) = eigh(&a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..3 {
            let v = vecs.column(k);
            let av = a.mul_vec(&v);
            let res: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - y * c(vals[k], 0.0)).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-10, "eigpair residual {res}");
        }
        let ortho = vecs.adjoint().mul(&vecs).sub(&CMatrix::identity(3)).op_norm();
        assert!(ortho < 1e-10);
    }

    #[test]
    fn kernel_and_range_of_diagonal() {
        let a = diag(&[1.0, 0.0]);
        let ker = kernel_basis(&a, 1e-9);
        assert_eq!(ker.dim(), 1);
        assert!((ker.frame.get(1, 0) - c(1.0, 0.0)).norm() < 1e-12);
        let ran = range_basis(&a, 1e-9);
        assert_eq!(ran.dim(), 1);
        assert!((ran.frame.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_matrix_has_empty_range_full_kernel() {
        let z = CMatrix::zeros(3, 3);
        assert_eq!(range_basis(&z, 1e-9).dim(), 0);
        assert_eq!(kernel_basis(&z, 1e-9).dim(), 3);
    }

    #[test]
    fn rank_nullity_orthogonality() {
        let a = CMatrix::new(
            3,
            3,
            vec![
                c(1.0, 0.5), c(2.0, 0.0), c(3.0, -1.0),
                c(2.0, 1.0), c(4.0, 0.0), c(6.0, -2.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            ],
        )
        .unwrap();
        let pk = kernel_basis(&a, 1e-9).projector();
        let pr = range_basis(&a.adjoint(), 1e-9).projector();
        let res = pk.add(&pr).sub(&CMatrix::identity(3)).op_norm();
        assert!(res < 1e-9, "rank-nullity residual {res}");
    }

    #[test]
    fn projector_of_span_e2() {
        let frame = CMatrix::from_cols(2, &[vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        let s = Subspace::new(frame, 1e-9).unwrap();
        let p = s.projector();
        assert!((p.get(1, 1) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(p.get(0, 0).norm() < 1e-12);
    }

    #[test]
    fn parallel_sum_trivial_cases() {
        let p = diag(&[1.0, 0.0, 0.0]);
        let out = parallel_sum_projection(&p, &p, 1e-9).unwrap();
        assert!(out.sub(&p).op_norm() < 1e-9);

        let q = diag(&[0.0, 1.0, 0.0]);
        let z = parallel_sum_projection(&p, &q, 1e-9).unwrap();
        assert!(z.op_norm() < 1e-9);
    }

    #[test]
    fn parallel_sum_commuting_is_product() {
        let p1 = diag(&[1.0, 1.0, 0.0]);
        let p2 = diag(&[0.0, 1.0, 1.0]);
        let out = parallel_sum_projection(&p1, &p2, 1e-9).unwrap();
        assert!(out.sub(&p1.mul(&p2)).op_norm() < 1e-9);
    }

    #[test]
    fn parallel_sum_rejects_non_projection() {
        let a = diag(&[2.0, 0.0]);
        let err = parallel_sum_projection(&a, &a, 1e-9).unwrap_err();
        assert!(matches!(err, CoreError::NotAProjection { .. }));
    }

    #[test]
    fn subspace_distance_examples() {
        let e1 = Subspace::new(CMatrix::from_cols(2, &[vec![c(1.0, 0.0), c(0.0, 0.0)]]), 1e-9).unwrap();
        let e2 = Subspace::new(CMatrix::from_cols(2, &[vec![c(0.0, 0.0), c(1.0, 0.0)]]), 1e-9).unwrap();
        assert!(subspace_distance(&e1, &e1).unwrap() < 1e-12);
        assert!((subspace_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-10);

        let s = 1.0 / 2.0f64.sqrt();
        let diagv = Subspace::new(CMatrix::from_cols(2, &[vec![c(s, 0.0), c(s, 0.0)]]), 1e-9).unwrap();
        let d = subspace_distance(&e1, &diagv).unwrap();
        assert!((d - s).abs() < 1e-10, "principal angle distance {d}");
    }

    #[test]
    fn orientation_is_deterministic() {
        let v = vec![c(0.0, -0.6), c(0.8, 0.0)];
        let m = orient_columns(&CMatrix::from_cols(2, &[v]));
        let first = m.get(0, 0);
        assert!(first.im.abs() < 1e-12 && first.re > 0.0);
    }
}
