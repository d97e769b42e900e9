//! Dense complex linear algebra shared by all modules.
//!
//! Everything here is a pure function of its inputs; matrices are plain dense
//! `nalgebra` storage and may be shared read-only across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;

/// Local dimensions of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub d_a: usize,
    pub d_b: usize,
}

impl Bipartition {
    pub fn new(d_a: usize, d_b: usize) -> Self {
        assert!(d_a > 0 && d_b > 0, "local dimensions must be positive");
        Bipartition { d_a, d_b }
    }

    pub fn total(&self) -> usize {
        self.d_a * self.d_b
    }

    /// Row-major composite index of |i⟩⊗|j⟩.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.d_b + j
    }

    pub fn swapped(&self) -> Bipartition {
        Bipartition {
            d_a: self.d_b,
            d_b: self.d_a,
        }
    }
}

/// Which local subsystem an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// A Hermitian, trace-one state together with its bipartition.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub mat: CMat,
    pub dims: Bipartition,
}

impl DensityMatrix {
    pub fn new(mat: CMat, dims: Bipartition) -> Self {
        assert_eq!(mat.nrows(), dims.total(), "dimension mismatch");
        assert_eq!(mat.ncols(), dims.total(), "dimension mismatch");
        DensityMatrix { mat, dims }
    }

    pub fn dim(&self) -> usize {
        self.dims.total()
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn partial_transpose(&self, side: Side) -> CMat {
        partial_transpose(&self.mat, self.dims, side)
    }

    /// Smallest eigenvalue of the partial transpose.
    pub fn min_pt_eigenvalue(&self) -> f64 {
        let pt = self.partial_transpose(Side::B);
        let (evals, _) = herm_eig(&pt).expect("partial transpose of Hermitian is Hermitian");
        evals[0]
    }
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero vector")]
    ZeroVector,
}

/// Kronecker product with row-major index convention index(i₁,i₂) = i₁·dim₂ + i₂.
pub fn tensor(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let rows = ra.checked_mul(rb).expect("tensor dimension overflow");
    let cols = ca.checked_mul(cb).expect("tensor dimension overflow");
    let mut out = CMat::zeros(rows, cols);
    for i1 in 0..ra {
        for j1 in 0..ca {
            let v = a[(i1, j1)];
            if v == C64::default() {
                continue;
            }
            for i2 in 0..rb {
                for j2 in 0..cb {
                    out[(i1 * rb + i2, j1 * cb + j2)] = v * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// Partial transpose of a bipartite operator: ⟨ij|Mᵀᴮ|kl⟩ = ⟨il|M|kj⟩.
pub fn partial_transpose(m: &CMat, p: Bipartition, side: Side) -> CMat {
    assert_eq!(m.nrows(), p.total(), "dimension mismatch");
    assert_eq!(m.ncols(), p.total(), "dimension mismatch");
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for i in 0..p.d_a {
        for j in 0..p.d_b {
            for k in 0..p.d_a {
                for l in 0..p.d_b {
                    let (src_r, src_c) = match side {
                        Side::B => (p.index(i, l), p.index(k, j)),
                        Side::A => (p.index(k, j), p.index(i, l)),
                    };
                    out[(p.index(i, j), p.index(k, l))] = m[(src_r, src_c)];
                }
            }
        }
    }
    out
}

/// Reorders the tensor factors of a multipartite operator.
///
/// `dims[s]` is the dimension of subsystem `s` in the current row-major
/// ordering; `perm[t] = s` places old subsystem `s` at new position `t`.
pub fn permute_systems(m: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total);
    assert_eq!(m.ncols(), total);
    assert_eq!(dims.len(), perm.len());
    let n = dims.len();
    let new_dims: Vec<usize> = perm.iter().map(|&s| dims[s]).collect();
    // strides in the old ordering
    let mut strides = vec![1usize; n];
    for s in (0..n - 1).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    // map each new composite index to the old one
    let mut index_map = vec![0usize; total];
    for (new_idx, old_slot) in index_map.iter_mut().enumerate() {
        let mut rem = new_idx;
        let mut old = 0usize;
        for t in 0..n {
            let block: usize = new_dims[t + 1..].iter().product();
            let digit = rem / block;
            rem %= block;
            old += digit * strides[perm[t]];
        }
        *old_slot = old;
    }
    let mut out = CMat::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(r, c)] = m[(index_map[r], index_map[c])];
        }
    }
    out
}

fn hermiticity_deviation(m: &CMat) -> f64 {
    let mut max = 0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > max {
                max = d;
            }
        }
    }
    max
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvector columns. Output is deterministic: each
/// eigenvector is phase-fixed so its largest-magnitude entry is real positive.
pub fn herm_eig(m: &CMat) -> Result<(Vec<f64>, CMat), LinalgError> {
    let scale = m.iter().map(|c| c.norm()).fold(0f64, f64::max).max(1.0);
    let dev = hermiticity_deviation(m);
    if dev > 1e-10 * scale.max(1.0) {
        return Err(LinalgError::NotHermitian(dev));
    }
    let n = m.nrows();
    // symmetrize to suppress roundoff before factorizing
    let h = (m + m.adjoint()).scale(0.5);
    let se = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let mut evals = Vec::with_capacity(n);
    let mut evecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        evals.push(se.eigenvalues[src]);
        let col = se.eigenvectors.column(src);
        // phase fix
        let mut best = 0usize;
        let mut best_mag = 0f64;
        for (i, v) in col.iter().enumerate() {
            if v.norm() > best_mag + 1e-14 {
                best_mag = v.norm();
                best = i;
            }
        }
        let phase = if best_mag > 0.0 {
            col[best].conj() / C64::new(best_mag, 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            evecs[(i, dst)] = col[i] * phase;
        }
    }
    Ok((evals, evecs))
}

/// Number of singular values above `tol` times the largest.
pub fn numeric_rank(m: &CMat, tol: f64) -> usize {
    assert!(tol > 0.0, "tolerance must be positive");
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > tol * smax).count()
}

/// Schmidt rank of a bipartite vector: rank of its d_A×d_B reshaping.
pub fn schmidt_rank(v: &CVec, p: Bipartition, tol: f64) -> Result<usize, LinalgError> {
    if v.len() != p.total() {
        return Err(LinalgError::DimensionMismatch(format!(
            "vector length {} vs bipartition {}",
            v.len(),
            p.total()
        )));
    }
    if v.norm() == 0.0 {
        return Err(LinalgError::ZeroVector);
    }
    let mut m = CMat::zeros(p.d_a, p.d_b);
    for i in 0..p.d_a {
        for j in 0..p.d_b {
            m[(i, j)] = v[p.index(i, j)];
        }
    }
    Ok(numeric_rank(&m, tol))
}

/// |i⟩ basis vector.
pub fn basis_vec(dim: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Projector Σ|vᵢ⟩⟨vᵢ| onto the span of the given orthonormal columns.
pub fn projector_from_columns(cols: &CMat) -> CMat {
    cols * cols.adjoint()
}

pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius inner product ⟨A, B⟩ = tr(A†B).
pub fn frobenius_inner(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::default();
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_identities() {
        let i2 = CMat::identity(2, 2);
        let i3 = CMat::identity(3, 3);
        let t = tensor(&i2, &i3);
        assert_eq!(t, CMat::identity(6, 6));
    }

    #[test]
    fn tensor_rank_one_projectors() {
        // |0⟩⟨0| ⊗ |1⟩⟨1| is the projector onto index 1 of a 4-dim space
        let mut p0 = CMat::zeros(2, 2);
        p0[(0, 0)] = c(1.0, 0.0);
        let mut p1 = CMat::zeros(2, 2);
        p1[(1, 1)] = c(1.0, 0.0);
        let t = tensor(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_eq!(t[(i, j)], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn bell_state_partial_transpose_is_half_swap() {
        // |Φ⁺⟩⟨Φ⁺| on 2×2: PT equals SWAP/2 with minimum eigenvalue −1/2.
        let p = Bipartition::new(2, 2);
        let mut rho = CMat::zeros(4, 4);
        for &r in &[0usize, 3] {
            for &cc in &[0usize, 3] {
                rho[(r, cc)] = c(0.5, 0.0);
            }
        }
        let pt = partial_transpose(&rho, p, Side::B);
        // SWAP/2 oracle from the 4×4 hand computation
        let mut swap_half = CMat::zeros(4, 4);
        swap_half[(0, 0)] = c(0.5, 0.0);
        swap_half[(3, 3)] = c(0.5, 0.0);
        swap_half[(1, 2)] = c(0.5, 0.0);
        swap_half[(2, 1)] = c(0.5, 0.0);
        assert!(frobenius_norm(&(pt.clone() - swap_half)) < 1e-15);
        let (ev, _) = herm_eig(&pt).unwrap();
        assert!((ev[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn herm_eig_diagonal() {
        let mut m = CMat::zeros(3, 3);
        m[(0, 0)] = c(3.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(2, 2)] = c(2.0, 0.0);
        let (ev, _) = herm_eig(&m).unwrap();
        assert_eq!(ev.len(), 3);
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!((ev[1] - 2.0).abs() < 1e-14);
        assert!((ev[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(herm_eig(&m).is_err());
    }

    #[test]
    fn numeric_rank_zero_matrix() {
        let m = CMat::zeros(4, 4);
        assert_eq!(numeric_rank(&m, 1e-9), 0);
    }

    #[test]
    fn schmidt_ranks() {
        let p = Bipartition::new(2, 2);
        let v = basis_vec(4, 0); // |00⟩
        assert_eq!(schmidt_rank(&v, p, 1e-9).unwrap(), 1);
        let mut bell = CVec::zeros(4);
        bell[0] = c(1.0, 0.0);
        bell[3] = c(1.0, 0.0);
        assert_eq!(schmidt_rank(&bell, p, 1e-9).unwrap(), 2);
        // |02⟩+|11⟩+|20⟩ on 3×3 has rank 3
        let p3 = Bipartition::new(3, 3);
        let mut v3 = CVec::zeros(9);
        v3[p3.index(0, 2)] = c(1.0, 0.0);
        v3[p3.index(1, 1)] = c(1.0, 0.0);
        v3[p3.index(2, 0)] = c(1.0, 0.0);
        assert_eq!(schmidt_rank(&v3, p3, 1e-9).unwrap(), 3);
        assert!(schmidt_rank(&CVec::zeros(4), p, 1e-9).is_err());
    }

    #[test]
    fn permute_systems_swaps_factors() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = c(1.0, 2.0);
        let b = CMat::identity(3, 3);
        let ab = tensor(&a, &b);
        let ba = tensor(&b, &a);
        let perm = permute_systems(&ab, &[2, 3], &[1, 0]);
        assert!(frobenius_norm(&(perm - ba)) < 1e-15);
    }
}
