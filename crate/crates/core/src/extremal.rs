//! Range projectors, the PPT-extremality test, and witness construction.
//!
//! A PPT state ρ is extremal in the PPT set exactly when the superoperator
//! 𝐏+𝐐, with 𝐏(σ) = PσP and 𝐐(σ) = (Qσ^{T_B}Q)^{T_B} for the range
//! projectors P of ρ and Q of ρ^{T_B}, has a nondegenerate eigenvalue 2 on
//! the real space of Hermitian matrices. The same projectors yield the
//! witness W_ρ = P + Q^{T_B} with tr(W_ρ σ) ≤ 2 on PPT states, and the
//! indecomposable witness μ𝟙 − W_ρ once μ = max over Schmidt-number-k PPT
//! states of tr(W_ρ σ) is known.

use crate::linalg::{
    frobenius_inner, frobenius_norm, herm_eig, partial_transpose, Bipartition, CMat, CVec,
    DensityMatrix, Side, C64,
};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtremalError {
    #[error("input is not PPT (min PT eigenvalue {0:.3e})")]
    NptInput(f64),
    #[error("input is not PSD (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("mu = {0} outside (0, 2): witness vacuous")]
    BadMu(f64),
    #[error("eigenvalue of P+Q exceeds 2 ({0}): projectors inconsistent")]
    SpectrumOverflow(f64),
}

/// Projectors onto the ranges of ρ and ρ^{T_B}.
#[derive(Clone, Debug)]
pub struct RangePair {
    /// Projector onto R(ρ).
    pub p: CMat,
    /// Projector onto R(ρ^{T_B}).
    pub q: CMat,
    pub dims: Bipartition,
    pub rank_p: usize,
    pub rank_q: usize,
    /// Relative spectral cutoff used to determine the ranges.
    pub tol: f64,
}

/// Spectral-cutoff construction of the range projectors of ρ and ρ^{T_B}.
pub fn range_pair(rho: &DensityMatrix, tol: f64) -> Result<RangePair, ExtremalError> {
    let (p, rank_p) = range_projector(&rho.mat, tol, true)?;
    let pt = rho.partial_transpose(Side::B);
    let (q, rank_q) = range_projector(&pt, tol, false)?;
    Ok(RangePair {
        p,
        q,
        dims: rho.dims,
        rank_p,
        rank_q,
        tol,
    })
}

/// Projector onto the span of eigenvectors with eigenvalue > tol·λ_max.
fn range_projector(m: &CMat, tol: f64, require_psd: bool) -> Result<(CMat, usize), ExtremalError> {
    let (evals, evecs) = herm_eig(m).expect("range_projector needs a Hermitian input");
    let n = m.nrows();
    let lam_max = evals[n - 1].max(0.0);
    let floor = -1e-10 * lam_max.max(1.0);
    if evals[0] < floor {
        if require_psd {
            return Err(ExtremalError::NotPsd(evals[0]));
        }
        return Err(ExtremalError::NptInput(evals[0]));
    }
    let mut proj = CMat::zeros(n, n);
    let mut rank = 0usize;
    for (k, &lam) in evals.iter().enumerate() {
        if lam > tol * lam_max {
            let col = evecs.column(k);
            proj += col * col.adjoint();
            rank += 1;
        }
    }
    Ok((proj, rank))
}

/// One application of the superoperator 𝐏+𝐐 to a Hermitian matrix.
pub fn apply_pq(rp: &RangePair, sigma: &CMat) -> CMat {
    let p_part = &rp.p * sigma * &rp.p;
    let st = partial_transpose(sigma, rp.dims, Side::B);
    let q_part = partial_transpose(&(&rp.q * st * &rp.q), rp.dims, Side::B);
    p_part + q_part
}

/// Outcome of the extremality test.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremalityVerdict {
    /// Dimension count of the eigenvalue-2 eigenspace of 𝐏+𝐐.
    pub multiplicity_of_2: usize,
    /// 2 minus the largest eigenvalue strictly below the eigenvalue-2 cluster.
    pub second_eigenvalue_gap: f64,
    pub is_extremal: bool,
    /// Largest eigenvalue found (must be ≤ 2 up to roundoff).
    pub max_eigenvalue: f64,
    /// |⟨v, ρ⟩|/‖ρ‖ for the unique eigenvalue-2 vector when multiplicity is 1.
    pub rho_alignment: Option<f64>,
    /// "dense" or "lanczos".
    pub method: String,
}

/// Tunables for the extremality test.
#[derive(Clone, Copy, Debug)]
pub struct ExtremalityConfig {
    /// Relative spectral cutoff for the range projectors.
    pub rank_tol: f64,
    /// |λ − 2| below this counts as eigenvalue 2.
    pub eig_tol: f64,
    /// Total dimension above which the dense d²×d² eigenproblem is replaced
    /// by deflated Lanczos iteration.
    pub dense_limit: usize,
    /// Krylov length per Lanczos sweep.
    pub lanczos_steps: usize,
    pub seed: u64,
}

impl Default for ExtremalityConfig {
    fn default() -> Self {
        ExtremalityConfig {
            rank_tol: 1e-8,
            eig_tol: 1e-7,
            dense_limit: 40,
            lanczos_steps: 160,
            seed: 7,
        }
    }
}

/// Tests whether a PPT state is extremal in the PPT set.
pub fn extremality_test(rho: &DensityMatrix, tol: f64) -> Result<ExtremalityVerdict, ExtremalError> {
    let cfg = ExtremalityConfig {
        rank_tol: tol,
        ..ExtremalityConfig::default()
    };
    extremality_test_cfg(rho, &cfg)
}

/// Extremality test with explicit configuration.
pub fn extremality_test_cfg(
    rho: &DensityMatrix,
    cfg: &ExtremalityConfig,
) -> Result<ExtremalityVerdict, ExtremalError> {
    let min_pt = rho.min_pt_eigenvalue();
    if min_pt < -1e-8 {
        return Err(ExtremalError::NptInput(min_pt));
    }
    let rp = range_pair(rho, cfg.rank_tol)?;
    if rho.dim() <= cfg.dense_limit {
        dense_multiplicity(rho, &rp, cfg)
    } else {
        lanczos_multiplicity(rho, &rp, cfg)
    }
}

/// Enumeration of the orthonormal Hermitian basis {E_ii, (E_ij+E_ji)/√2,
/// i(E_ij−E_ji)/√2}.
enum HermBasisElem {
    Diag(usize),
    Sym(usize, usize),
    Asym(usize, usize),
}

fn herm_basis(d: usize) -> Vec<HermBasisElem> {
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        v.push(HermBasisElem::Diag(i));
    }
    for i in 0..d {
        for j in i + 1..d {
            v.push(HermBasisElem::Sym(i, j));
            v.push(HermBasisElem::Asym(i, j));
        }
    }
    v
}

fn basis_matrix(d: usize, e: &HermBasisElem) -> CMat {
    let mut m = CMat::zeros(d, d);
    let s = 1.0 / 2f64.sqrt();
    match *e {
        HermBasisElem::Diag(i) => m[(i, i)] = C64::new(1.0, 0.0),
        HermBasisElem::Sym(i, j) => {
            m[(i, j)] = C64::new(s, 0.0);
            m[(j, i)] = C64::new(s, 0.0);
        }
        HermBasisElem::Asym(i, j) => {
            m[(i, j)] = C64::new(0.0, s);
            m[(j, i)] = C64::new(0.0, -s);
        }
    }
    m
}

/// Coordinates of a Hermitian matrix in the orthonormal basis above.
fn herm_coords(m: &CMat, basis: &[HermBasisElem]) -> Vec<f64> {
    let r = 2f64.sqrt();
    basis
        .iter()
        .map(|e| match *e {
            HermBasisElem::Diag(i) => m[(i, i)].re,
            HermBasisElem::Sym(i, j) => r * m[(i, j)].re,
            HermBasisElem::Asym(i, j) => r * m[(i, j)].im,
        })
        .collect()
}

fn herm_from_coords(d: usize, coords: &[f64], basis: &[HermBasisElem]) -> CMat {
    let mut m = CMat::zeros(d, d);
    let s = 1.0 / 2f64.sqrt();
    for (c, e) in coords.iter().zip(basis.iter()) {
        match *e {
            HermBasisElem::Diag(i) => m[(i, i)] += C64::new(*c, 0.0),
            HermBasisElem::Sym(i, j) => {
                m[(i, j)] += C64::new(c * s, 0.0);
                m[(j, i)] += C64::new(c * s, 0.0);
            }
            HermBasisElem::Asym(i, j) => {
                m[(i, j)] += C64::new(0.0, c * s);
                m[(j, i)] += C64::new(0.0, -c * s);
            }
        }
    }
    m
}

/// Dense route: materialize 𝐏+𝐐 as a d²×d² real symmetric matrix.
fn dense_multiplicity(
    rho: &DensityMatrix,
    rp: &RangePair,
    cfg: &ExtremalityConfig,
) -> Result<ExtremalityVerdict, ExtremalError> {
    let d = rho.dim();
    let basis = herm_basis(d);
    let n = basis.len();
    let mut big = DMatrix::<f64>::zeros(n, n);
    for (b, e) in basis.iter().enumerate() {
        let img = apply_pq(rp, &basis_matrix(d, e));
        let col = herm_coords(&img, &basis);
        for (a, v) in col.iter().enumerate() {
            big[(a, b)] = *v;
        }
    }
    // 𝐏+𝐐 is self-adjoint; symmetrize away roundoff
    big = (&big + big.transpose()) * 0.5;
    let se = big.symmetric_eigen();
    // the QR iteration occasionally fails to converge and emits NaN; the
    // iterative route is the reliable fallback
    if se.eigenvalues.iter().any(|v| !v.is_finite()) {
        return lanczos_multiplicity(rho, rp, cfg);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let max_eig = se.eigenvalues[order[n - 1]];
    if max_eig > 2.0 + 1e-9 {
        return Err(ExtremalError::SpectrumOverflow(max_eig));
    }
    let mut multiplicity = 0usize;
    let mut gap = 2.0;
    let mut top_vec = None;
    for &k in order.iter().rev() {
        let lam = se.eigenvalues[k];
        if (lam - 2.0).abs() < cfg.eig_tol {
            multiplicity += 1;
            top_vec = Some(k);
        } else {
            gap = 2.0 - lam;
            break;
        }
    }
    let rho_alignment = if multiplicity == 1 {
        let k = top_vec.expect("multiplicity 1 implies a top vector");
        let coords: Vec<f64> = se.eigenvectors.column(k).iter().cloned().collect();
        let v = herm_from_coords(d, &coords, &basis);
        let overlap = frobenius_inner(&v, &rho.mat).norm();
        Some(overlap / (frobenius_norm(&v) * frobenius_norm(&rho.mat)))
    } else {
        None
    };
    Ok(ExtremalityVerdict {
        multiplicity_of_2: multiplicity,
        second_eigenvalue_gap: gap,
        is_extremal: multiplicity == 1,
        max_eigenvalue: max_eig,
        rho_alignment,
        method: "dense".into(),
    })
}

fn herm_inner(a: &CMat, b: &CMat) -> f64 {
    frobenius_inner(a, b).re
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = C64::new(re, im);
        }
    }
    (&m + m.adjoint()).scale(0.5)
}

/// Largest eigenpair of 𝐏+𝐐 restricted to the Frobenius-orthogonal
/// complement of `deflate`, via Lanczos with full reorthogonalization.
fn lanczos_top(
    rp: &RangePair,
    deflate: &[CMat],
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, CMat) {
    let d = rp.p.nrows();
    // 𝐏+𝐐 is complex-linear, so iρ is an eigenvalue-2 vector in the
    // anti-Hermitian subspace; re-Hermitizing after every application keeps
    // roundoff from leaking the iteration onto it.
    let project_out = |m: &mut CMat| {
        *m = (&*m + m.adjoint()).scale(0.5);
        for w in deflate {
            let c = herm_inner(w, m);
            *m -= w.scale(c);
        }
    };
    let mut v = random_hermitian(d, rng);
    project_out(&mut v);
    let nv = frobenius_norm(&v);
    v = v.scale(1.0 / nv);
    let mut vs: Vec<CMat> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    for k in 0..steps {
        let mut w = apply_pq(rp, &vs[k]);
        project_out(&mut w);
        let alpha = herm_inner(&w, &vs[k]);
        alphas.push(alpha);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for u in &vs {
                let c = herm_inner(u, &w);
                w -= u.scale(c);
            }
            project_out(&mut w);
        }
        let beta = frobenius_norm(&w);
        if beta < 1e-12 {
            break;
        }
        betas.push(beta);
        vs.push(w.scale(1.0 / beta));
    }
    let m = alphas.len();
    let mut tri = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        tri[(k, k)] = alphas[k];
        if k + 1 < m {
            tri[(k, k + 1)] = betas[k];
            tri[(k + 1, k)] = betas[k];
        }
    }
    let se = tri.symmetric_eigen();
    let mut best = 0usize;
    for k in 1..m {
        if se.eigenvalues[k] > se.eigenvalues[best] {
            best = k;
        }
    }
    let lam = se.eigenvalues[best];
    let mut ritz = CMat::zeros(d, d);
    for k in 0..m {
        ritz += vs[k].scale(se.eigenvectors[(k, best)]);
    }
    let nr = frobenius_norm(&ritz);
    (lam, ritz.scale(1.0 / nr))
}

/// Iterative route: deflate ρ, then peel converged eigenvalue-2 vectors one
/// at a time until the top of the remaining spectrum drops below 2.
fn lanczos_multiplicity(
    rho: &DensityMatrix,
    rp: &RangePair,
    cfg: &ExtremalityConfig,
) -> Result<ExtremalityVerdict, ExtremalError> {
    // ρ itself must be fixed by 𝐏+𝐐 (scaled by 2)
    let lro = apply_pq(rp, &rho.mat);
    let fixed_residual =
        frobenius_norm(&(lro - rho.mat.scale(2.0))) / frobenius_norm(&rho.mat).max(1e-300);
    if fixed_residual > 1e-8 {
        return Err(ExtremalError::SpectrumOverflow(2.0 + fixed_residual));
    }
    let rho_hat = rho.mat.scale(1.0 / frobenius_norm(&rho.mat));
    let mut deflate = vec![rho_hat];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut multiplicity = 1usize;
    let mut gap = 2.0;
    let mut max_eig = 2.0f64;
    for _ in 0..8 {
        let (lam, v) = lanczos_top(rp, &deflate, cfg.lanczos_steps, &mut rng);
        if lam > 2.0 + 1e-9 {
            return Err(ExtremalError::SpectrumOverflow(lam));
        }
        max_eig = max_eig.max(lam);
        if (lam - 2.0).abs() < cfg.eig_tol {
            multiplicity += 1;
            deflate.push(v);
        } else {
            gap = 2.0 - lam;
            break;
        }
    }
    // with multiplicity 1 the eigenspace of 2 is spanned by ρ itself
    let rho_alignment = if multiplicity == 1 {
        Some(1.0 - fixed_residual)
    } else {
        None
    };
    Ok(ExtremalityVerdict {
        multiplicity_of_2: multiplicity,
        second_eigenvalue_gap: gap,
        is_extremal: multiplicity == 1,
        max_eigenvalue: max_eig,
        rho_alignment,
        method: "lanczos".into(),
    })
}

/// Witness W_ρ = P + Q^{T_B}; tr(W_ρ σ) ≤ 2 for all PPT σ.
pub fn build_witness(rp: &RangePair) -> CMat {
    &rp.p + partial_transpose(&rp.q, rp.dims, Side::B)
}

/// Indecomposable witness μ𝟙 − W_ρ (valid once μ ≥ max over SN-k PPT states
/// of tr(W_ρ σ)).
pub fn indecomposable_witness(rp: &RangePair, mu: f64) -> Result<CMat, ExtremalError> {
    if !(mu > 0.0 && mu < 2.0) {
        return Err(ExtremalError::BadMu(mu));
    }
    let w = build_witness(rp);
    let n = w.nrows();
    Ok(CMat::identity(n, n).scale(mu) - w)
}

/// Random separable (hence PPT) state: a mixture of `terms` Haar-ish random
/// product pure states with uniform random weights.
pub fn random_separable_state(p: Bipartition, terms: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    assert!(terms >= 1);
    let total = p.total();
    let mut acc = CMat::zeros(total, total);
    for _ in 0..terms {
        let x = random_unit_vector(p.d_a, rng);
        let y = random_unit_vector(p.d_b, rng);
        let mut xy = CVec::zeros(total);
        for i in 0..p.d_a {
            for j in 0..p.d_b {
                xy[p.index(i, j)] = x[i] * y[j];
            }
        }
        let w: f64 = rng.gen_range(0.0..1.0);
        acc += (&xy * xy.adjoint()).scale(w);
    }
    let tr = acc.trace().re;
    DensityMatrix::new(acc.scale(1.0 / tr), p)
}

/// Uniform random unit vector on the complex sphere.
pub fn random_unit_vector(d: usize, rng: &mut ChaCha8Rng) -> CVec {
    loop {
        let mut v = CVec::zeros(d);
        for i in 0..d {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v[i] = C64::new(re, im);
        }
        let n = v.norm();
        if n > 1e-6 {
            return v.scale(1.0 / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentrate::{build_family, crosshatch, rho_5_5};
    use crate::linalg::basis_vec;

    fn ch_state() -> DensityMatrix {
        crosshatch().build_state().unwrap()
    }

    #[test]
    fn pure_state_rank_one_projector() {
        let p = Bipartition::new(2, 2);
        let v = basis_vec(4, 0);
        let rho = DensityMatrix::new(&v * v.adjoint(), p);
        let rp = range_pair(&rho, 1e-8).unwrap();
        assert_eq!(rp.rank_p, 1);
        assert_eq!(rp.rank_q, 1);
    }

    #[test]
    fn crosshatch_range_ranks() {
        let rp = range_pair(&ch_state(), 1e-8).unwrap();
        assert_eq!(rp.rank_p, 4);
        assert_eq!(rp.rank_q, 4);
        // projector invariants
        let d = rp.p.nrows();
        assert!(frobenius_norm(&(&rp.p * &rp.p - &rp.p)) < 1e-10);
        assert!(frobenius_norm(&(&rp.q * &rp.q - &rp.q)) < 1e-10);
        assert!(frobenius_norm(&(rp.p.adjoint() - &rp.p)) < 1e-10);
        let rho = ch_state();
        assert!(frobenius_norm(&(&rp.p * &rho.mat - &rho.mat)) < 1e-10);
        let pt = rho.partial_transpose(Side::B);
        assert!(frobenius_norm(&(&rp.q * &pt - &pt)) < 1e-10);
        assert_eq!(d, 9);
    }

    #[test]
    fn rho_5_5_range_rank_counts_distinct_directions() {
        let rho = rho_5_5().build_state().unwrap();
        let rp = range_pair(&rho, 1e-8).unwrap();
        // 13 edges, but the two doubled loops merge: 11 distinct directions
        assert_eq!(rp.rank_p, 11);
    }

    #[test]
    fn maximally_mixed_multiplicity_sixteen() {
        let p = Bipartition::new(2, 2);
        let rho = DensityMatrix::new(CMat::identity(4, 4).scale(0.25), p);
        let v = extremality_test(&rho, 1e-8).unwrap();
        assert_eq!(v.multiplicity_of_2, 16);
        assert!(!v.is_extremal);
    }

    #[test]
    fn crosshatch_is_extremal() {
        let v = extremality_test(&ch_state(), 1e-8).unwrap();
        assert_eq!(v.multiplicity_of_2, 1);
        assert!(v.is_extremal);
        assert!(v.second_eigenvalue_gap > 1e-4);
        assert!(v.max_eigenvalue <= 2.0 + 1e-9);
        assert!(v.rho_alignment.unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn mixture_of_extremals_is_not_extremal() {
        // crosshatch mixed with the pure product state on its isolated vertex
        let rho = ch_state();
        let p = rho.dims;
        let iso = basis_vec(9, p.index(1, 1));
        let mix = DensityMatrix::new((rho.mat + &iso * iso.adjoint()).scale(0.5), p);
        let v = extremality_test(&mix, 1e-8).unwrap();
        assert!(v.multiplicity_of_2 >= 2);
        assert!(!v.is_extremal);
    }

    #[test]
    fn npt_input_rejected() {
        let p = Bipartition::new(2, 2);
        let mut bell = CVec::zeros(4);
        bell[0] = C64::new(1.0, 0.0);
        bell[3] = C64::new(1.0, 0.0);
        let bell = bell.scale(1.0 / 2f64.sqrt());
        let rho = DensityMatrix::new(&bell * bell.adjoint(), p);
        assert!(matches!(
            extremality_test(&rho, 1e-8),
            Err(ExtremalError::NptInput(_))
        ));
    }

    #[test]
    fn lanczos_route_matches_dense_on_crosshatch() {
        let rho = ch_state();
        let dense = extremality_test(&rho, 1e-8).unwrap();
        let cfg = ExtremalityConfig {
            dense_limit: 0,
            ..ExtremalityConfig::default()
        };
        let iter = extremality_test_cfg(&rho, &cfg).unwrap();
        assert_eq!(iter.method, "lanczos");
        assert_eq!(iter.multiplicity_of_2, dense.multiplicity_of_2);
        assert!((iter.second_eigenvalue_gap - dense.second_eigenvalue_gap).abs() < 1e-6);
    }

    #[test]
    fn lanczos_route_detects_degeneracy() {
        let rho = ch_state();
        let p = rho.dims;
        let iso = basis_vec(9, p.index(1, 1));
        let mix = DensityMatrix::new((rho.mat + &iso * iso.adjoint()).scale(0.5), p);
        let cfg = ExtremalityConfig {
            dense_limit: 0,
            ..ExtremalityConfig::default()
        };
        let v = extremality_test_cfg(&mix, &cfg).unwrap();
        assert!(v.multiplicity_of_2 >= 2);
    }

    #[test]
    fn witness_normalization_and_ppt_bound() {
        let rho = ch_state();
        let rp = range_pair(&rho, 1e-8).unwrap();
        let w = build_witness(&rp);
        assert!(frobenius_norm(&(w.adjoint() - &w)) < 1e-12);
        let trw = frobenius_inner(&w, &rho.mat).re;
        assert!((trw - 2.0).abs() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let sigma = random_separable_state(rho.dims, 6, &mut rng);
            let val = frobenius_inner(&w, &sigma.mat).re;
            assert!(val <= 2.0 + 1e-9, "tr(Wσ) = {val} exceeds 2");
        }
    }

    #[test]
    fn indecomposable_witness_detects_source() {
        let rho = ch_state();
        let rp = range_pair(&rho, 1e-8).unwrap();
        let mu = 1.8659;
        let wind = indecomposable_witness(&rp, mu).unwrap();
        let val = frobenius_inner(&wind, &rho.mat).re;
        assert!((val - (mu - 2.0)).abs() < 1e-10);
        assert!(val < 0.0);
        assert!(matches!(
            indecomposable_witness(&rp, 2.0),
            Err(ExtremalError::BadMu(_))
        ));
    }

    #[test]
    fn multiplicity_invariant_under_local_unitaries() {
        let rho = ch_state();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..3 {
            let ua = random_unitary(3, &mut rng);
            let ub = random_unitary(3, &mut rng);
            let u = crate::linalg::tensor(&ua, &ub);
            let rotated = DensityMatrix::new(&u * &rho.mat * u.adjoint(), rho.dims);
            let v = extremality_test(&rotated, 1e-8).unwrap();
            assert_eq!(v.multiplicity_of_2, 1);
        }
    }

    #[test]
    fn family_member_two_is_extremal() {
        let family = build_family(2).unwrap();
        let rho = family[1].hypergraph.build_state().unwrap();
        let v = extremality_test(&rho, 1e-8).unwrap();
        assert_eq!(v.multiplicity_of_2, 1);
        assert!(v.is_extremal);
    }

    fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMat {
        let mut g = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                g[(i, j)] = C64::new(re, im);
            }
        }
        let qr = g.qr();
        qr.q()
    }
}
