//! Upper bound μ_U on the product-state value via symmetric-extension SDPs.
//!
//! Level n relaxes the separable set by optimizing tr(Ŵ ρ_ext) over states
//! ρ_ext on H_keep ⊗ Symⁿ(H_ext) with unit trace, positivity, and positive
//! partial transposes across the keep/extension cut and across every
//! copy-subset cut, where Ŵ acts as the witness on (keep, first copy) and
//! trivially on the remaining copies. The extension is placed on the smaller
//! subsystem and the symmetric factor is parametrized by its orthonormal
//! multiset basis, so the variable has dimension d_keep·C(d_ext+n−1, n).
//! Copy-subset transposes are expressed through the isometric inclusion
//! Symⁿ ⊂ Symʲ ⊗ Symⁿ⁻ʲ, keeping every cone projection an exact eigenvalue
//! clip. The SDP is solved by an in-house ADMM over the stacked isometries.

use crate::linalg::{
    frobenius_inner, frobenius_norm, herm_eig, partial_transpose, Bipartition, CMat, Side, C64,
};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DpsError {
    #[error("level must be at least 1")]
    LevelZero,
    #[error("level {0} exceeds the factorial guard (n ≤ 8)")]
    LevelTooHigh(usize),
    #[error("full-space operator of dimension {0} exceeds the dense guard")]
    FullSpaceTooLarge(usize),
}

/// All nondecreasing length-`n` sequences over `0..d` (multiset basis order).
pub fn multisets(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        assert!(out.len() < 1 << 24, "symmetric basis too large");
        // advance to the next nondecreasing sequence
        let mut k = n;
        while k > 0 && cur[k - 1] == d - 1 {
            k -= 1;
        }
        if k == 0 {
            return out;
        }
        let v = cur[k - 1] + 1;
        for slot in cur.iter_mut().skip(k - 1) {
            *slot = v;
        }
    }
}

fn multiplicity(ms: &[usize], v: usize) -> usize {
    ms.iter().filter(|&&x| x == v).count()
}

/// Projector onto Symⁿ(C^d) (permutation average) and the orthonormal
/// multiset-basis isometry V with P∨ = V V†. Guarded to small dⁿ.
pub fn sym_projector(d: usize, n: usize) -> Result<(CMat, CMat), DpsError> {
    if n == 0 {
        return Err(DpsError::LevelZero);
    }
    if n > 8 {
        return Err(DpsError::LevelTooHigh(n));
    }
    let total = d.checked_pow(n as u32).ok_or(DpsError::FullSpaceTooLarge(usize::MAX))?;
    if total > 4096 {
        return Err(DpsError::FullSpaceTooLarge(total));
    }
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut v = vec![0usize; n];
        for k in (0..n).rev() {
            v[k] = idx % d;
            idx /= d;
        }
        v
    };
    let index_of = |v: &[usize]| -> usize { v.iter().fold(0, |acc, &x| acc * d + x) };
    // permutation average
    let mut proj = CMat::zeros(total, total);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0usize;
    heap_permutations(&mut perm, &mut |pi| {
        count += 1;
        for src in 0..total {
            let dg = digits(src);
            let permuted: Vec<usize> = (0..n).map(|t| dg[pi[t]]).collect();
            proj[(index_of(&permuted), src)] += C64::new(1.0, 0.0);
        }
    });
    proj.scale_mut(1.0 / count as f64);
    // multiset isometry
    let ms = multisets(d, n);
    let lookup: HashMap<Vec<usize>, usize> =
        ms.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let mut arrangement_counts = vec![0usize; ms.len()];
    for idx in 0..total {
        let mut dg = digits(idx);
        dg.sort_unstable();
        arrangement_counts[lookup[&dg]] += 1;
    }
    let mut iso = CMat::zeros(total, ms.len());
    for idx in 0..total {
        let mut dg = digits(idx);
        dg.sort_unstable();
        let col = lookup[&dg];
        iso[(idx, col)] = C64::new(1.0 / (arrangement_counts[col] as f64).sqrt(), 0.0);
    }
    Ok((proj, iso))
}

fn heap_permutations(items: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    fn rec(k: usize, items: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if k == 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            rec(k - 1, items, visit);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let k = items.len();
    rec(k, items, visit);
}

/// PT cut over j of the n extension copies, realized in the lifted space
/// H_keep ⊗ Symʲ ⊗ Symⁿ⁻ʲ through the inclusion isometry.
#[derive(Clone, Debug)]
pub struct CopyCut {
    /// Number of transposed copies.
    pub j: usize,
    /// 𝟙_keep ⊗ V_j with V_j : Symⁿ → Symʲ ⊗ Symⁿ⁻ʲ the isometric inclusion.
    pub lift: CMat,
    pub d_keep: usize,
    pub dim_j: usize,
    pub dim_rest: usize,
}

impl CopyCut {
    /// M_j(X) = PT over the Symʲ factor of the lifted matrix.
    fn forward(&self, x: &CMat) -> CMat {
        let lifted = &self.lift * x * self.lift.adjoint();
        pt_middle(&lifted, self.d_keep, self.dim_j, self.dim_rest)
    }

    /// Adjoint M_j†(Y) (equals M_j⁻¹ on the range since M_j is an isometry).
    fn adjoint_map(&self, y: &CMat) -> CMat {
        let back = pt_middle(y, self.d_keep, self.dim_j, self.dim_rest);
        self.lift.adjoint() * back * &self.lift
    }
}

/// Transposes the middle factor of a (d1, d2, d3) tripartite operator. The
/// multiset basis is real, so this is the partial transpose on Symʲ.
fn pt_middle(m: &CMat, d1: usize, d2: usize, d3: usize) -> CMat {
    let total = d1 * d2 * d3;
    assert_eq!(m.nrows(), total);
    let enc = |a: usize, b: usize, c: usize| (a * d2 + b) * d3 + c;
    let mut out = CMat::zeros(total, total);
    for a in 0..d1 {
        for b in 0..d2 {
            for c in 0..d3 {
                for a2 in 0..d1 {
                    for b2 in 0..d2 {
                        for c2 in 0..d3 {
                            out[(enc(a, b, c), enc(a2, b2, c2))] =
                                m[(enc(a, b2, c), enc(a2, b, c2))];
                        }
                    }
                }
            }
        }
    }
    out
}

/// Assembled level-n symmetric-extension SDP for a witness.
#[derive(Clone, Debug)]
pub struct DpsProblem {
    /// Compressed objective Ŵ_c on H_keep ⊗ Symⁿ(H_ext).
    pub c: CMat,
    /// (d_keep, sym_dim) bipartition of the compressed variable.
    pub dims: Bipartition,
    pub level: usize,
    /// Which original subsystem was extended.
    pub extended_side: Side,
    pub sym_dim: usize,
    /// PT cuts over j = 1..n−1 copies (the j = n cut is the keep-side PT).
    pub copy_cuts: Vec<CopyCut>,
}

/// Builds the level-n problem, extending the smaller subsystem (ties → B).
///
/// The compressed objective is computed combinatorially: with |s⟩ the
/// orthonormal multiset states, ⟨s|(E_{bb'} on one copy ⊗ 𝟙)|s'⟩ equals
/// √(m_b(s)·m_{b'}(s'))/n when s∖{b} = s'∖{b'} and 0 otherwise.
pub fn assemble(w: &CMat, p: Bipartition, n: usize) -> Result<DpsProblem, DpsError> {
    assemble_with_options(w, p, n, true)
}

/// `assemble` with the copy-subset PT cuts optionally disabled (the weaker
/// relaxation constrains only the keep/extension cut).
pub fn assemble_with_options(
    w: &CMat,
    p: Bipartition,
    n: usize,
    with_copy_cuts: bool,
) -> Result<DpsProblem, DpsError> {
    if n == 0 {
        return Err(DpsError::LevelZero);
    }
    if n > 8 {
        return Err(DpsError::LevelTooHigh(n));
    }
    let extended_side = if p.d_a < p.d_b { Side::A } else { Side::B };
    let (d_keep, d_ext) = match extended_side {
        Side::A => (p.d_b, p.d_a),
        Side::B => (p.d_a, p.d_b),
    };
    let w_elem = |a: usize, b: usize, a2: usize, b2: usize| -> C64 {
        match extended_side {
            Side::B => w[(p.index(a, b), p.index(a2, b2))],
            Side::A => w[(p.index(b, a), p.index(b2, a2))],
        }
    };
    let ms = multisets(d_ext, n);
    let lookup: HashMap<Vec<usize>, usize> =
        ms.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let sym_dim = ms.len();
    let dd = d_keep * sym_dim;
    let cdims = Bipartition::new(d_keep, sym_dim);
    let mut c = CMat::zeros(dd, dd);
    for (si, s) in ms.iter().enumerate() {
        let mut seen = Vec::new();
        for &b in s {
            if seen.contains(&b) {
                continue;
            }
            seen.push(b);
            let mb = multiplicity(s, b);
            // s with one b removed
            let mut stem = s.clone();
            let pos = stem.iter().position(|&x| x == b).expect("b is in s");
            stem.remove(pos);
            for b2 in 0..d_ext {
                let mut s2 = stem.clone();
                let ins = s2.partition_point(|&x| x < b2);
                s2.insert(ins, b2);
                let s2i = lookup[&s2];
                let mb2 = multiplicity(&s2, b2);
                let coeff = ((mb * mb2) as f64).sqrt() / n as f64;
                for a in 0..d_keep {
                    for a2 in 0..d_keep {
                        c[(cdims.index(a, si), cdims.index(a2, s2i))] +=
                            w_elem(a, b, a2, b2) * C64::new(coeff, 0.0);
                    }
                }
            }
        }
    }
    let copy_cuts = if with_copy_cuts {
        (1..n).map(|j| build_copy_cut(d_keep, d_ext, n, j, &ms)).collect()
    } else {
        Vec::new()
    };
    Ok(DpsProblem {
        c,
        dims: cdims,
        level: n,
        extended_side,
        sym_dim,
        copy_cuts,
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Number of distinct arrangements of a multiset: |s|!/∏ m_b!.
fn arrangements(s: &[usize]) -> f64 {
    let mut denom = 1.0;
    let mut run = 1usize;
    for k in 1..=s.len() {
        if k < s.len() && s[k] == s[k - 1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    factorial(s.len()) / denom
}

/// Builds 𝟙_keep ⊗ V_j for the inclusion Symⁿ ⊂ Symʲ ⊗ Symⁿ⁻ʲ, with
/// ⟨s₁⊗s₂|s⟩ = √(N(s₁)N(s₂)/N(s)) for every split s = s₁ ⊎ s₂.
fn build_copy_cut(
    d_keep: usize,
    d_ext: usize,
    n: usize,
    j: usize,
    ms_n: &[Vec<usize>],
) -> CopyCut {
    let ms_j = multisets(d_ext, j);
    let ms_rest = multisets(d_ext, n - j);
    let idx_j: HashMap<Vec<usize>, usize> =
        ms_j.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let idx_rest: HashMap<Vec<usize>, usize> =
        ms_rest.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let (dim_j, dim_rest) = (ms_j.len(), ms_rest.len());
    let mut v = CMat::zeros(dim_j * dim_rest, ms_n.len());
    for (si, s) in ms_n.iter().enumerate() {
        let n_s = arrangements(s);
        // enumerate all sub-multisets of size j
        for pick in sub_multisets(s, j) {
            let mut rest = s.clone();
            for &b in &pick {
                let pos = rest.iter().position(|&x| x == b).expect("pick ⊆ s");
                rest.remove(pos);
            }
            let coeff = (arrangements(&pick) * arrangements(&rest) / n_s).sqrt();
            v[(idx_j[&pick] * dim_rest + idx_rest[&rest], si)] = C64::new(coeff, 0.0);
        }
    }
    let mut lift = CMat::zeros(d_keep * dim_j * dim_rest, d_keep * ms_n.len());
    for a in 0..d_keep {
        for r in 0..dim_j * dim_rest {
            for col in 0..ms_n.len() {
                lift[(a * dim_j * dim_rest + r, a * ms_n.len() + col)] = v[(r, col)];
            }
        }
    }
    CopyCut {
        j,
        lift,
        d_keep,
        dim_j,
        dim_rest,
    }
}

/// All distinct size-`j` sub-multisets of a sorted multiset.
fn sub_multisets(s: &[usize], j: usize) -> Vec<Vec<usize>> {
    // distinct values and multiplicities
    let mut vals: Vec<(usize, usize)> = Vec::new();
    for &x in s {
        match vals.last_mut() {
            Some((v, m)) if *v == x => *m += 1,
            _ => vals.push((x, 1)),
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        vals: &[(usize, usize)],
        k: usize,
        remaining: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        if k == vals.len() {
            return;
        }
        let (v, m) = vals[k];
        for take in (0..=m.min(remaining)).rev() {
            let len = cur.len();
            cur.extend(std::iter::repeat(v).take(take));
            rec(vals, k + 1, remaining - take, cur, out);
            cur.truncate(len);
        }
    }
    rec(&vals, 0, j, &mut cur, &mut out);
    out
}

/// First-order solver settings.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative primal/dual residual target.
    pub eps: f64,
    /// Over-relaxation parameter α ∈ (0, 2).
    pub over_relaxation: f64,
    /// Initial ADMM penalty.
    pub penalty: f64,
    /// Record a trace row every this many iterations (0 disables).
    pub trace_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 200_000,
            eps: 1e-7,
            over_relaxation: 1.5,
            penalty: 1.0,
            trace_every: 25,
        }
    }
}

/// One convergence-trace row: iteration, objective, primal and dual residual.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

/// Solver output.
#[derive(Clone, Debug)]
pub struct DpsSolution {
    /// Objective value at the consensus iterate (≈ the SDP optimum).
    pub mu_u: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub converged: bool,
    /// Smallest eigenvalue of the returned iterate (feasibility check).
    pub min_eigenvalue: f64,
    /// Trace of the returned iterate before normalization.
    pub trace_value: f64,
    /// Consensus iterate, trace-normalized.
    pub state: CMat,
    pub trace: Vec<TraceRow>,
}

impl DpsSolution {
    /// Convergence trace as CSV (iteration, objective, primal, dual).
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,objective,primal_residual,dual_residual\n");
        for r in &self.trace {
            s.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e}\n",
                r.iteration, r.objective, r.primal_residual, r.dual_residual
            ));
        }
        s
    }
}

fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

fn psd_project(m: &CMat) -> (CMat, f64) {
    let (evals, evecs) = herm_eig(m).expect("projection input is Hermitian");
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &lam) in evals.iter().enumerate() {
        if lam > 0.0 {
            let col = evecs.column(k);
            out += (col * col.adjoint()).scale(lam);
        }
    }
    (out, evals[0])
}

/// The stacked cone maps: identity (PSD), keep-side PT, and the copy cuts.
/// Every map is a Frobenius isometry, so the ADMM x-update is closed form.
fn cone_forward(prob: &DpsProblem, k: usize, x: &CMat) -> CMat {
    match k {
        0 => x.clone(),
        1 => partial_transpose(x, prob.dims, Side::B),
        _ => prob.copy_cuts[k - 2].forward(x),
    }
}

fn cone_adjoint(prob: &DpsProblem, k: usize, y: &CMat) -> CMat {
    match k {
        0 => y.clone(),
        1 => partial_transpose(y, prob.dims, Side::B),
        _ => prob.copy_cuts[k - 2].adjoint_map(y),
    }
}

fn cone_count(prob: &DpsProblem) -> usize {
    2 + prob.copy_cuts.len()
}

/// Maximizes tr(CX) over Hermitian X with tr X = 1 and every cone image PSD,
/// by ADMM on the splitting M_k(X) = Z_k with scaled duals U_k.
pub fn solve(prob: &DpsProblem, cfg: &SolverConfig) -> DpsSolution {
    let dd = prob.c.nrows();
    let m = cone_count(prob);
    let scale = frobenius_norm(&prob.c).max(1.0);
    let mut x = CMat::identity(dd, dd).scale(1.0 / dd as f64);
    let mut zs: Vec<CMat> = (0..m).map(|k| cone_forward(prob, k, &x)).collect();
    let mut us: Vec<CMat> = zs.iter().map(|z| CMat::zeros(z.nrows(), z.ncols())).collect();
    let mut rho = cfg.penalty;
    let alpha = cfg.over_relaxation;
    let mut trace = Vec::new();
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0usize;
    for it in 0..cfg.max_iters {
        iterations = it + 1;
        // x-update: since Σ M_k†M_k = m·𝟙, the quadratic is isotropic
        let mut acc = prob.c.scale(1.0 / rho);
        for k in 0..m {
            acc += cone_adjoint(prob, k, &(&zs[k] - &us[k]));
        }
        x = hermitize(&acc.scale(1.0 / m as f64));
        let shift = (x.trace().re - 1.0) / dd as f64;
        for k in 0..dd {
            x[(k, k)] -= C64::new(shift, 0.0);
        }
        // z-updates: over-relaxed PSD projections in each lifted space
        let mut primal_sq = 0f64;
        let mut dual_sq = 0f64;
        for k in 0..m {
            let mx = cone_forward(prob, k, &x);
            primal_sq += frobenius_norm(&(&mx - &zs[k])).powi(2);
            let w = mx.scale(alpha) + zs[k].scale(1.0 - alpha);
            let z_new = psd_project(&hermitize(&(&w + &us[k]))).0;
            us[k] += &w - &z_new;
            dual_sq += frobenius_norm(&(&z_new - &zs[k])).powi(2);
            zs[k] = z_new;
        }
        let norm_x = frobenius_norm(&x).max(1e-12);
        primal = primal_sq.sqrt() / (norm_x * (m as f64).sqrt());
        dual = rho * dual_sq.sqrt() / scale;
        let record = cfg.trace_every > 0 && it % cfg.trace_every == 0;
        if record || primal.max(dual) < cfg.eps {
            let obj = frobenius_inner(&prob.c, &x).re;
            trace.push(TraceRow {
                iteration: it,
                objective: obj,
                primal_residual: primal,
                dual_residual: dual,
            });
        }
        if primal.max(dual) < cfg.eps {
            converged = true;
            break;
        }
        // standard residual-balancing penalty adaptation
        if it % 50 == 49 {
            if primal > 10.0 * dual {
                rho *= 2.0;
                for u in us.iter_mut() {
                    u.scale_mut(0.5);
                }
            } else if dual > 10.0 * primal {
                rho *= 0.5;
                for u in us.iter_mut() {
                    u.scale_mut(2.0);
                }
            }
        }
    }
    let tr = x.trace().re;
    let state = x.scale(1.0 / tr);
    let (evals, _) = herm_eig(&state).expect("iterate is Hermitian");
    let mu_u = frobenius_inner(&prob.c, &state).re;
    DpsSolution {
        mu_u,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
        converged,
        min_eigenvalue: evals[0],
        trace_value: tr,
        state,
        trace,
    }
}

/// Convenience: assemble and solve level n for a witness.
pub fn mu_upper(
    w: &CMat,
    p: Bipartition,
    n: usize,
    cfg: &SolverConfig,
) -> Result<DpsSolution, DpsError> {
    let prob = assemble(w, p, n)?;
    Ok(solve(&prob, cfg))
}
