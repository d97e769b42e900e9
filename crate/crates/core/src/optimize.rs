//! Seesaw lower bound on the product-state value of a witness.
//!
//! μ₁ = max over product vectors of ⟨xy|W|xy⟩ is lower-bounded by multi-start
//! alternating optimization: with one side fixed, the optimal other side is
//! the top eigenvector of a small compressed Hermitian matrix, so each half
//! step never decreases the objective. Stationary points satisfy the pair of
//! generalized eigenvalue equations (𝟙⊗⟨y|)W|xy⟩ = λ|x⟩ and
//! (⟨x|⊗𝟙)W|xy⟩ = λ|y⟩; the number of such points is bounded by Bézout's
//! theorem as 3^{d_A+d_B+1}.

use crate::extremal::random_unit_vector;
use crate::linalg::{herm_eig, Bipartition, CMat, CVec, C64};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("Bézout bound 3^{0} overflows u128")]
    BezoutOverflow(u32),
    #[error("witness must be Hermitian")]
    NotHermitian,
}

/// Best stationary point found by the multi-start seesaw.
#[derive(Clone, Debug)]
pub struct SeesawResult {
    /// Lower bound on μ₁: the best objective ⟨xy|W|xy⟩ found.
    pub mu_l: f64,
    pub x: CVec,
    pub y: CVec,
    /// Stationary value λ of the generalized eigenvalue equations.
    pub lambda: f64,
    /// Residual of the stationarity equations at (x, y).
    pub stationarity_residual: f64,
    /// Iterations used by the winning run.
    pub iterations: usize,
    pub starts: usize,
    pub seed: u64,
    /// Index of the winning start.
    pub best_start: usize,
    /// Objective after every half step of the winning run (nondecreasing).
    pub objective_trace: Vec<f64>,
}

/// Summary row for serialization (vectors omitted).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeesawSummary {
    pub mu_l: f64,
    pub lambda: f64,
    pub stationarity_residual: f64,
    pub iterations: usize,
    pub starts: usize,
    pub seed: u64,
}

impl SeesawResult {
    pub fn summary(&self) -> SeesawSummary {
        SeesawSummary {
            mu_l: self.mu_l,
            lambda: self.lambda,
            stationarity_residual: self.stationarity_residual,
            iterations: self.iterations,
            starts: self.starts,
            seed: self.seed,
        }
    }
}

/// M_y = (⟨x|⊗𝟙) W (|x⟩⊗𝟙): the d_B×d_B compression of W at fixed x.
///
/// Two-stage contraction over the Alice indices; this sits in the inner loop
/// of every seesaw start, so it avoids materializing the d×d_B isometry.
fn compress_b(w: &CMat, p: Bipartition, x: &CVec) -> CMat {
    let d = p.total();
    let ws = w.as_slice(); // column-major
    let mut a = vec![C64::default(); p.d_b * d];
    for col in 0..d {
        let base = col * d;
        for i in 0..p.d_a {
            let xi = x[i].conj();
            for j in 0..p.d_b {
                a[j * d + col] += xi * ws[base + p.index(i, j)];
            }
        }
    }
    let mut m = CMat::zeros(p.d_b, p.d_b);
    for j in 0..p.d_b {
        let row = &a[j * d..(j + 1) * d];
        for k in 0..p.d_a {
            let xk = x[k];
            for l in 0..p.d_b {
                m[(j, l)] += row[p.index(k, l)] * xk;
            }
        }
    }
    m
}

/// M_x = (𝟙⊗⟨y|) W (𝟙⊗|y⟩): the d_A×d_A compression of W at fixed y.
fn compress_a(w: &CMat, p: Bipartition, y: &CVec) -> CMat {
    let d = p.total();
    let ws = w.as_slice();
    let mut a = vec![C64::default(); p.d_a * d];
    for col in 0..d {
        let base = col * d;
        for j in 0..p.d_b {
            let yj = y[j].conj();
            for i in 0..p.d_a {
                a[i * d + col] += yj * ws[base + p.index(i, j)];
            }
        }
    }
    let mut m = CMat::zeros(p.d_a, p.d_a);
    for i in 0..p.d_a {
        let row = &a[i * d..(i + 1) * d];
        for l in 0..p.d_b {
            let yl = y[l];
            for k in 0..p.d_a {
                m[(i, k)] += row[p.index(k, l)] * yl;
            }
        }
    }
    m
}

/// Top eigenvector of a Hermitian matrix, resolving a degenerate largest
/// eigenvalue by maximal overlap with the previous iterate.
fn top_eigvec(m: &CMat, prev: &CVec) -> (f64, CVec) {
    let (evals, evecs) = herm_eig(m).expect("compressed witness stays Hermitian");
    let n = evals.len();
    let lam = evals[n - 1];
    let scale = evals.iter().fold(0f64, |a, &b| a.max(b.abs())).max(1.0);
    let mut first = n - 1;
    while first > 0 && lam - evals[first - 1] < 1e-12 * scale {
        first -= 1;
    }
    if first == n - 1 {
        return (lam, evecs.column(n - 1).into_owned());
    }
    // project the previous iterate onto the degenerate eigenspace
    let mut proj = CVec::zeros(n);
    for k in first..n {
        let col = evecs.column(k);
        let c = col.dotc(prev);
        proj += col.scale(1.0) * c;
    }
    let norm = proj.norm();
    if norm > 1e-8 {
        (lam, proj.scale(1.0 / norm))
    } else {
        (lam, evecs.column(first).into_owned())
    }
}

fn objective(w: &CMat, p: Bipartition, x: &CVec, y: &CVec) -> f64 {
    let xy = product_vector(p, x, y);
    (xy.adjoint() * w * &xy)[(0, 0)].re
}

/// |x⟩⊗|y⟩ in the row-major composite basis.
pub fn product_vector(p: Bipartition, x: &CVec, y: &CVec) -> CVec {
    let mut xy = CVec::zeros(p.total());
    for i in 0..p.d_a {
        for j in 0..p.d_b {
            xy[p.index(i, j)] = x[i] * y[j];
        }
    }
    xy
}

struct RunOutcome {
    value: f64,
    x: CVec,
    y: CVec,
    iterations: usize,
    trace: Vec<f64>,
}

fn seesaw_run(w: &CMat, p: Bipartition, rng: &mut ChaCha8Rng, tol: f64) -> RunOutcome {
    let mut x = random_unit_vector(p.d_a, rng);
    let mut y = random_unit_vector(p.d_b, rng);
    let mut val = objective(w, p, &x, &y);
    let mut trace = vec![val];
    let mut iterations = 0usize;
    for _ in 0..500 {
        iterations += 1;
        let (ly, ny) = top_eigvec(&compress_b(w, p, &x), &y);
        y = ny;
        assert!(
            ly >= val - 1e-12 * val.abs().max(1.0),
            "seesaw half step decreased the objective"
        );
        trace.push(ly);
        let (lx, nx) = top_eigvec(&compress_a(w, p, &y), &x);
        x = nx;
        assert!(
            lx >= ly - 1e-12 * ly.abs().max(1.0),
            "seesaw half step decreased the objective"
        );
        trace.push(lx);
        if lx - val < tol {
            val = lx;
            break;
        }
        val = lx;
    }
    RunOutcome {
        value: val,
        x,
        y,
        iterations,
        trace,
    }
}

/// Multi-start seesaw maximization of ⟨xy|W|xy⟩ over unit product vectors.
///
/// Start `i` draws from a generator seeded with `seed ^ i`, so the result is
/// independent of execution order and thread count.
pub fn seesaw(
    w: &CMat,
    p: Bipartition,
    starts: usize,
    seed: u64,
    tol: f64,
) -> Result<SeesawResult, OptimizeError> {
    assert!(starts >= 1);
    let dev = (w - w.adjoint()).iter().map(|c| c.norm()).fold(0f64, f64::max);
    if dev > 1e-10 {
        return Err(OptimizeError::NotHermitian);
    }
    let best = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64));
            let run = seesaw_run(w, p, &mut rng, tol);
            (i, run)
        })
        .reduce_with(|a, b| {
            // max by value, ties resolved toward the smaller start index
            if b.1.value > a.1.value || (b.1.value == a.1.value && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .expect("starts >= 1");
    let (best_start, mut run) = best;
    // polish the winner to stationarity precision
    let mut x = run.x.clone();
    let mut y = run.y.clone();
    for _ in 0..200 {
        let (_, ny) = top_eigvec(&compress_b(w, p, &x), &y);
        y = ny;
        let (lx, nx) = top_eigvec(&compress_a(w, p, &y), &x);
        x = nx;
        let (res, _) = stationarity_check(w, p, &x, &y);
        if res < 1e-10 {
            break;
        }
        run.value = lx;
    }
    let val = objective(w, p, &x, &y);
    let (residual, lambda) = stationarity_check(w, p, &x, &y);
    Ok(SeesawResult {
        mu_l: val,
        x,
        y,
        lambda,
        stationarity_residual: residual,
        iterations: run.iterations,
        starts,
        seed,
        best_start,
        objective_trace: run.trace,
    })
}

/// Residual of the stationarity equations (𝟙⊗⟨y|)W|xy⟩ = λ|x⟩ and
/// (⟨x|⊗𝟙)W|xy⟩ = λ|y⟩, together with the common λ.
pub fn stationarity_check(w: &CMat, p: Bipartition, x: &CVec, y: &CVec) -> (f64, f64) {
    let xy = product_vector(p, x, y);
    let z = w * &xy;
    let lambda = xy.dotc(&z).re;
    let mut vx = CVec::zeros(p.d_a);
    let mut vy = CVec::zeros(p.d_b);
    for i in 0..p.d_a {
        for j in 0..p.d_b {
            vx[i] += y[j].conj() * z[p.index(i, j)];
            vy[j] += x[i].conj() * z[p.index(i, j)];
        }
    }
    let lam = C64::new(lambda, 0.0);
    let rx = (vx - x.scale(1.0) * lam).norm();
    let ry = (vy - y.scale(1.0) * lam).norm();
    (rx.max(ry), lambda)
}

/// Bézout bound 3^{d_A+d_B+1} on the number of seesaw stationary points.
pub fn bezout_bound(p: Bipartition) -> Result<u128, OptimizeError> {
    let e = (p.d_a + p.d_b + 1) as u32;
    3u128
        .checked_pow(e)
        .ok_or(OptimizeError::BezoutOverflow(e))
}
