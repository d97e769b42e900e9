//! Hypergraph model of generalized grid states and the graphical PPT check.
//!
//! A grid hypergraph places vertices on a d_A×d_B grid; every hyperedge
//! corresponds to an (optionally amplitude-weighted) superposition of the
//! vertex basis states, and the state is the equal mixture of those edge
//! representations.

use crate::exact::{ExactAmp, Radical};
use crate::linalg::{numeric_rank, Bipartition, C64, CMat, CVec, DensityMatrix};
use num::rational::BigRational;
use num::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

/// A grid vertex (row on Alice's side, column on Bob's).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub i: usize,
    pub j: usize,
}

impl Vertex {
    pub fn new(i: usize, j: usize) -> Self {
        Vertex { i, j }
    }
}

/// A hyperedge: distinct vertices with nonzero exact amplitudes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedEdge {
    pub vertices: Vec<Vertex>,
    pub amplitudes: Vec<ExactAmp>,
}

impl WeightedEdge {
    pub fn uniform(vertices: Vec<Vertex>) -> Self {
        let amplitudes = vec![ExactAmp::one(); vertices.len()];
        WeightedEdge {
            vertices,
            amplitudes,
        }
    }

    pub fn weighted(vertices: Vec<Vertex>, amplitudes: Vec<ExactAmp>) -> Self {
        WeightedEdge {
            vertices,
            amplitudes,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_loop(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Amplitude at a given vertex (zero when absent).
    pub fn amplitude_at(&self, v: Vertex) -> ExactAmp {
        for (idx, u) in self.vertices.iter().enumerate() {
            if *u == v {
                return self.amplitudes[idx];
            }
        }
        ExactAmp::zero()
    }

    fn validate(&self, dims: Bipartition) -> Result<(), GridError> {
        if self.vertices.is_empty() {
            return Err(GridError::EmptyEdge);
        }
        if self.vertices.len() != self.amplitudes.len() {
            return Err(GridError::AmplitudeCount);
        }
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if v.i >= dims.d_a || v.j >= dims.d_b {
                return Err(GridError::VertexOutOfBounds(*v));
            }
            if !seen.insert(*v) {
                return Err(GridError::DuplicateVertex(*v));
            }
        }
        if self.amplitudes.iter().any(|a| a.is_zero()) {
            return Err(GridError::ZeroAmplitude);
        }
        Ok(())
    }

    /// The edge representation as a dense vector.
    pub fn vector(&self, dims: Bipartition) -> CVec {
        let mut v = CVec::zeros(dims.total());
        for (vert, amp) in self.vertices.iter().zip(&self.amplitudes) {
            v[dims.index(vert.i, vert.j)] = C64::new(amp.to_f64(), 0.0);
        }
        v
    }

    /// Squared norm Σ ampᵥ² as an exact rational.
    pub fn norm_sq(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for a in &self.amplitudes {
            acc += a.square();
        }
        acc
    }

    /// Schmidt rank of the edge representation (rank of its vertex pattern).
    pub fn schmidt_rank(&self, dims: Bipartition) -> usize {
        let mut m = CMat::zeros(dims.d_a, dims.d_b);
        for (vert, amp) in self.vertices.iter().zip(&self.amplitudes) {
            m[(vert.i, vert.j)] = C64::new(amp.to_f64(), 0.0);
        }
        numeric_rank(&m, 1e-9)
    }

    /// Is `other` the same edge direction, i.e. proportional by a rational factor?
    pub fn proportional_to(&self, other: &WeightedEdge) -> bool {
        if self.vertices.len() != other.vertices.len() {
            return false;
        }
        let mut pairs: Vec<(Vertex, ExactAmp)> = self
            .vertices
            .iter()
            .cloned()
            .zip(self.amplitudes.iter().cloned())
            .collect();
        pairs.sort_by_key(|(v, _)| *v);
        let mut other_pairs: Vec<(Vertex, ExactAmp)> = other
            .vertices
            .iter()
            .cloned()
            .zip(other.amplitudes.iter().cloned())
            .collect();
        other_pairs.sort_by_key(|(v, _)| *v);
        if pairs.iter().map(|(v, _)| v).ne(other_pairs.iter().map(|(v, _)| v)) {
            return false;
        }
        let ratio = match pairs[0].1.rational_ratio(&other_pairs[0].1) {
            Some(r) if !r.is_zero() => r,
            _ => return false,
        };
        pairs.iter().zip(&other_pairs).all(|((_, a), (_, b))| {
            a.rational_ratio(b).map(|r| r == ratio).unwrap_or(false)
        })
    }
}

/// A grid-vertex hypergraph; the edge multiset may repeat edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridHypergraph {
    pub dims: Bipartition,
    pub edges: Vec<WeightedEdge>,
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("hypergraph has no edges")]
    EmptyHypergraph,
    #[error("edge has no vertices")]
    EmptyEdge,
    #[error("amplitude count does not match vertex count")]
    AmplitudeCount,
    #[error("vertex {0:?} outside grid bounds")]
    VertexOutOfBounds(Vertex),
    #[error("duplicate vertex {0:?} within an edge")]
    DuplicateVertex(Vertex),
    #[error("zero amplitude in edge")]
    ZeroAmplitude,
    #[error("malformed hypergraph JSON: {0}")]
    Json(String),
}

impl GridHypergraph {
    pub fn new(dims: Bipartition, edges: Vec<WeightedEdge>) -> Result<Self, GridError> {
        for e in &edges {
            e.validate(dims)?;
        }
        Ok(GridHypergraph { dims, edges })
    }

    /// The grid state ρ_H: the trace-normalized mixture of edge projectors.
    pub fn build_state(&self) -> Result<DensityMatrix, GridError> {
        if self.edges.is_empty() {
            return Err(GridError::EmptyHypergraph);
        }
        let n = self.dims.total();
        let mut m = CMat::zeros(n, n);
        for e in &self.edges {
            let v = e.vector(self.dims);
            m += &v * v.adjoint();
        }
        let tr = m.trace().re;
        Ok(DensityMatrix::new(m.unscale(tr), self.dims))
    }

    /// Unnormalized Σ|e⟩⟨e| (used for exact reconstruction checks).
    pub fn unnormalized_state(&self) -> CMat {
        let n = self.dims.total();
        let mut m = CMat::zeros(n, n);
        for e in &self.edges {
            let v = e.vector(self.dims);
            m += &v * v.adjoint();
        }
        m
    }

    /// Grid vertices contained in no edge; their basis states span part of the kernel.
    pub fn isolated_vertices(&self) -> Vec<Vertex> {
        let mut used = BTreeSet::new();
        for e in &self.edges {
            for v in &e.vertices {
                used.insert(*v);
            }
        }
        let mut out = Vec::new();
        for i in 0..self.dims.d_a {
            for j in 0..self.dims.d_b {
                let v = Vertex::new(i, j);
                if !used.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Flattens each hyperedge to a clique: exact adjacency (off-diagonal part
    /// of the unnormalized state) plus the exact diagonal matrix D.
    pub fn flatten_to_graph(&self) -> FlatGraph {
        let mut adjacency: BTreeMap<(Vertex, Vertex), Radical> = BTreeMap::new();
        let mut degree: BTreeMap<Vertex, Radical> = BTreeMap::new();
        for e in &self.edges {
            for (a_idx, u) in e.vertices.iter().enumerate() {
                let du = Radical::from_rational(e.amplitudes[a_idx].square());
                degree
                    .entry(*u)
                    .or_insert_with(Radical::zero)
                    .add_assign(&du);
                for (b_idx, w) in e.vertices.iter().enumerate().skip(a_idx + 1) {
                    let weight = e.amplitudes[a_idx]
                        .mul(&e.amplitudes[b_idx])
                        .to_radical();
                    let key = if u <= w { (*u, *w) } else { (*w, *u) };
                    let entry = adjacency.entry(key).or_insert_with(Radical::zero);
                    entry.add_assign(&weight);
                    if entry.is_zero() {
                        adjacency.remove(&key);
                    }
                }
            }
        }
        FlatGraph { adjacency, degree }
    }

    /// Upper bound on the Schmidt number: the largest Schmidt rank over edge
    /// representations (every edge decomposition term has at most this rank).
    pub fn sn_upper_from_decomposition(&self) -> usize {
        self.edges
            .iter()
            .map(|e| e.schmidt_rank(self.dims))
            .max()
            .unwrap_or(0)
            .max(usize::from(!self.edges.is_empty()))
    }

    /// Sufficient graphical PPT criterion with numeric fallback.
    pub fn graphical_ppt_check(&self) -> PptVerdict {
        let flat = self.flatten_to_graph();
        let flipped = flip_adjacency(&flat.adjacency);
        let state = self.build_state().expect("nonempty hypergraph");
        let min_eig = state.min_pt_eigenvalue();
        let tol = 1e-10;

        let bipartite = is_bipartite(&flipped.adjacency);
        if !bipartite {
            let status = if min_eig < -tol {
                PptStatus::Npt
            } else {
                PptStatus::PptNumeric
            };
            return PptVerdict {
                status,
                min_eigenvalue_pt: min_eig,
                details: "flipped graph not 2-colorable; numeric fallback".into(),
            };
        }

        // weighted degree in the flipped graph vs the diagonal D (both exact)
        let mut degree_ok = true;
        let mut failing = None;
        let mut flipped_degree: BTreeMap<Vertex, Radical> = BTreeMap::new();
        for ((u, w), weight) in &flipped.adjacency {
            let aw = weight.abs();
            flipped_degree
                .entry(*u)
                .or_insert_with(Radical::zero)
                .add_assign(&aw);
            flipped_degree
                .entry(*w)
                .or_insert_with(Radical::zero)
                .add_assign(&aw);
        }
        for (v, diag) in &flipped.diagonal {
            flipped_degree
                .entry(*v)
                .or_insert_with(Radical::zero)
                .add_assign(diag);
        }
        for (v, deg) in &flipped_degree {
            let diag = flat.degree.get(v).cloned().unwrap_or_else(Radical::zero);
            if deg.cmp_exact(&diag) == std::cmp::Ordering::Greater {
                degree_ok = false;
                failing = Some(*v);
                break;
            }
        }

        if degree_ok {
            PptVerdict {
                status: PptStatus::PptGraphical,
                min_eigenvalue_pt: min_eig,
                details: "flipped graph 2-colorable, degrees bounded by D".into(),
            }
        } else if min_eig < -tol {
            PptVerdict {
                status: PptStatus::Npt,
                min_eigenvalue_pt: min_eig,
                details: format!(
                    "degree bound violated at {:?}; numeric PT eigenvalue confirms NPT",
                    failing.unwrap()
                ),
            }
        } else {
            // Degree bound violated yet the partial transpose is numerically
            // PSD. This can happen with loops pumping other diagonals, so the
            // graphical converse is not trusted on its own.
            PptVerdict {
                status: PptStatus::InconclusiveGraphical,
                min_eigenvalue_pt: min_eig,
                details: format!(
                    "degree bound violated at {:?} but PT numerically PSD",
                    failing.unwrap()
                ),
            }
        }
    }
}

/// Flattened view: exact weighted adjacency plus diagonal degrees.
#[derive(Clone, Debug)]
pub struct FlatGraph {
    pub adjacency: BTreeMap<(Vertex, Vertex), Radical>,
    pub degree: BTreeMap<Vertex, Radical>,
}

struct FlippedGraph {
    adjacency: BTreeMap<(Vertex, Vertex), Radical>,
    /// contributions where a flipped edge landed on the diagonal
    diagonal: BTreeMap<Vertex, Radical>,
}

/// Flips every adjacency edge {(i₁,j₁),(i₂,j₂)} to {(i₁,j₂),(i₂,j₁)}.
fn flip_adjacency(adjacency: &BTreeMap<(Vertex, Vertex), Radical>) -> FlippedGraph {
    let mut out: BTreeMap<(Vertex, Vertex), Radical> = BTreeMap::new();
    let mut diagonal: BTreeMap<Vertex, Radical> = BTreeMap::new();
    for ((u, w), weight) in adjacency {
        let a = Vertex::new(u.i, w.j);
        let b = Vertex::new(w.i, u.j);
        if a == b {
            // self-collision becomes a diagonal contribution (counted twice:
            // both coherences land on the same entry)
            let mut dv = weight.clone();
            dv.add_assign(weight);
            diagonal
                .entry(a)
                .or_insert_with(Radical::zero)
                .add_assign(&dv);
            continue;
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        let entry = out.entry(key).or_insert_with(Radical::zero);
        entry.add_assign(weight);
        if entry.is_zero() {
            out.remove(&key);
        }
    }
    FlippedGraph {
        adjacency: out,
        diagonal,
    }
}

fn is_bipartite(adjacency: &BTreeMap<(Vertex, Vertex), Radical>) -> bool {
    let mut neighbors: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for (u, w) in adjacency.keys() {
        neighbors.entry(*u).or_default().push(*w);
        neighbors.entry(*w).or_default().push(*u);
    }
    let mut color: BTreeMap<Vertex, bool> = BTreeMap::new();
    for start in neighbors.keys().cloned().collect::<Vec<_>>() {
        if color.contains_key(&start) {
            continue;
        }
        color.insert(start, false);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let cv = color[&v];
            for w in neighbors.get(&v).into_iter().flatten() {
                match color.get(w) {
                    Some(&cw) if cw == cv => return false,
                    Some(_) => {}
                    None => {
                        color.insert(*w, !cv);
                        queue.push_back(*w);
                    }
                }
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PptStatus {
    PptGraphical,
    PptNumeric,
    Npt,
    InconclusiveGraphical,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PptVerdict {
    pub status: PptStatus,
    pub min_eigenvalue_pt: f64,
    pub details: String,
}

impl PptVerdict {
    pub fn is_ppt(&self) -> bool {
        matches!(self.status, PptStatus::PptGraphical | PptStatus::PptNumeric)
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    vertices: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<ExactAmp>>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    dims: [usize; 2],
    edges: Vec<EdgeJson>,
}

impl GridHypergraph {
    pub fn to_json(&self) -> String {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let uniform = e.amplitudes.iter().all(|a| *a == ExactAmp::one());
                EdgeJson {
                    vertices: e.vertices.iter().map(|v| [v.i, v.j]).collect(),
                    amplitudes: if uniform {
                        None
                    } else {
                        Some(e.amplitudes.clone())
                    },
                }
            })
            .collect();
        let doc = HypergraphJson {
            dims: [self.dims.d_a, self.dims.d_b],
            edges,
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, GridError> {
        let doc: HypergraphJson =
            serde_json::from_str(text).map_err(|e| GridError::Json(e.to_string()))?;
        let dims = Bipartition::new(doc.dims[0], doc.dims[1]);
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in doc.edges {
            let vertices: Vec<Vertex> = e.vertices.iter().map(|v| Vertex::new(v[0], v[1])).collect();
            let amplitudes = match e.amplitudes {
                Some(a) => a,
                None => vec![ExactAmp::one(); vertices.len()],
            };
            edges.push(WeightedEdge::weighted(vertices, amplitudes));
        }
        GridHypergraph::new(dims, edges)
    }
}
