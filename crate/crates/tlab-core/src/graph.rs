//! Graphs of groups seen only through numeric geometric data: special-ray
//! templates, periodic itineraries and scale-factor consistency.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, RecoveryError};
use crate::fm;
use crate::recovery::SyntheticOracle;
use crate::template::{SelfSimilarData, StripSpec, TemplateData, TemplateKind, WallSpec};

/// MLS values of σ and δ, and τ values of σ and ζ (τ(δ) is zero).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexGeometricData {
    pub mls_sigma: f64,
    pub mls_delta: f64,
    pub tau_sigma: f64,
    pub tau_zeta: f64,
}

impl VertexGeometricData {
    pub fn is_valid(&self) -> bool {
        let finite = [self.mls_sigma, self.mls_delta, self.tau_sigma, self.tau_zeta].iter().all(|v| v.is_finite());
        finite && self.mls_sigma > 0.0 && self.mls_delta > 0.0 && self.tau_zeta != 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub beta: f64,
}

impl EdgeSpec {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleGraphSpec {
    pub vertices: BTreeMap<String, VertexGeometricData>,
    pub edges: Vec<EdgeSpec>,
}

impl AdmissibleGraphSpec {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        for (name, v) in &self.vertices {
            if !v.is_valid() {
                return Err(GraphError::BadVertexData(name.clone()));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for end in [&e.from, &e.to] {
                if !self.vertices.contains_key(end) {
                    return Err(GraphError::UnknownVertex(end.clone()));
                }
            }
            if !(e.beta > 0.0 && e.beta < PI) {
                return Err(GraphError::BadAngle(i));
            }
        }
        let names: Vec<&String> = self.vertices.keys().collect();
        let adj = self.adjacency(&names);
        let mut seen = alloc::vec![false; names.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(GraphError::Disconnected);
        }
        Ok(())
    }

    /// Neighbours of each vertex (by position in `names`) with the edge index.
    fn adjacency(&self, names: &[&String]) -> Vec<Vec<(usize, usize)>> {
        let idx = |n: &String| names.iter().position(|m| *m == n);
        let mut adj = alloc::vec![Vec::new(); names.len()];
        for (k, e) in self.edges.iter().enumerate() {
            if let (Some(a), Some(b)) = (idx(&e.from), idx(&e.to)) {
                adj[a].push((b, k));
                if a != b {
                    adj[b].push((a, k));
                }
            }
        }
        adj
    }

    pub fn edge(&self, e: usize) -> Result<&EdgeSpec, GraphError> {
        self.edges.get(e).ok_or(GraphError::UnknownEdge(e))
    }

    fn vertex(&self, name: &str) -> Result<&VertexGeometricData, GraphError> {
        self.vertices.get(name).ok_or_else(|| GraphError::UnknownVertex(name.into()))
    }

    /// Geometric data at the two ends of an edge.
    pub fn ends(&self, e: usize) -> Result<(VertexGeometricData, VertexGeometricData), GraphError> {
        let edge = self.edge(e)?;
        Ok((*self.vertex(&edge.from)?, *self.vertex(&edge.to)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialRayData {
    pub template: TemplateData,
    /// l̂₁, l̂₂, ... (strip k has width l̂_{k+1}).
    pub l_hat: Vec<f64>,
    pub eps_hat: Vec<f64>,
    pub beta: f64,
}

impl SpecialRayData {
    /// (β; l̂₃, ε̂₃, l̂₄, ε̂₄), which the data agrees with from index 3 on.
    pub fn self_similar(&self) -> Option<SelfSimilarData> {
        if self.l_hat.len() < 4 {
            return None;
        }
        Some(SelfSimilarData::new(self.beta, self.l_hat[2], self.eps_hat[2], self.l_hat[3], self.eps_hat[3]))
    }
}

/// 2^e·x for a 1-based index pair, exact.
fn pow2(x: f64, e: usize) -> f64 {
    fm::ldexp(x, i32::try_from(e).unwrap_or(i32::MAX))
}

/// (l̂_j, ε̂_j) for j ≥ 1. For a loop, v2 is v1.
fn special_strip(v1: &VertexGeometricData, v2: &VertexGeometricData, pqrs: [f64; 4], j: usize) -> (f64, f64) {
    let [p, q, r, s] = pqrs;
    if j % 2 == 1 {
        let i = j.div_ceil(2);
        let l = pow2(v1.mls_sigma + fm::abs(p) * v1.mls_delta, i - 1);
        // j = 2i' + 1 with i' = i − 1; j = 1 continues the same law
        let eps = pow2(v1.tau_sigma + q * v1.tau_zeta, i - 1);
        (l, eps)
    } else {
        let i = j / 2;
        (pow2(fm::abs(r) * v2.mls_delta, i - 1), pow2(s * v2.tau_zeta, i - 1))
    }
}

/// Half template of the special ray for edge `e` at (p, q, r, s).
pub fn special_ray_data(
    spec: &AdmissibleGraphSpec,
    e: usize,
    pqrs: [f64; 4],
    n_walls: usize,
) -> Result<SpecialRayData, GraphError> {
    if !(pqrs[0] > 0.0 && pqrs[2] > 0.0) || pqrs.iter().any(|v| !v.is_finite()) {
        return Err(GraphError::OutsideDomain);
    }
    if n_walls < 2 {
        return Err(GraphError::Template(crate::error::TemplateError::TooFewWalls(n_walls)));
    }
    let edge = spec.edge(e)?;
    if !(edge.beta > 0.0 && edge.beta < PI) {
        return Err(GraphError::BadAngle(e));
    }
    let (v1, v2) = spec.ends(e)?;
    for (name, v) in [(&edge.from, &v1), (&edge.to, &v2)] {
        if !v.is_valid() {
            return Err(GraphError::BadVertexData(name.clone()));
        }
    }
    let (l_hat, eps_hat): (Vec<f64>, Vec<f64>) = (1..n_walls).map(|j| special_strip(&v1, &v2, pqrs, j)).unzip();
    let mut walls = alloc::vec![WallSpec { alpha: Some(edge.beta) }; n_walls];
    walls[0].alpha = None;
    let strips =
        l_hat.iter().zip(&eps_hat).map(|(&width, &eps)| StripSpec { width, eps, degenerate_ok: false }).collect();
    let template = TemplateData { kind: TemplateKind::Half, anchor: 0.0, walls, strips };
    Ok(SpecialRayData { template, l_hat, eps_hat, beta: edge.beta })
}

/// Oracle over (p, q, r, s) deciding triviality of the special-ray template at `beta`.
pub fn build_oracle_from_geometric_data(
    v1: &VertexGeometricData,
    v2: &VertexGeometricData,
    beta: f64,
) -> Result<SyntheticOracle, RecoveryError> {
    SyntheticOracle::new(beta, [v1.mls_delta, v1.tau_zeta, v2.mls_delta, v2.tau_zeta], [v1.mls_sigma, v1.tau_sigma])
}

/// Strip data standing in for the ambient widths: entry k mod len, times
/// 2^(k div len) when `doubling` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripTable {
    pub entries: Vec<StripSpec>,
    #[serde(default)]
    pub doubling: bool,
}

impl StripTable {
    pub fn strip(&self, k: usize) -> StripSpec {
        let n = self.entries.len();
        let mut s = self.entries[k % n];
        if self.doubling {
            s.width = pow2(s.width, k / n);
            s.eps = pow2(s.eps, k / n);
        }
        s
    }
}

/// Half template along a cyclic edge itinerary: wall i lies on edge
/// itinerary[i mod len] and carries its angle.
pub fn periodic_template(
    spec: &AdmissibleGraphSpec,
    itinerary: &[usize],
    table: &StripTable,
    n_walls: usize,
) -> Result<TemplateData, GraphError> {
    if itinerary.is_empty() || table.entries.is_empty() {
        return Err(GraphError::EmptyItinerary);
    }
    if n_walls < 2 {
        return Err(GraphError::Template(crate::error::TemplateError::TooFewWalls(n_walls)));
    }
    for w in 0..itinerary.len() {
        let (a, b) = (itinerary[w], itinerary[(w + 1) % itinerary.len()]);
        let (ea, eb) = (spec.edge(a)?, spec.edge(b)?);
        let shared = [&ea.from, &ea.to].iter().any(|v| **v == eb.from || **v == eb.to);
        if !shared {
            return Err(GraphError::NotAdjacent(a, b));
        }
    }
    let mut walls = Vec::with_capacity(n_walls);
    walls.push(WallSpec { alpha: None });
    for i in 1..n_walls {
        let e = itinerary[i % itinerary.len()];
        let beta = spec.edge(e)?.beta;
        if !(beta > 0.0 && beta < PI) {
            return Err(GraphError::BadAngle(e));
        }
        walls.push(WallSpec { alpha: Some(beta) });
    }
    let strips = (0..n_walls - 1).map(|k| table.strip(k)).collect();
    Ok(TemplateData { kind: TemplateKind::Half, anchor: 0.0, walls, strips })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScaleAssignment {
    pub lambda: BTreeMap<String, f64>,
    pub mu: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleWitness {
    MissingVertex(String),
    NonPositive(String),
    /// Edge e with λ(from), μ(to), λ(to), μ(from) not pairwise equal.
    EdgeMismatch {
        edge: usize,
        values: [f64; 4],
    },
    OddCycle(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleVerdict {
    Uniform(f64),
    Bipartite(f64, f64),
    Invalid(ScaleWitness),
}

fn close(a: f64, b: f64) -> bool {
    fm::abs(a - b) <= 1e-12 * fm::abs(a).max(fm::abs(b))
}

/// Whether rescaling MLS by λ and τ by μ is compatible across every edge.
pub fn check_scale_assignment(spec: &AdmissibleGraphSpec, s: &ScaleAssignment) -> ScaleVerdict {
    let names: Vec<&String> = spec.vertices.keys().collect();
    let mut lm = Vec::with_capacity(names.len());
    for n in &names {
        match (s.lambda.get(*n), s.mu.get(*n)) {
            (Some(&l), Some(&m)) if l > 0.0 && m > 0.0 && l.is_finite() && m.is_finite() => lm.push((l, m)),
            (Some(_), Some(_)) => return ScaleVerdict::Invalid(ScaleWitness::NonPositive((*n).clone())),
            _ => return ScaleVerdict::Invalid(ScaleWitness::MissingVertex((*n).clone())),
        }
    }
    if lm.is_empty() {
        return ScaleVerdict::Invalid(ScaleWitness::MissingVertex(String::new()));
    }
    let a = lm[0].0;
    if lm.iter().all(|&(l, m)| close(l, a) && close(m, a)) {
        return ScaleVerdict::Uniform(a);
    }

    // 2-colouring, with parents kept to extract an odd cycle
    let adj = spec.adjacency(&names);
    let mut color = alloc::vec![usize::MAX; names.len()];
    let mut parent = alloc::vec![usize::MAX; names.len()];
    for root in 0..names.len() {
        if color[root] != usize::MAX {
            continue;
        }
        color[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if color[v] == usize::MAX {
                    color[v] = 1 - color[u];
                    parent[v] = u;
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    let cycle = odd_cycle(&parent, u, v).into_iter().map(|i| names[i].clone()).collect();
                    return ScaleVerdict::Invalid(ScaleWitness::OddCycle(cycle));
                }
            }
        }
    }

    for (k, e) in spec.edges.iter().enumerate() {
        let (Some(i), Some(j)) = (names.iter().position(|n| **n == e.from), names.iter().position(|n| **n == e.to))
        else {
            continue;
        };
        let values = [lm[i].0, lm[j].1, lm[j].0, lm[i].1];
        if !close(values[0], values[1]) || !close(values[2], values[3]) {
            return ScaleVerdict::Invalid(ScaleWitness::EdgeMismatch { edge: k, values });
        }
    }
    let (a, b) = lm[0];
    for (i, &(l, m)) in lm.iter().enumerate() {
        let (x, y) = if color[i] == color[0] { (a, b) } else { (b, a) };
        if !close(l, x) || !close(m, y) {
            // only reachable on a disconnected graph
            return ScaleVerdict::Invalid(ScaleWitness::EdgeMismatch { edge: usize::MAX, values: [l, x, m, y] });
        }
    }
    ScaleVerdict::Bipartite(a, b)
}

/// Cycle through the BFS tree paths of u and v plus the edge uv.
fn odd_cycle(parent: &[usize], u: usize, v: usize) -> Vec<usize> {
    let path = |mut x: usize| {
        let mut p = alloc::vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            p.push(x);
        }
        p
    };
    let (pu, pv) = (path(u), path(v));
    let common = pu.iter().position(|x| pv.contains(x)).unwrap_or(pu.len() - 1);
    let lca = pu[common];
    let mut cycle: Vec<usize> = pu[..=common].to_vec();
    let back = pv.iter().position(|&x| x == lca).unwrap_or(pv.len());
    cycle.extend(pv[..back].iter().rev());
    cycle
}
