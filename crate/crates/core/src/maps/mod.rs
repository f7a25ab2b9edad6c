//! Planar maps as rotation systems on half-edges.
//!
//! Half-edges are dense indices `0..2E`. `alpha` pairs the two halves of an
//! edge and `sigma` sends a half-edge to the next one counterclockwise around
//! its origin. Faces are the cycles of `phi = sigma^{-1} ∘ alpha`: walking
//! along `h` with the face on the left, the walk continues with `phi(h)`.
//!
//! A corner is identified with the half-edge `h` that opens it: the sector
//! between `h` and `sigma(h)`. That corner lies in the face to the left of
//! `h`, and a counterclockwise sweep of a face visits `h, phi(h), ...`.

mod skeleton;

pub use skeleton::{backbone, classify_backbone, skeleton, Backbone, BackboneType, PendantEdge, Skeleton};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("map has no edges")]
    Empty,
    #[error("sigma and alpha have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("entry {0} is out of range")]
    OutOfRange(usize),
    #[error("alpha is not a fixed-point-free involution at half-edge {0}")]
    BadAlpha(usize),
    #[error("sigma is not a permutation (half-edge {0} has two preimages)")]
    BadSigma(usize),
    #[error("map is disconnected")]
    Disconnected,
    #[error("map is not planar: V - E + F = {0}")]
    NotPlanar(i64),
    #[error("face {face} has degree {degree}, expected 4")]
    NotQuadrangulation { face: usize, degree: usize },
    #[error("map is not bipartite")]
    NotBipartite,
    #[error("label rule violated on edge {0}: |Δℓ| = {1}")]
    LabelJump(usize, i64),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("backbone has unexpected shape: {0}")]
    Shape(String),
    #[error("bad serialized map: {0}")]
    Serde(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarMap {
    alpha: Vec<usize>,
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    vertex: Vec<usize>,
    face: Vec<usize>,
    vertex_rep: Vec<usize>,
    face_rep: Vec<usize>,
}

impl PlanarMap {
    /// Validates a rotation system and computes vertices and faces.
    pub fn build(sigma: Vec<usize>, alpha: Vec<usize>) -> Result<Self, MapError> {
        let n = sigma.len();
        if n == 0 {
            return Err(MapError::Empty);
        }
        if alpha.len() != n {
            return Err(MapError::LengthMismatch(n, alpha.len()));
        }
        for h in 0..n {
            if sigma[h] >= n || alpha[h] >= n {
                return Err(MapError::OutOfRange(h));
            }
            if alpha[h] == h || alpha[alpha[h]] != h {
                return Err(MapError::BadAlpha(h));
            }
        }
        let mut sigma_inv = vec![usize::MAX; n];
        for h in 0..n {
            if sigma_inv[sigma[h]] != usize::MAX {
                return Err(MapError::BadSigma(sigma[h]));
            }
            sigma_inv[sigma[h]] = h;
        }
        let (vertex, vertex_rep) = cycles(n, |h| sigma[h]);
        let (face, face_rep) = cycles(n, |h| sigma_inv[alpha[h]]);
        let map = PlanarMap { alpha, sigma, sigma_inv, vertex, face, vertex_rep, face_rep };
        if map.reachable_from(0).iter().any(|&r| !r) {
            return Err(MapError::Disconnected);
        }
        let euler = map.num_vertices() as i64 - map.num_edges() as i64 + map.num_faces() as i64;
        if euler != 2 {
            return Err(MapError::NotPlanar(euler));
        }
        Ok(map)
    }

    fn reachable_from(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.alpha.len()];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(h) = stack.pop() {
            for nb in [self.alpha[h], self.sigma[h]] {
                if !seen[nb] {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        seen
    }

    pub fn num_half_edges(&self) -> usize {
        self.alpha.len()
    }

    pub fn num_edges(&self) -> usize {
        self.alpha.len() / 2
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_rep.len()
    }

    pub fn num_faces(&self) -> usize {
        self.face_rep.len()
    }

    pub fn alpha(&self, h: usize) -> usize {
        self.alpha[h]
    }

    pub fn sigma(&self, h: usize) -> usize {
        self.sigma[h]
    }

    pub fn sigma_inv(&self, h: usize) -> usize {
        self.sigma_inv[h]
    }

    /// Next half-edge counterclockwise along the face on the left of `h`.
    pub fn phi(&self, h: usize) -> usize {
        self.sigma_inv[self.alpha[h]]
    }

    /// Origin vertex of `h`.
    pub fn vertex(&self, h: usize) -> usize {
        self.vertex[h]
    }

    /// Face on the left of `h`, which is also the face of corner `h`.
    pub fn face(&self, h: usize) -> usize {
        self.face[h]
    }

    pub fn sigma_vec(&self) -> &[usize] {
        &self.sigma
    }

    pub fn alpha_vec(&self) -> &[usize] {
        &self.alpha
    }

    pub fn vertex_rep(&self, v: usize) -> usize {
        self.vertex_rep[v]
    }

    pub fn face_rep(&self, f: usize) -> usize {
        self.face_rep[f]
    }

    /// Half-edges leaving `v`, counterclockwise.
    pub fn around_vertex(&self, v: usize) -> Vec<usize> {
        orbit(self.vertex_rep[v], |h| self.sigma[h])
    }

    /// Half-edges (equivalently corners) of face `f` in counterclockwise order.
    pub fn around_face(&self, f: usize) -> Vec<usize> {
        orbit(self.face_rep[f], |h| self.phi(h))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.around_vertex(v).len()
    }

    pub fn face_degree(&self, f: usize) -> usize {
        self.around_face(f).len()
    }

    /// Graph distances from `v` to every vertex.
    pub fn bfs(&self, v: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.num_vertices()];
        dist[v] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for h in self.around_vertex(u) {
                let w = self.vertex[self.alpha[h]];
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_bipartite(&self) -> bool {
        let d = self.bfs(0);
        (0..self.num_half_edges()).all(|h| d[self.vertex[h]] % 2 != d[self.vertex[self.alpha[h]]] % 2)
    }

    /// Code of the map rooted at half-edge `root`. Half-edges are numbered in
    /// breadth-first discovery order through `alpha` and `sigma`; the code
    /// lists, in that order, the numbers of `alpha(h)`, `sigma(h)` and the tag
    /// of `h`. Two rooted maps have equal codes iff they are isomorphic as
    /// rooted maps with tags.
    pub fn rooted_code(&self, root: usize, tag: impl Fn(usize) -> i64) -> Vec<u8> {
        let n = self.num_half_edges();
        let mut num = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        num[root] = 0;
        order.push(root);
        let mut i = 0;
        let mut out = Vec::with_capacity(n * 3 * 8);
        while i < order.len() {
            let h = order[i];
            i += 1;
            for nb in [self.alpha[h], self.sigma[h]] {
                if num[nb] == usize::MAX {
                    num[nb] = order.len();
                    order.push(nb);
                }
                out.extend_from_slice(&(num[nb] as u64).to_le_bytes());
            }
            out.extend_from_slice(&tag(h).to_le_bytes());
        }
        out
    }

    /// Isomorphism-class key: the smallest rooted code over all roots.
    pub fn canonical_code(&self, tag: impl Fn(usize) -> i64) -> Vec<u8> {
        (0..self.num_half_edges())
            .map(|r| self.rooted_code(r, &tag))
            .min()
            .expect("map has half-edges")
    }

    pub fn to_record(&self) -> MapRecord {
        MapRecord { sigma: self.sigma.clone(), alpha: self.alpha.clone(), labels: None }
    }
}

fn orbit(start: usize, next: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut out = vec![start];
    let mut h = next(start);
    while h != start {
        out.push(h);
        h = next(h);
    }
    out
}

fn cycles(n: usize, next: impl Fn(usize) -> usize) -> (Vec<usize>, Vec<usize>) {
    let mut id = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for start in 0..n {
        if id[start] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(start);
        let mut h = start;
        loop {
            id[h] = c;
            h = next(h);
            if h == start {
                break;
            }
        }
    }
    (id, reps)
}

/// A planar map all of whose faces have degree 4 (hence bipartite).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadrangulation(PlanarMap);

impl Quadrangulation {
    pub fn new(map: PlanarMap) -> Result<Self, MapError> {
        for f in 0..map.num_faces() {
            let d = map.face_degree(f);
            if d != 4 {
                return Err(MapError::NotQuadrangulation { face: f, degree: d });
            }
        }
        if !map.is_bipartite() {
            return Err(MapError::NotBipartite);
        }
        Ok(Quadrangulation(map))
    }

    pub fn map(&self) -> &PlanarMap {
        &self.0
    }

    pub fn into_map(self) -> PlanarMap {
        self.0
    }

    /// Number of faces.
    pub fn size(&self) -> usize {
        self.0.num_faces()
    }
}

/// A planar map with integer vertex labels differing by at most 1 along edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMap {
    map: PlanarMap,
    labels: Vec<i64>,
}

impl LabeledMap {
    pub fn new(map: PlanarMap, labels: Vec<i64>) -> Result<Self, MapError> {
        if labels.len() != map.num_vertices() {
            return Err(MapError::LabelCount { expected: map.num_vertices(), got: labels.len() });
        }
        for h in 0..map.num_half_edges() {
            let d = (labels[map.vertex(h)] - labels[map.vertex(map.alpha(h))]).abs();
            if d > 1 {
                return Err(MapError::LabelJump(h / 2, d));
            }
        }
        Ok(LabeledMap { map, labels })
    }

    pub fn map(&self) -> &PlanarMap {
        &self.map
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> i64 {
        self.labels[v]
    }

    /// Label of the origin of half-edge (corner) `h`.
    pub fn corner_label(&self, h: usize) -> i64 {
        self.labels[self.map.vertex(h)]
    }

    pub fn to_record(&self) -> MapRecord {
        MapRecord { sigma: self.map.sigma.clone(), alpha: self.map.alpha.clone(), labels: Some(self.labels.clone()) }
    }
}

/// Serialized form of a map: the two permutations and optional vertex labels,
/// vertices numbered by first appearance of a `sigma` cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapRecord {
    pub sigma: Vec<usize>,
    pub alpha: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<i64>>,
}

impl MapRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, MapError> {
        serde_json::from_str(s).map_err(|e| MapError::Serde(e.to_string()))
    }

    pub fn to_map(&self) -> Result<PlanarMap, MapError> {
        PlanarMap::build(self.sigma.clone(), self.alpha.clone())
    }

    pub fn to_labeled(&self) -> Result<LabeledMap, MapError> {
        let labels = self.labels.clone().ok_or_else(|| MapError::Serde("missing labels".into()))?;
        LabeledMap::new(self.to_map()?, labels)
    }
}
