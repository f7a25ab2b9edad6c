//! Exhaustive enumeration at small sizes: every well-labelled tree, hence every
//! rooted quadrangulation, with distance statistics tallied directly by BFS.
//!
//! Tallies are over rooted quadrangulations divided by the number of roots
//! `4n`, which is the symmetry-weighted count of unrooted pointed maps that
//! the generating functions produce.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::bijection::{inverse, WellLabeledMap};
use crate::maps::{LabeledMap, PlanarMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("size {n} exceeds the enumeration guard {max}")]
    TooLarge { n: usize, max: usize },
    #[error("size must be at least 1")]
    Empty,
    #[error("weighted count {0} is not divisible by the number of roots")]
    NotIntegral(String),
}

/// Size guards for the exhaustive enumerations.
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_tree_edges: usize,
    pub max_faces: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_tree_edges: 7, max_faces: 5 }
    }
}

fn guard(n: usize, max: usize) -> Result<(), OracleError> {
    if n == 0 {
        return Err(OracleError::Empty);
    }
    if n > max {
        return Err(OracleError::TooLarge { n, max });
    }
    Ok(())
}

/// All Dyck words with `n` up-steps.
fn dyck_words(n: usize) -> Vec<Vec<bool>> {
    fn rec(open: usize, close: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if open == 0 && close == 0 {
            out.push(cur.clone());
            return;
        }
        if open > 0 {
            cur.push(true);
            rec(open - 1, close + 1, cur, out);
            cur.pop();
        }
        if close > 0 {
            cur.push(false);
            rec(open, close - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 0, &mut Vec::new(), &mut out);
    out
}

/// Plane tree of a Dyck word. Edge `e` (the `e`-th up-step) has half-edges
/// `2e` (parent to child) and `2e + 1`. Returns the map and, per edge, the
/// parent edge (`None` at the root).
pub(crate) fn tree_from_dyck(word: &[bool]) -> (PlanarMap, Vec<Option<usize>>) {
    let n = word.iter().filter(|&&b| b).count();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut parent_edge = vec![None; n];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(0, None)];
    let mut next_vertex = 1;
    let mut e = 0;
    for &up in word {
        if up {
            let (v, pe) = *stack.last().expect("word is a Dyck word");
            children[v].push(e);
            parent_edge[e] = pe;
            stack.push((next_vertex, Some(e)));
            next_vertex += 1;
            e += 1;
        } else {
            stack.pop();
        }
    }
    let mut sigma = vec![0; 2 * n];
    let alpha: Vec<usize> = (0..2 * n).map(|h| h ^ 1).collect();
    // Vertex of the child end of edge e is e + 1; ring = children, then parent.
    for v in 0..=n {
        let mut ring: Vec<usize> = children[v].iter().map(|&c| 2 * c).collect();
        if v > 0 {
            ring.push(2 * (v - 1) + 1);
        }
        for i in 0..ring.len() {
            sigma[ring[i]] = ring[(i + 1) % ring.len()];
        }
    }
    (PlanarMap::build(sigma, alpha).expect("a Dyck word encodes a plane tree"), parent_edge)
}

/// All well-labelled trees with `n` edges: plane trees rooted at a corner,
/// labels with increments in {-1, 0, 1} along edges and minimum 1.
pub fn enum_well_labeled_trees(n: usize, limits: OracleLimits) -> Result<Vec<WellLabeledMap>, OracleError> {
    guard(n, limits.max_tree_edges)?;
    let mut out = Vec::new();
    for word in dyck_words(n) {
        let (map, parent) = tree_from_dyck(&word);
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let inc: Vec<i64> = (0..n)
                .map(|_| {
                    let i = (c % 3) as i64 - 1;
                    c /= 3;
                    i
                })
                .collect();
            out.push(labeled_tree(&map, &parent, &inc));
        }
    }
    Ok(out)
}

/// Tree of [`tree_from_dyck`] with label increments `inc[e]` from parent to
/// child along edge `e`, shifted so that the minimum label is 1.
pub(crate) fn labeled_tree(map: &PlanarMap, parent: &[Option<usize>], inc: &[i64]) -> WellLabeledMap {
    let n = inc.len();
    let mut edge_label = vec![0i64; n];
    for e in 0..n {
        edge_label[e] = parent[e].map_or(0, |p| edge_label[p]) + inc[e];
    }
    // Map vertices are numbered by first half-edge of each sigma cycle.
    let mut labels = vec![0i64; map.num_vertices()];
    for h in 0..2 * n {
        let v = map.vertex(h);
        labels[v] = if h % 2 == 1 { edge_label[h / 2] } else { parent[h / 2].map_or(0, |p| edge_label[p]) };
    }
    let min = *labels.iter().min().expect("tree has vertices");
    labels.iter_mut().for_each(|l| *l += 1 - min);
    let lm = LabeledMap::new(map.clone(), labels).expect("increments are in {-1,0,1}");
    WellLabeledMap { labeled: lm, face_roots: vec![0] }
}

/// Root label of a tree from [`enum_well_labeled_trees`].
pub fn root_label(t: &WellLabeledMap) -> i64 {
    t.labeled.corner_label(0)
}

/// Every rooted quadrangulation with `n` faces appears once; `f` receives
/// each distinct unrooted shape with its number of distinct rootings.
fn for_each_rooted_class(n: usize, limits: OracleLimits, mut f: impl FnMut(&PlanarMap, usize)) -> Result<usize, OracleError> {
    guard(n, limits.max_faces)?;
    let trees = enum_well_labeled_trees(n, OracleLimits { max_tree_edges: limits.max_faces.max(n), ..limits })?;
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    for t in &trees {
        let pq = inverse(t).expect("well-labelled trees invert");
        let q = pq.map();
        let mut fresh = 0;
        for r in 0..q.num_half_edges() {
            if seen.insert(q.rooted_code(r, |_| 0)) {
                fresh += 1;
            }
        }
        if fresh > 0 {
            f(q, fresh);
        }
    }
    Ok(seen.len())
}

/// Number of rooted quadrangulations with `n` faces.
pub fn count_rooted_quadrangulations(n: usize, limits: OracleLimits) -> Result<usize, OracleError> {
    for_each_rooted_class(n, limits, |_, _| {})
}

fn all_distances(q: &PlanarMap) -> Vec<Vec<u32>> {
    (0..q.num_vertices()).map(|v| q.bfs(v)).collect()
}

fn divide<K: Ord>(tally: BTreeMap<K, BigInt>, roots: usize) -> BTreeMap<K, BigRational> {
    tally.into_iter().map(|(k, v)| (k, BigRational::new(v, BigInt::from(roots)))).collect()
}

/// Weighted number of ordered pairs of distinct vertices at each distance.
pub fn count_pairs(n: usize, limits: OracleLimits) -> Result<BTreeMap<u32, BigRational>, OracleError> {
    let mut tally: BTreeMap<u32, BigInt> = BTreeMap::new();
    for_each_rooted_class(n, limits, |q, mult| {
        for row in all_distances(q) {
            for &d in &row {
                if d > 0 {
                    *tally.entry(d).or_insert_with(BigInt::zero) += mult;
                }
            }
        }
    })?;
    Ok(divide(tally, 4 * n))
}

/// Number of ordered triples of distinct vertices per distance profile
/// `(d12, d23, d31)`.
#[derive(Debug, Clone, Serialize)]
pub struct TripleTable {
    pub n: usize,
    #[serde(serialize_with = "ser_table")]
    pub counts: BTreeMap<(u32, u32, u32), BigInt>,
}

fn ser_table<S: serde::Serializer>(t: &BTreeMap<(u32, u32, u32), BigInt>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(t.len()))?;
    for ((a, b, c), v) in t {
        m.serialize_entry(&format!("{a},{b},{c}"), &v.to_string())?;
    }
    m.end()
}

impl TripleTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn total(&self) -> BigInt {
        self.counts.values().sum()
    }
}

pub fn count_triples(n: usize, limits: OracleLimits) -> Result<TripleTable, OracleError> {
    let mut tally: BTreeMap<(u32, u32, u32), BigInt> = BTreeMap::new();
    for_each_rooted_class(n, limits, |q, mult| {
        let d = all_distances(q);
        let nv = d.len();
        for a in 0..nv {
            for b in 0..nv {
                if a == b {
                    continue;
                }
                for c in 0..nv {
                    if c == a || c == b {
                        continue;
                    }
                    *tally.entry((d[a][b], d[b][c], d[c][a])).or_insert_with(BigInt::zero) += mult;
                }
            }
        }
    })?;
    let roots = BigInt::from(4 * n);
    let mut counts = BTreeMap::new();
    for (k, v) in tally {
        if !(&v % &roots).is_zero() {
            return Err(OracleError::NotIntegral(format!("{k:?}: {v}")));
        }
        counts.insert(k, v / &roots);
    }
    Ok(TripleTable { n, counts })
}

/// Key of the isomorphism class of a quadrangulation with one marked vertex.
pub fn pointed_class_key(q: &PlanarMap, v: usize) -> Vec<u8> {
    q.canonical_code(|h| i64::from(q.vertex(h) == v))
}

/// Probability of each pointed class under the uniform law on rooted
/// quadrangulations with `n` faces and a marked vertex.
pub fn pointed_class_frequencies(n: usize, limits: OracleLimits) -> Result<BTreeMap<Vec<u8>, BigRational>, OracleError> {
    let mut tally: BTreeMap<Vec<u8>, BigInt> = BTreeMap::new();
    let rooted = for_each_rooted_class(n, limits, |q, mult| {
        for v in 0..q.num_vertices() {
            *tally.entry(pointed_class_key(q, v)).or_insert_with(BigInt::zero) += mult;
        }
    })?;
    Ok(divide(tally, rooted * (n + 2)))
}

/// For ordered pairs at distance `s + t`, the weighted number having exactly
/// `c` vertices at distance `s` from the first and `t` from the second.
pub fn count_geodesic_points(n: usize, s: u32, t: u32, limits: OracleLimits) -> Result<BTreeMap<usize, BigRational>, OracleError> {
    let mut tally: BTreeMap<usize, BigInt> = BTreeMap::new();
    for_each_rooted_class(n, limits, |q, mult| {
        let d = all_distances(q);
        let nv = d.len();
        for a in 0..nv {
            for b in 0..nv {
                if d[a][b] != s + t {
                    continue;
                }
                let c = (0..nv).filter(|&v| d[a][v] == s && d[b][v] == t).count();
                *tally.entry(c).or_insert_with(BigInt::zero) += mult;
            }
        }
    })?;
    Ok(divide(tally, 4 * n))
}

/// Weighted number of ordered quadruples of distinct vertices whose distances
/// are `d_ij = s_i + s_j` for the given `(s_1, .., s_4)`.
pub fn count_tangent_quadruples(n: usize, sv: [u32; 4], limits: OracleLimits) -> Result<BigRational, OracleError> {
    let mut tally = BigInt::zero();
    for_each_rooted_class(n, limits, |q, mult| {
        let d = all_distances(q);
        let nv = d.len();
        let mut pick = [0usize; 4];
        fn rec(k: usize, pick: &mut [usize; 4], nv: usize, d: &[Vec<u32>], sv: &[u32; 4], hits: &mut usize) {
            if k == 4 {
                *hits += 1;
                return;
            }
            for v in 0..nv {
                if (0..k).all(|j| pick[j] != v && d[pick[j]][v] == sv[j] + sv[k]) {
                    pick[k] = v;
                    rec(k + 1, pick, nv, d, sv, hits);
                }
            }
        }
        let mut hits = 0;
        rec(0, &mut pick, nv, &d, &sv, &mut hits);
        tally += hits * mult;
    })?;
    Ok(BigRational::new(tally, BigInt::from(4 * n)))
}
