//! Uniform random pointed quadrangulations through labelled trees, and Monte
//! Carlo estimates of distance statistics.
//!
//! A uniform plane tree comes from the cycle lemma applied to a shuffled
//! bridge; labels get independent increments in {-1, 0, 1} and are shifted to
//! have minimum 1. The pointed vertex then sits at label 0 and every label is
//! the distance to it.
//!
//! Sample `i` of a run draws from its own ChaCha stream `i` under the master
//! seed, so results do not depend on the thread count.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::bijection::{inverse, PointedQuadrangulation};
use crate::geodesic::GeometricMixture;
use crate::oracle::{labeled_tree, pointed_class_key, tree_from_dyck};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("argument out of range: {0}")]
    Domain(String),
    #[error("only {accepted} of {wanted} samples accepted after {attempts} attempts")]
    Insufficient { accepted: usize, wanted: usize, attempts: usize },
}

pub type Result<T> = std::result::Result<T, SamplerError>;

/// Random stream of sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A plane tree as a Dyck word (`true` = up-step; edge `e` is the `e`-th
/// up-step) with the label increment along each edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledTree {
    pub word: Vec<bool>,
    pub inc: Vec<i8>,
}

impl LabeledTree {
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut steps: Vec<bool> = (0..2 * n + 1).map(|i| i < n).collect();
        steps.shuffle(rng);
        let (mut h, mut min, mut at) = (0i64, 0i64, 0usize);
        for (i, &up) in steps.iter().enumerate() {
            h += if up { 1 } else { -1 };
            if h < min {
                min = h;
                at = i;
            }
        }
        // the rotation starting just after the first minimum is a Dyck word plus a final down-step
        steps.rotate_left(at + 1);
        steps.pop();
        let inc = (0..n).map(|_| rng.gen_range(-1i8..=1)).collect();
        LabeledTree { word: steps, inc }
    }

    pub fn edges(&self) -> usize {
        self.inc.len()
    }

    /// Labels (minimum 1) of vertices `0..=n`, the root being 0 and the child
    /// end of edge `e` being `e + 1`, and the contour sequence of vertices.
    pub fn labels_and_contour(&self) -> (Vec<u32>, Vec<u32>) {
        let n = self.edges();
        let mut lab = vec![0i64; n + 1];
        let mut contour = Vec::with_capacity(2 * n);
        let mut stack = vec![0u32];
        let mut e = 0;
        for &up in &self.word {
            let top = *stack.last().expect("word is a Dyck word");
            contour.push(top);
            if up {
                lab[e + 1] = lab[top as usize] + i64::from(self.inc[e]);
                stack.push(e as u32 + 1);
                e += 1;
            } else {
                stack.pop();
            }
        }
        let min = *lab.iter().min().expect("tree has a root");
        (lab.into_iter().map(|l| (l - min + 1) as u32).collect(), contour)
    }

    /// Labels only, without the contour.
    pub fn labels(&self) -> Vec<u32> {
        self.labels_and_contour().0
    }

    /// The same tree through the generic map structures, followed by the
    /// inverse bijection.
    pub fn to_pointed_quadrangulation(&self) -> PointedQuadrangulation {
        let (map, parent) = tree_from_dyck(&self.word);
        let inc: Vec<i64> = self.inc.iter().map(|&i| i64::from(i)).collect();
        inverse(&labeled_tree(&map, &parent, &inc)).expect("labelled trees invert")
    }
}

/// Uniform quadrangulation with `n` faces and a uniform marked vertex; returns
/// the map with its single source.
pub fn sample_pointed_quadrangulation(n: usize, seed: u64) -> Result<PointedQuadrangulation> {
    if n == 0 {
        return Err(SamplerError::Domain("n must be positive".into()));
    }
    Ok(LabeledTree::random(n, &mut sample_rng(seed, 0)).to_pointed_quadrangulation())
}

/// Vertex graph of the quadrangulation of a labelled tree, in adjacency-array
/// form. Tree vertices keep their numbering; the pointed vertex is `n + 1`.
#[derive(Debug, Clone)]
pub struct SchaefferGraph {
    pub labels: Vec<u32>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
}

impl SchaefferGraph {
    pub fn new(tree: &LabeledTree) -> Self {
        let n = tree.edges();
        let (mut labels, contour) = tree.labels_and_contour();
        let pointed = (n + 1) as u32;
        let maxl = *labels.iter().max().expect("tree has a root") as usize;
        let mut last = vec![usize::MAX; maxl + 1];
        let mut edges = Vec::with_capacity(2 * n);
        // each corner is joined to the closest preceding corner in contour order with label one less
        for i in 0..4 * n {
            let c = i % (2 * n);
            let l = labels[contour[c] as usize] as usize;
            if i >= 2 * n {
                let target = if l == 1 { pointed } else { contour[last[l - 1]] };
                edges.push((contour[c], target));
            }
            last[l] = c;
        }
        labels.push(0);
        let nv = n + 2;
        let mut deg = vec![0usize; nv + 1];
        for &(a, b) in &edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut offsets = vec![0usize; nv + 1];
        for v in 0..nv {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![0u32; offsets[nv]];
        for &(a, b) in &edges {
            adj[fill[a as usize]] = b;
            fill[a as usize] += 1;
            adj[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        SchaefferGraph { labels, offsets, adj }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn pointed(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn bfs(&self, v: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.num_vertices()];
        dist[v] = 0;
        let mut queue = VecDeque::from([v as u32]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &w in self.neighbors(u as usize) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distance between two vertices, stopping the search at `b`.
    pub fn distance(&self, a: usize, b: usize) -> u32 {
        if a == b {
            return 0;
        }
        let mut dist = vec![u32::MAX; self.num_vertices()];
        dist[a] = 0;
        let mut queue = VecDeque::from([a as u32]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &w in self.neighbors(u as usize) {
                if dist[w as usize] == u32::MAX {
                    if w as usize == b {
                        return du + 1;
                    }
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        u32::MAX
    }
}

/// Distances from the pointed vertex to a uniform other vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointSample {
    pub n: usize,
    pub distances: Vec<u32>,
}

impl TwoPointSample {
    pub fn scale(&self) -> f64 {
        (self.n as f64).powf(0.25)
    }

    /// Counts per distance, index = distance.
    pub fn histogram(&self) -> Vec<u64> {
        let max = self.distances.iter().copied().max().unwrap_or(0) as usize;
        let mut h = vec![0u64; max + 1];
        for &d in &self.distances {
            h[d as usize] += 1;
        }
        h
    }

    pub fn mean_rescaled(&self) -> f64 {
        self.distances.iter().map(|&d| f64::from(d)).sum::<f64>() / self.distances.len() as f64 / self.scale()
    }

    /// Fraction of samples with `d / n^{1/4} > x`.
    pub fn mass_above(&self, x: f64) -> f64 {
        let s = self.scale();
        self.distances.iter().filter(|&&d| f64::from(d) / s > x).count() as f64 / self.distances.len() as f64
    }

    /// Largest gap between the empirical distribution of distances and `cdf`,
    /// where `P(d <= i)` is compared with `cdf((i + shift) / n^{1/4})`.
    pub fn ks_distance(&self, shift: f64, cdf: impl Fn(f64) -> f64) -> f64 {
        let h = self.histogram();
        let total = self.distances.len() as f64;
        let s = self.scale();
        let mut acc = 0u64;
        let mut worst: f64 = 0.0;
        for (i, &c) in h.iter().enumerate() {
            acc += c;
            worst = worst.max((acc as f64 / total - cdf((i as f64 + shift) / s)).abs());
        }
        worst
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(SamplerError::Domain("n must be positive".into()));
    }
    Ok(())
}

pub fn empirical_two_point(n: usize, samples: usize, seed: u64) -> Result<TwoPointSample> {
    check_n(n)?;
    let distances = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let t = LabeledTree::random(n, &mut rng);
            let v = rng.gen_range(0..=n);
            t.labels()[v]
        })
        .collect();
    Ok(TwoPointSample { n, distances })
}

/// Pairwise distances `(d12, d23, d31)` between the pointed vertex and two
/// further uniform distinct vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreePointSample {
    pub n: usize,
    pub triples: Vec<[u32; 3]>,
}

impl ThreePointSample {
    pub fn scale(&self) -> f64 {
        (self.n as f64).powf(0.25)
    }

    /// Counts over cubic bins of side `width` in rescaled distances.
    pub fn histogram(&self, width: f64) -> BTreeMap<[u32; 3], u64> {
        let s = self.scale() * width;
        let mut h = BTreeMap::new();
        for t in &self.triples {
            let key = t.map(|d| (f64::from(d) / s) as u32);
            *h.entry(key).or_insert(0) += 1;
        }
        h
    }
}

pub fn empirical_three_point(n: usize, samples: usize, seed: u64) -> Result<ThreePointSample> {
    if n < 2 {
        return Err(SamplerError::Domain("three distinct vertices need n >= 2".into()));
    }
    let triples = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let g = SchaefferGraph::new(&LabeledTree::random(n, &mut rng));
            let a = rng.gen_range(0..=n);
            let b = loop {
                let b = rng.gen_range(0..=n);
                if b != a {
                    break b;
                }
            };
            [g.labels[a], g.distance(a, b), g.labels[b]]
        })
        .collect();
    Ok(ThreePointSample { n, triples })
}

/// Numbers of geodesic points, per requested distance `s` from the pointed
/// vertex, for accepted pairs (pointed vertex, uniform vertex at distance at
/// least `d_min`).
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCounts {
    pub s_values: Vec<u32>,
    pub d_min: u32,
    pub attempts: usize,
    pub separations: Vec<u32>,
    /// `counts[k][j]`: count at `s_values[k]` in accepted sample `j`.
    pub counts: Vec<Vec<u32>>,
}

impl GeodesicCounts {
    pub fn accepted(&self) -> usize {
        self.separations.len()
    }

    pub fn pmf(&self, k: usize) -> BTreeMap<u32, f64> {
        let total = self.counts[k].len() as f64;
        let mut m = BTreeMap::new();
        for &c in &self.counts[k] {
            *m.entry(c).or_insert(0.0) += 1.0 / total;
        }
        m
    }

    pub fn mean(&self, k: usize) -> f64 {
        self.counts[k].iter().map(|&c| f64::from(c)).sum::<f64>() / self.counts[k].len() as f64
    }

    /// Total-variation distance between the empirical law at `s_values[k]` and
    /// a law on `c >= 1`.
    pub fn tv_distance(&self, k: usize, law: &GeometricMixture) -> f64 {
        let pmf = self.pmf(k);
        let top = pmf.keys().copied().max().unwrap_or(0).max(1);
        let p = |c: u32| law.eval(c).to_f64().unwrap_or(f64::NAN);
        let mut sum = pmf.get(&0).copied().unwrap_or(0.0);
        for c in 1..=top {
            sum += (pmf.get(&c).copied().unwrap_or(0.0) - p(c)).abs();
        }
        sum += law.tail(top).to_f64().unwrap_or(f64::NAN).abs();
        sum / 2.0
    }
}

/// Geodesic-point counts: a vertex `v` is counted at `s` when `d1(v) = s` and
/// `d1(v) + d2(v) = d12`. Attempts are drawn until `samples` are accepted or
/// `max_attempts` is exhausted.
pub fn empirical_geodesic_counts(
    s_values: &[u32],
    d_min: u32,
    n: usize,
    samples: usize,
    max_attempts: usize,
    seed: u64,
) -> Result<GeodesicCounts> {
    check_n(n)?;
    if let Some(&s) = s_values.iter().find(|&&s| s == 0 || s >= d_min) {
        return Err(SamplerError::Domain(format!("s = {s} must lie in 1..{d_min}")));
    }
    let one = |i: u64| -> Option<(u32, Vec<u32>)> {
        let mut rng = sample_rng(seed, i);
        let tree = LabeledTree::random(n, &mut rng);
        let v = rng.gen_range(0..=n);
        let labels = tree.labels();
        let d12 = labels[v];
        if d12 < d_min {
            return None;
        }
        let g = SchaefferGraph::new(&tree);
        let d2 = g.bfs(v);
        let mut counts = vec![0u32; s_values.len()];
        for (w, (&d1, &dv)) in g.labels.iter().zip(&d2).enumerate() {
            if d1 + dv == d12 {
                if let Some(k) = s_values.iter().position(|&s| s == d1) {
                    counts[k] += 1;
                }
            }
            debug_assert!(w < g.num_vertices());
        }
        Some((d12, counts))
    };
    let mut out = GeodesicCounts {
        s_values: s_values.to_vec(),
        d_min,
        attempts: 0,
        separations: Vec::new(),
        counts: vec![Vec::new(); s_values.len()],
    };
    let batch = samples.max(64);
    while out.accepted() < samples && out.attempts < max_attempts {
        let end = (out.attempts + batch).min(max_attempts);
        let results: Vec<_> = (out.attempts as u64..end as u64).into_par_iter().map(one).collect();
        for r in results {
            out.attempts += 1;
            if let Some((d12, counts)) = r {
                out.separations.push(d12);
                for (k, c) in counts.into_iter().enumerate() {
                    out.counts[k].push(c);
                }
                if out.accepted() == samples {
                    break;
                }
            }
        }
    }
    if out.accepted() < samples {
        return Err(SamplerError::Insufficient { accepted: out.accepted(), wanted: samples, attempts: out.attempts });
    }
    Ok(out)
}

/// Number of samples in each pointed isomorphism class, keyed as in
/// [`pointed_class_key`].
pub fn pointed_class_histogram(n: usize, samples: usize, seed: u64) -> Result<BTreeMap<Vec<u8>, u64>> {
    check_n(n)?;
    let trees: Vec<LabeledTree> =
        (0..samples as u64).into_par_iter().map(|i| LabeledTree::random(n, &mut sample_rng(seed, i))).collect();
    let mut class_of: HashMap<LabeledTree, Vec<u8>> = HashMap::new();
    let mut hist = BTreeMap::new();
    for t in trees {
        let key = class_of
            .entry(t)
            .or_insert_with_key(|t| {
                let pq = t.to_pointed_quadrangulation();
                pointed_class_key(pq.map(), pq.sources[0])
            })
            .clone();
        *hist.entry(key).or_insert(0) += 1;
    }
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson test of observed counts against probabilities; a key outside
/// `expected` gives an infinite statistic.
pub fn chi_square<K: Ord>(observed: &BTreeMap<K, u64>, expected: &BTreeMap<K, f64>) -> ChiSquare {
    let total: u64 = observed.values().sum();
    let mut stat = if observed.keys().any(|k| !expected.contains_key(k)) { f64::INFINITY } else { 0.0 };
    for (k, &p) in expected {
        let e = p * total as f64;
        let o = observed.get(k).copied().unwrap_or(0) as f64;
        stat += (o - e).powi(2) / e;
    }
    let dof = expected.len().saturating_sub(1).max(1);
    let p_value = if stat.is_finite() {
        1.0 - ChiSquared::new(dof as f64).expect("positive degrees of freedom").cdf(stat)
    } else {
        0.0
    };
    ChiSquare { statistic: stat, dof, p_value }
}
