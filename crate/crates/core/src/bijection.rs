//! Bijection between quadrangulations with `p` delayed sources and
//! well-labelled maps with `p` faces, one source per face.
//!
//! Forward: label every vertex by `min_j (τ_j + d_j(v))` and draw one edge in
//! each face of the quadrangulation (between the two maximal corners of a
//! confluent face, or from the maximal corner of a simple face to its
//! clockwise neighbour), then drop the sources.
//!
//! Inverse: inside each face, every corner of label `l` above the face minimum
//! is joined to the first corner of label `l - 1` met counterclockwise, and
//! each minimal corner is joined to a new central vertex labelled one less.

use std::collections::HashMap;

use thiserror::Error;

use crate::gf::DistanceTriple;
use crate::maps::{self, Backbone, BackboneType, LabeledMap, MapError, PlanarMap, Quadrangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BijectionError {
    #[error("invalid sources or delays: {0}")]
    InvalidDelays(String),
    #[error("triple is aligned (one vertex lies on a geodesic between the others)")]
    Aligned,
    #[error("not a valid well-labelled map: {0}")]
    NotWellLabeled(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A quadrangulation with distinguished vertices (sources) and integer delays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedQuadrangulation {
    pub quad: Quadrangulation,
    pub sources: Vec<usize>,
    pub delays: Vec<i64>,
}

/// A labelled map whose faces are numbered: `face_roots[i]` is a half-edge
/// with face `i` on its left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellLabeledMap {
    pub labeled: LabeledMap,
    pub face_roots: Vec<usize>,
}

impl WellLabeledMap {
    pub fn map(&self) -> &PlanarMap {
        self.labeled.map()
    }

    /// Face index (in `face_roots` numbering) of each map face.
    pub fn face_numbering(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.map().num_faces()];
        for (i, &h) in self.face_roots.iter().enumerate() {
            out[self.map().face(h)] = i;
        }
        out
    }

    /// Vertices incident to face `i`.
    pub fn face_vertices(&self, i: usize) -> Vec<usize> {
        let m = self.map();
        let mut vs: Vec<usize> = m.around_face(m.face(self.face_roots[i])).into_iter().map(|h| m.vertex(h)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Tag for canonical codes: label and face number of each corner.
    pub fn tag(&self) -> impl Fn(usize) -> i64 + '_ {
        let faces = self.face_numbering();
        move |h| self.labeled.corner_label(h) * 64 + faces[self.map().face(h)] as i64
    }
}

impl PointedQuadrangulation {
    pub fn new(quad: Quadrangulation, sources: Vec<usize>, delays: Vec<i64>) -> Result<Self, BijectionError> {
        let pq = PointedQuadrangulation { quad, sources, delays };
        pq.validate()?;
        Ok(pq)
    }

    pub fn map(&self) -> &PlanarMap {
        self.quad.map()
    }

    fn validate(&self) -> Result<(), BijectionError> {
        let bad = |s: String| Err(BijectionError::InvalidDelays(s));
        let p = self.sources.len();
        if p == 0 || self.delays.len() != p {
            return bad(format!("{p} sources, {} delays", self.delays.len()));
        }
        let nv = self.map().num_vertices();
        if let Some(&v) = self.sources.iter().find(|&&v| v >= nv) {
            return bad(format!("source {v} out of range"));
        }
        for i in 0..p {
            let d = self.map().bfs(self.sources[i]);
            for j in i + 1..p {
                let dij = d[self.sources[j]] as i64;
                let diff = self.delays[i] - self.delays[j];
                if dij == 0 {
                    return bad(format!("sources {i} and {j} coincide"));
                }
                if dij < 2 {
                    return bad(format!("sources {i} and {j} are adjacent"));
                }
                if diff.abs() >= dij {
                    return bad(format!("|τ{i} - τ{j}| = {} >= d = {dij}", diff.abs()));
                }
                if (diff + dij) % 2 != 0 {
                    return bad(format!("τ{i} - τ{j} + d{i}{j} is odd"));
                }
            }
        }
        Ok(())
    }

    /// `l(v) = min_j (τ_j + d(v, source_j))`.
    pub fn labels(&self) -> Vec<i64> {
        let mut l = vec![i64::MAX; self.map().num_vertices()];
        for (s, &tau) in self.sources.iter().zip(&self.delays) {
            for (v, d) in self.map().bfs(*s).into_iter().enumerate() {
                l[v] = l[v].min(tau + d as i64);
            }
        }
        l
    }

    /// Tag for canonical codes: source number (1-based) or 0.
    pub fn tag(&self) -> impl Fn(usize) -> i64 + '_ {
        let mut src = vec![0i64; self.map().num_vertices()];
        for (i, &s) in self.sources.iter().enumerate() {
            src[s] = i as i64 + 1;
        }
        move |h| src[self.map().vertex(h)]
    }
}

/// Whether two tagged maps are isomorphic, by matching the code of `a` rooted
/// at half-edge 0 against `b` at every root.
pub fn isomorphic(a: &PlanarMap, ta: impl Fn(usize) -> i64, b: &PlanarMap, tb: impl Fn(usize) -> i64) -> bool {
    if a.num_half_edges() != b.num_half_edges() || a.num_vertices() != b.num_vertices() {
        return false;
    }
    let code = a.rooted_code(0, &ta);
    let (deg0, tag0) = (a.degree(a.vertex(0)), ta(0));
    (0..b.num_half_edges()).any(|r| tb(r) == tag0 && b.degree(b.vertex(r)) == deg0 && b.rooted_code(r, &tb) == code)
}

/// Quadrangulation with sources to well-labelled map.
pub fn forward(pq: &PointedQuadrangulation) -> Result<WellLabeledMap, BijectionError> {
    pq.validate()?;
    let q = pq.map();
    let labels = pq.labels();
    let nq = q.num_half_edges();
    let mut partner = vec![usize::MAX; nq];
    for f in 0..q.num_faces() {
        let hs = q.around_face(f);
        let ls: Vec<i64> = hs.iter().map(|&h| labels[q.vertex(h)]).collect();
        let max = *ls.iter().max().expect("face has corners");
        let tops: Vec<usize> = (0..4).filter(|&k| ls[k] == max).collect();
        let (a, b) = match tops.as_slice() {
            [k] => (hs[*k], hs[(k + 3) % 4]),
            [k1, k2] if k2 - k1 == 2 => (hs[*k1], hs[*k2]),
            _ => return Err(BijectionError::NotWellLabeled(format!("face labels {ls:?}"))),
        };
        for (x, y) in [(a, b), (b, a)] {
            if partner[x] != usize::MAX {
                return Err(BijectionError::NotWellLabeled(format!("corner {x} used twice")));
            }
            partner[x] = y;
        }
    }
    let carrying: Vec<usize> = (0..nq).filter(|&h| partner[h] != usize::MAX).collect();
    let mut id = vec![usize::MAX; nq];
    for (i, &h) in carrying.iter().enumerate() {
        id[h] = i;
    }
    let alpha: Vec<usize> = carrying.iter().map(|&h| id[partner[h]]).collect();
    let sigma: Vec<usize> = carrying
        .iter()
        .map(|&h| {
            let mut c = q.sigma(h);
            while partner[c] == usize::MAX {
                c = q.sigma(c);
            }
            id[c]
        })
        .collect();
    let m = PlanarMap::build(sigma, alpha)?;
    let mlabels = (0..m.num_vertices()).map(|v| labels[q.vertex(carrying[m.vertex_rep(v)])]).collect();
    let labeled = LabeledMap::new(m, mlabels)?;

    // Face of each source: in a quadrangle met by the source, the new chord
    // a -> b has on its left the corners strictly after b and before a.
    let mut face_roots = Vec::with_capacity(pq.sources.len());
    for &s in &pq.sources {
        let hs_src = q.vertex_rep(s);
        let quad = q.around_face(q.face(hs_src));
        let pos = |h: usize| quad.iter().position(|&x| x == h).expect("corner in face");
        let a = *quad.iter().find(|&&h| partner[h] != usize::MAX).expect("face has a chord");
        let b = partner[a];
        let (pa, pb, ps) = (pos(a), pos(b), pos(hs_src));
        let left_of_a = (ps + 4 - pb) % 4 < (pa + 4 - pb) % 4 && ps != pb;
        face_roots.push(if left_of_a { id[a] } else { id[b] });
    }
    let wl = WellLabeledMap { labeled, face_roots };
    let mut faces: Vec<usize> = wl.face_roots.iter().map(|&h| wl.map().face(h)).collect();
    faces.sort_unstable();
    faces.dedup();
    if faces.len() != pq.sources.len() || wl.map().num_faces() != faces.len() {
        return Err(BijectionError::NotWellLabeled(format!(
            "{} faces for {} sources",
            wl.map().num_faces(),
            pq.sources.len()
        )));
    }
    Ok(wl)
}

/// Well-labelled map with numbered faces to quadrangulation with sources;
/// source `i` sits in face `i` with delay one less than the face minimum.
pub fn inverse(wl: &WellLabeledMap) -> Result<PointedQuadrangulation, BijectionError> {
    let m = wl.map();
    let lm = &wl.labeled;
    let p = wl.face_roots.len();
    let numbering = wl.face_numbering();
    if m.num_faces() != p || numbering.iter().any(|&i| i == usize::MAX) {
        return Err(BijectionError::NotWellLabeled("face_roots must list every face once".into()));
    }
    let nm = m.num_half_edges();
    // Per corner: (offset, Q half-edge) entries in the corner's sector.
    let mut sector: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nm];
    let mut centers: Vec<Vec<usize>> = vec![Vec::new(); p];
    let mut delays = vec![0i64; p];
    let mut target_corner = vec![usize::MAX; nm];
    for i in 0..p {
        let cs = m.around_face(m.face(wl.face_roots[i]));
        let k = cs.len();
        let ls: Vec<i64> = cs.iter().map(|&c| lm.corner_label(c)).collect();
        let mu = *ls.iter().min().expect("face has corners");
        delays[i] = mu - 1;
        let mut next_at: HashMap<i64, usize> = HashMap::new();
        let mut succ = vec![usize::MAX; k];
        for step in (0..2 * k).rev() {
            let j = step % k;
            if step < k && ls[j] > mu {
                succ[j] = *next_at
                    .get(&(ls[j] - 1))
                    .ok_or_else(|| BijectionError::NotWellLabeled(format!("corner label {} has no successor", ls[j])))?;
            }
            next_at.insert(ls[j], j);
        }
        for j in 0..k {
            let c = cs[j];
            if ls[j] == mu {
                sector[c].push((0, 2 * c));
                centers[i].push(2 * c + 1);
            } else {
                let js = succ[j];
                let target = cs[js];
                target_corner[c] = target;
                sector[c].push(((js + k - j) % k, 2 * c));
                sector[target].push(((j + k - js) % k, 2 * c + 1));
            }
        }
    }
    let nq = 2 * nm;
    let mut sigma = vec![usize::MAX; nq];
    for v in 0..m.num_vertices() {
        let mut ring = Vec::new();
        for c in m.around_vertex(v) {
            let mut s = std::mem::take(&mut sector[c]);
            s.sort_unstable();
            ring.extend(s.into_iter().map(|(_, h)| h));
        }
        for w in 0..ring.len() {
            sigma[ring[w]] = ring[(w + 1) % ring.len()];
        }
    }
    for ring in &centers {
        for w in 0..ring.len() {
            sigma[ring[w]] = ring[(w + 1) % ring.len()];
        }
    }
    let alpha: Vec<usize> = (0..nq).map(|h| h ^ 1).collect();
    let qmap = PlanarMap::build(sigma, alpha)?;
    let sources = centers.iter().map(|ring| qmap.vertex(ring[0])).collect();
    let quad = Quadrangulation::new(qmap)?;
    Ok(PointedQuadrangulation { quad, sources, delays })
}

/// For the output of [`inverse`], the quadrangulation vertex of each map
/// vertex (the arch of corner `c` uses half-edges `2c` and `2c + 1`).
pub fn inverse_vertex_map(wl: &WellLabeledMap, pq: &PointedQuadrangulation) -> Vec<usize> {
    let m = wl.map();
    (0..m.num_vertices()).map(|v| pq.map().vertex(2 * m.vertex_rep(v))).collect()
}

/// Delays `(-s, -t, -u)` for a non-aligned triple of distances.
pub fn delays_for_triple(d: DistanceTriple) -> Result<[i64; 3], BijectionError> {
    let (s, t, u) = d.stu();
    if s == 0 || t == 0 || u == 0 {
        return Err(BijectionError::Aligned);
    }
    Ok([-(s as i64), -(t as i64), -(u as i64)])
}

/// What the map is checked against.
#[derive(Debug, Clone, Copy)]
pub enum Constraint {
    /// Three faces: face minima `1 - s, 1 - t, 1 - u`, every pairwise boundary
    /// reaching label 0, backbone in the pairwise-touching shapes.
    Three { delays: [i64; 3] },
    /// Two faces with minima from `delays`, boundary reaching label 0, and the
    /// marked vertex on the skeleton with label 0.
    Two { delays: [i64; 2], marked: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintReport {
    pub backbone: Option<BackboneType>,
    pub failure: Option<String>,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks the labelling constraints that characterise the image of vertex
/// triples (or aligned pairs plus a marked geodesic point).
pub fn verify_constraints(wl: &WellLabeledMap, c: Constraint) -> ConstraintReport {
    let fail = |s: String, bb| ConstraintReport { backbone: bb, failure: Some(s) };
    let delays: Vec<i64> = match c {
        Constraint::Three { delays } => delays.to_vec(),
        Constraint::Two { delays, .. } => delays.to_vec(),
    };
    let p = delays.len();
    if wl.face_roots.len() != p || wl.map().num_faces() != p {
        return fail(format!("expected {p} faces, found {}", wl.map().num_faces()), None);
    }
    let lm = &wl.labeled;
    let fv: Vec<Vec<usize>> = (0..p).map(|i| wl.face_vertices(i)).collect();
    for i in 0..p {
        let min = fv[i].iter().map(|&v| lm.label(v)).min().expect("face has vertices");
        if min != delays[i] + 1 {
            return fail(format!("face {} minimum {min}, expected {}", i + 1, delays[i] + 1), None);
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            let min = fv[i].iter().filter(|v| fv[j].binary_search(v).is_ok()).map(|&v| lm.label(v)).min();
            match min {
                Some(0) => {}
                Some(x) => return fail(format!("boundary {}-{} minimum {x}", i + 1, j + 1), None),
                None => return fail(format!("faces {} and {} share no vertex", i + 1, j + 1), None),
            }
        }
    }
    let sk = maps::skeleton(lm);
    let Some(skm) = sk.map.as_ref() else {
        return fail("empty skeleton".into(), None);
    };
    match c {
        Constraint::Three { .. } => {
            let bb = maps::backbone(skm.map());
            let Backbone::Map { map: bm, .. } = &bb else {
                return fail("backbone is a cycle".into(), None);
            };
            let mut faces = [0; 3];
            for i in 0..3 {
                let Some(h) = sk
                    .locate_face(wl.map(), wl.face_roots[i])
                    .and_then(|h| bb.locate_face(skm.map(), h))
                else {
                    return fail(format!("face {} lost in backbone", i + 1), None);
                };
                faces[i] = h;
            }
            match maps::classify_backbone(bm, faces) {
                Ok(t) if t.pairwise_touching() => ConstraintReport { backbone: Some(t), failure: None },
                Ok(t) => fail(format!("backbone {t:?}"), Some(t)),
                Err(e) => fail(e.to_string(), None),
            }
        }
        Constraint::Two { marked, .. } => {
            if lm.label(marked) != 0 {
                return fail(format!("marked vertex has label {}", lm.label(marked)), None);
            }
            if !sk.contains_vertex(wl.map(), marked) {
                return fail("marked vertex is not on the skeleton".into(), None);
            }
            ConstraintReport { backbone: None, failure: None }
        }
    }
}

/// Result of pushing a vertex triple through the bijection.
#[derive(Debug, Clone)]
pub struct TripleImage {
    pub map: WellLabeledMap,
    pub constraint: Constraint,
    /// The vertices used as sources, in face order.
    pub sources: Vec<usize>,
    /// The marked geodesic point for aligned triples (a vertex of `map`).
    pub marked: Option<usize>,
}

/// Maps three distinct vertices of `q` to a three-face map (generic case) or
/// a two-face map with a marked vertex (aligned case).
pub fn encode_triple(q: &Quadrangulation, v: [usize; 3]) -> Result<TripleImage, BijectionError> {
    let m = q.map();
    let dist: Vec<Vec<u32>> = v.iter().map(|&x| m.bfs(x)).collect();
    let (d12, d23, d31) = (dist[0][v[1]] as u64, dist[1][v[2]] as u64, dist[2][v[0]] as u64);
    if d12 == 0 || d23 == 0 || d31 == 0 {
        return Err(BijectionError::InvalidDelays("vertices must be distinct".into()));
    }
    let d = DistanceTriple::new(d12, d23, d31).map_err(|e| BijectionError::InvalidDelays(e.to_string()))?;
    match delays_for_triple(d) {
        Ok(delays) => {
            let pq = PointedQuadrangulation::new(q.clone(), v.to_vec(), delays.to_vec())?;
            let map = forward(&pq)?;
            Ok(TripleImage { map, constraint: Constraint::Three { delays }, sources: v.to_vec(), marked: None })
        }
        Err(BijectionError::Aligned) => {
            let (s, t, u) = d.stu();
            // The vertex opposite the vanishing parameter lies between the others.
            let (mid, a, b) = if u == 0 {
                (2, 0, 1)
            } else if s == 0 {
                (0, 1, 2)
            } else {
                debug_assert_eq!(t, 0);
                (1, 2, 0)
            };
            let delays = [-(dist[mid][v[a]] as i64), -(dist[mid][v[b]] as i64)];
            let pq = PointedQuadrangulation::new(q.clone(), vec![v[a], v[b]], delays.to_vec())?;
            let map = forward(&pq)?;
            let marked = marked_in_image(q, &pq, &map, v[mid]);
            Ok(TripleImage {
                map,
                constraint: Constraint::Two { delays, marked },
                sources: vec![v[a], v[b]],
                marked: Some(marked),
            })
        }
        Err(e) => Err(e),
    }
}

/// The image in `wl` of a non-source vertex `x` of `pq`.
fn marked_in_image(q: &Quadrangulation, pq: &PointedQuadrangulation, wl: &WellLabeledMap, x: usize) -> usize {
    // Re-run the corner bookkeeping of the forward map: map vertex k of the
    // image has representative half-edge numbered among carrying corners.
    let qm = q.map();
    let labels = pq.labels();
    let mut carrying = vec![false; qm.num_half_edges()];
    for f in 0..qm.num_faces() {
        let hs = qm.around_face(f);
        let ls: Vec<i64> = hs.iter().map(|&h| labels[qm.vertex(h)]).collect();
        let max = *ls.iter().max().unwrap();
        let tops: Vec<usize> = (0..4).filter(|&k| ls[k] == max).collect();
        let (a, b) = if tops.len() == 1 { (hs[tops[0]], hs[(tops[0] + 3) % 4]) } else { (hs[tops[0]], hs[tops[1]]) };
        carrying[a] = true;
        carrying[b] = true;
    }
    let ids: Vec<usize> = (0..qm.num_half_edges()).filter(|&h| carrying[h]).collect();
    let h = ids.iter().position(|&h| qm.vertex(h) == x).expect("non-source vertex carries an edge");
    wl.map().vertex(h)
}

/// Inverse then forward on a one-face map: the quadrangulation has the right
/// size, labels are distances to the source, and both round trips return an
/// isomorphic object.
pub fn check_pointed_round_trip(wl: &WellLabeledMap) -> Result<(), String> {
    let pq = inverse(wl).map_err(|e| e.to_string())?;
    let n = wl.map().num_edges();
    if pq.quad.size() != n {
        return Err(format!("size {} for a tree with {n} edges", pq.quad.size()));
    }
    let d = pq.map().bfs(pq.sources[0]);
    if pq.labels() != d.iter().map(|&x| i64::from(x)).collect::<Vec<_>>() {
        return Err("labels differ from distances to the source".into());
    }
    let back = forward(&pq).map_err(|e| e.to_string())?;
    if !isomorphic(wl.map(), wl.tag(), back.map(), back.tag()) {
        return Err("forward(inverse(t)) differs from t".into());
    }
    let again = inverse(&back).map_err(|e| e.to_string())?;
    if !isomorphic(pq.map(), pq.tag(), again.map(), again.tag()) {
        return Err("inverse(forward(q)) differs from q".into());
    }
    Ok(())
}

/// Outcome of [`check_triple_round_trip`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleRoundTrip {
    pub aligned: bool,
    pub backbone: Option<BackboneType>,
}

/// Encodes a vertex triple, checks the image constraints, decodes it and
/// compares: isomorphic pointed maps, source distances recovered, face labels
/// equal to shifted distances.
pub fn check_triple_round_trip(q: &Quadrangulation, v: [usize; 3]) -> Result<TripleRoundTrip, String> {
    let img = encode_triple(q, v).map_err(|e| e.to_string())?;
    let rep = verify_constraints(&img.map, img.constraint);
    if let Some(f) = rep.failure {
        return Err(format!("constraint: {f}"));
    }
    let pq = inverse(&img.map).map_err(|e| e.to_string())?;
    let orig = PointedQuadrangulation::new(q.clone(), img.sources.clone(), pq.delays.clone()).map_err(|e| e.to_string())?;
    if !isomorphic(orig.map(), orig.tag(), pq.map(), pq.tag()) {
        return Err("decoded map differs".into());
    }
    let vm = inverse_vertex_map(&img.map, &pq);
    for i in 0..pq.sources.len() {
        let d = pq.map().bfs(pq.sources[i]);
        let d0 = q.map().bfs(img.sources[i]);
        for j in 0..pq.sources.len() {
            if d[pq.sources[j]] != d0[img.sources[j]] {
                return Err(format!("distance between sources {i} and {j} not recovered"));
            }
        }
        for w in img.map.face_vertices(i) {
            if img.map.labeled.label(w) - pq.delays[i] != i64::from(d[vm[w]]) {
                return Err(format!("label of vertex {w} in face {i} is not a shifted distance"));
            }
        }
    }
    Ok(TripleRoundTrip { aligned: img.marked.is_some(), backbone: rep.backbone })
}
