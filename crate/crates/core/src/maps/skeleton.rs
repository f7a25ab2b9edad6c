//! Skeleton (pendant trees pruned) and backbone (bivalent vertices smoothed)
//! of a labelled map, and the classification of three-face backbones.

use serde::Serialize;

use super::{LabeledMap, MapError, PlanarMap};

/// A pendant edge removed while pruning, enough to reinsert it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendantEdge {
    /// Half-edge from the attachment vertex to the leaf.
    pub toward_leaf: usize,
    pub from_leaf: usize,
    /// Half-edge at the attachment vertex right before `toward_leaf` in
    /// counterclockwise order.
    pub after: usize,
    pub leaf_label: i64,
}

#[derive(Debug, Clone)]
pub struct Skeleton {
    /// `None` when the input had a single face (a tree prunes away entirely).
    pub map: Option<LabeledMap>,
    /// Original id of each skeleton half-edge.
    pub kept: Vec<usize>,
    /// Removed edges in removal order.
    pub removed: Vec<PendantEdge>,
    original_len: usize,
}

/// Repeatedly removes edges ending at a univalent vertex.
pub fn skeleton(input: &LabeledMap) -> Skeleton {
    let m = input.map();
    let n = m.num_half_edges();
    let mut sigma = m.sigma.clone();
    let mut sigma_inv = m.sigma_inv.clone();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..m.num_vertices()).map(|v| m.degree(v)).collect();
    let mut rep: Vec<usize> = m.vertex_rep.clone();
    let mut removed = Vec::new();
    let single_face = m.num_faces() == 1;
    let mut stack: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] == 1).collect();
    while let Some(u) = stack.pop() {
        if deg[u] != 1 {
            continue;
        }
        let h_leaf = rep[u];
        let h_att = m.alpha(h_leaf);
        let w = m.vertex(h_att);
        if deg[w] == 1 {
            // Last edge of a tree.
            break;
        }
        let pred = sigma_inv[h_att];
        let next = sigma[h_att];
        sigma[pred] = next;
        sigma_inv[next] = pred;
        rep[w] = pred;
        alive[h_att] = false;
        alive[h_leaf] = false;
        deg[u] = 0;
        deg[w] -= 1;
        if deg[w] == 1 {
            stack.push(w);
        }
        removed.push(PendantEdge { toward_leaf: h_att, from_leaf: h_leaf, after: pred, leaf_label: input.label(u) });
    }
    if single_face {
        return Skeleton { map: None, kept: vec![], removed, original_len: n };
    }
    let kept: Vec<usize> = (0..n).filter(|&h| alive[h]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &h) in kept.iter().enumerate() {
        index[h] = i;
    }
    let s: Vec<usize> = kept.iter().map(|&h| index[sigma[h]]).collect();
    let a: Vec<usize> = kept.iter().map(|&h| index[m.alpha(h)]).collect();
    let map = PlanarMap::build(s, a).expect("pruning a planar map keeps it planar");
    let labels = (0..map.num_vertices()).map(|v| input.corner_label(kept[map.vertex_rep(v)])).collect();
    let map = LabeledMap::new(map, labels).expect("labels are inherited");
    Skeleton { map: Some(map), kept, removed, original_len: n }
}

impl Skeleton {
    /// Original vertices (as origins of original half-edges) that survive.
    pub fn contains_vertex(&self, original: &PlanarMap, v: usize) -> bool {
        self.kept.iter().any(|&h| original.vertex(h) == v)
    }

    /// Skeleton half-edge on the boundary of the face of the original corner
    /// `h`, found by walking that face counterclockwise.
    pub fn locate_face(&self, original: &PlanarMap, h: usize) -> Option<usize> {
        let index = self.index();
        let mut c = h;
        for _ in 0..original.num_half_edges() {
            if let Some(i) = index[c] {
                return Some(i);
            }
            c = original.phi(c);
        }
        None
    }

    fn index(&self) -> Vec<Option<usize>> {
        let mut index = vec![None; self.original_len];
        for (i, &h) in self.kept.iter().enumerate() {
            index[h] = Some(i);
        }
        index
    }

    /// Reinserts the pendant trees, reproducing the original numbering.
    pub fn reconstruct(&self) -> Result<LabeledMap, MapError> {
        let sk = self.map.as_ref().ok_or(MapError::Empty)?;
        let n = self.original_len;
        let mut sigma = vec![usize::MAX; n];
        let mut alpha = vec![usize::MAX; n];
        let mut origin_label = vec![0i64; n];
        for (i, &h) in self.kept.iter().enumerate() {
            sigma[h] = self.kept[sk.map().sigma(i)];
            alpha[h] = self.kept[sk.map().alpha(i)];
            origin_label[h] = sk.corner_label(i);
        }
        for e in self.removed.iter().rev() {
            sigma[e.toward_leaf] = sigma[e.after];
            sigma[e.after] = e.toward_leaf;
            sigma[e.from_leaf] = e.from_leaf;
            alpha[e.toward_leaf] = e.from_leaf;
            alpha[e.from_leaf] = e.toward_leaf;
            origin_label[e.toward_leaf] = origin_label[e.after];
            origin_label[e.from_leaf] = e.leaf_label;
        }
        let map = PlanarMap::build(sigma, alpha)?;
        let labels = (0..map.num_vertices()).map(|v| origin_label[map.vertex_rep(v)]).collect();
        LabeledMap::new(map, labels)
    }
}

#[derive(Debug, Clone)]
pub enum Backbone {
    /// The skeleton is a simple cycle; smoothing leaves no vertex.
    Cycle,
    Map {
        map: PlanarMap,
        /// Skeleton id of each backbone half-edge.
        kept: Vec<usize>,
    },
}

/// Smooths every bivalent vertex of a skeleton.
pub fn backbone(sk: &PlanarMap) -> Backbone {
    let n = sk.num_half_edges();
    if (0..sk.num_vertices()).all(|v| sk.degree(v) == 2) {
        return Backbone::Cycle;
    }
    let mut alpha = sk.alpha.clone();
    let mut alive = vec![true; n];
    for v in 0..sk.num_vertices() {
        let around = sk.around_vertex(v);
        if around.len() != 2 {
            continue;
        }
        let (h1, h2) = (around[0], around[1]);
        let (a, b) = (alpha[h1], alpha[h2]);
        alpha[a] = b;
        alpha[b] = a;
        alive[h1] = false;
        alive[h2] = false;
    }
    let kept: Vec<usize> = (0..n).filter(|&h| alive[h]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &h) in kept.iter().enumerate() {
        index[h] = i;
    }
    let s = kept.iter().map(|&h| index[sk.sigma(h)]).collect();
    let a = kept.iter().map(|&h| index[alpha[h]]).collect();
    let map = PlanarMap::build(s, a).expect("smoothing keeps the map planar");
    Backbone::Map { map, kept }
}

impl Backbone {
    /// Backbone half-edge on the boundary of the face of skeleton corner `h`.
    pub fn locate_face(&self, sk: &PlanarMap, h: usize) -> Option<usize> {
        let Backbone::Map { kept, .. } = self else { return None };
        let mut index = vec![None; sk.num_half_edges()];
        for (i, &k) in kept.iter().enumerate() {
            index[k] = Some(i);
        }
        let mut c = h;
        for _ in 0..sk.num_half_edges() {
            if let Some(i) = index[c] {
                return Some(i);
            }
            c = sk.phi(c);
        }
        None
    }
}

/// The seven shapes of a three-face backbone, relative to the numbered faces.
///
/// * `Theta`: two trivalent vertices joined by three edges; every pair of
///   faces shares a boundary edge.
/// * `Eight12`, `Eight23`, `Eight31`: a single 4-valent vertex with two loops;
///   the boundary between the named faces has shrunk to that vertex.
/// * `Dumbbell23`, `Dumbbell31`, `Dumbbell12`: two loops joined by a bridge;
///   the named faces share no boundary at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BackboneType {
    Theta,
    Eight12,
    Eight23,
    Eight31,
    Dumbbell23,
    Dumbbell31,
    Dumbbell12,
}

impl BackboneType {
    /// Shapes in which every pair of faces has a boundary containing a vertex.
    pub fn pairwise_touching(self) -> bool {
        matches!(self, BackboneType::Theta | BackboneType::Eight12 | BackboneType::Eight23 | BackboneType::Eight31)
    }
}

/// Classifies a three-face backbone. `faces[i]` is a half-edge whose left face
/// is face `i + 1`.
pub fn classify_backbone(map: &PlanarMap, faces: [usize; 3]) -> Result<BackboneType, MapError> {
    if map.num_faces() != 3 {
        return Err(MapError::Shape(format!("{} faces", map.num_faces())));
    }
    let f: Vec<usize> = faces.iter().map(|&h| map.face(h)).collect();
    if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
        return Err(MapError::Shape("marked faces are not distinct".into()));
    }
    let has_loop = (0..map.num_half_edges()).any(|h| map.vertex(h) == map.vertex(map.alpha(h)));
    let degs: Vec<usize> = f.iter().map(|&x| map.face_degree(x)).collect();
    let wide = |d: usize| degs.iter().position(|&x| x == d);
    match (map.num_vertices(), map.num_edges(), has_loop) {
        (2, 3, false) => Ok(BackboneType::Theta),
        (2, 3, true) => match wide(4) {
            Some(0) => Ok(BackboneType::Dumbbell23),
            Some(1) => Ok(BackboneType::Dumbbell31),
            Some(2) => Ok(BackboneType::Dumbbell12),
            _ => Err(MapError::Shape(format!("dumbbell with face degrees {degs:?}"))),
        },
        (1, 2, true) => match wide(2) {
            Some(2) => Ok(BackboneType::Eight12),
            Some(0) => Ok(BackboneType::Eight23),
            Some(1) => Ok(BackboneType::Eight31),
            _ => Err(MapError::Shape(format!("figure-eight with face degrees {degs:?}"))),
        },
        (v, e, _) => Err(MapError::Shape(format!("{v} vertices, {e} edges"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::tests::random_tree;
    use proptest::prelude::*;

    /// Theta graph: vertices a, b; edges e0, e1, e2 from a to b.
    fn theta() -> PlanarMap {
        // half-edge 2i at a, 2i+1 at b.
        PlanarMap::build(vec![2, 5, 4, 1, 0, 3], vec![1, 0, 3, 2, 5, 4]).unwrap()
    }

    /// Figure-eight: one vertex with loops (0,1) and (2,3), ccw order 0,1,2,3.
    fn eight() -> PlanarMap {
        PlanarMap::build(vec![1, 2, 3, 0], vec![1, 0, 3, 2]).unwrap()
    }

    /// Dumbbell: loop (0,1) at a, bridge (2,3) a-b, loop (4,5) at b.
    fn dumbbell() -> PlanarMap {
        PlanarMap::build(vec![1, 2, 0, 4, 5, 3], vec![1, 0, 3, 2, 5, 4]).unwrap()
    }

    fn faces3(m: &PlanarMap) -> [usize; 3] {
        [m.face_rep(0), m.face_rep(1), m.face_rep(2)]
    }

    #[test]
    fn classify_shapes() {
        let t = theta();
        assert_eq!(t.num_faces(), 3);
        assert_eq!(classify_backbone(&t, faces3(&t)).unwrap(), BackboneType::Theta);

        let e = eight();
        assert_eq!(e.num_faces(), 3);
        let wide = (0..3).find(|&f| e.face_degree(f) == 2).unwrap();
        let others: Vec<usize> = (0..3).filter(|&f| f != wide).collect();
        let fr = |f: usize| e.face_rep(f);
        assert_eq!(classify_backbone(&e, [fr(others[0]), fr(others[1]), fr(wide)]).unwrap(), BackboneType::Eight12);
        assert_eq!(classify_backbone(&e, [fr(wide), fr(others[0]), fr(others[1])]).unwrap(), BackboneType::Eight23);

        let d = dumbbell();
        assert_eq!(d.num_faces(), 3);
        let wide = (0..3).find(|&f| d.face_degree(f) == 4).unwrap();
        let others: Vec<usize> = (0..3).filter(|&f| f != wide).collect();
        let fr = |f: usize| d.face_rep(f);
        assert_eq!(
            classify_backbone(&d, [fr(others[0]), fr(wide), fr(others[1])]).unwrap(),
            BackboneType::Dumbbell31
        );
        assert!(classify_backbone(&d, [fr(0), fr(0), fr(1)]).is_err());
    }

    #[test]
    fn tree_skeleton_is_empty() {
        let t = random_tree(6, 3);
        let lm = LabeledMap::new(t, vec![0; 7]).unwrap();
        let sk = skeleton(&lm);
        assert!(sk.map.is_none());
        assert!(sk.reconstruct().is_err());
    }

    #[test]
    fn cycle_backbone_is_degenerate() {
        let alpha = vec![1, 0, 3, 2, 5, 4];
        let mut sigma = vec![0; 6];
        for i in 0..3 {
            let out = 2 * i;
            let back = (2 * i + 5) % 6;
            sigma[out] = back;
            sigma[back] = out;
        }
        let tri = PlanarMap::build(sigma, alpha).unwrap();
        assert!(matches!(backbone(&tri), Backbone::Cycle));
    }

    /// Attaches a random tree into corners of `base`.
    fn decorate(base: &PlanarMap, extra: usize, seed: u64) -> PlanarMap {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut sigma = base.sigma.clone();
        let mut alpha = base.alpha.clone();
        for _ in 0..extra {
            let after = rng.gen_range(0..sigma.len());
            let (a, b) = (sigma.len(), sigma.len() + 1);
            sigma.push(sigma[after]);
            sigma[after] = a;
            sigma.push(b);
            alpha.push(b);
            alpha.push(a);
        }
        PlanarMap::build(sigma, alpha).unwrap()
    }

    proptest! {
        #[test]
        fn skeleton_roundtrip_and_backbone(extra in 0usize..25, seed in any::<u64>(), which in 0usize..3) {
            let base = [theta(), eight(), dumbbell()][which].clone();
            let m = decorate(&base, extra, seed);
            let labels: Vec<i64> = crate::maps::PlanarMap::bfs(&m, 0).into_iter().map(|d| d as i64).collect();
            let lm = LabeledMap::new(m.clone(), labels).unwrap();
            let sk = skeleton(&lm);
            let skm = sk.map.clone().unwrap();
            prop_assert_eq!(skm.map().num_edges(), base.num_edges());
            prop_assert_eq!(skm.map().num_faces(), 3);
            prop_assert_eq!(&sk.reconstruct().unwrap(), &lm);
            let Backbone::Map { map: bb, .. } = backbone(skm.map()) else { panic!("not a cycle") };
            prop_assert_eq!(bb.canonical_code(|_| 0), base.canonical_code(|_| 0));
            // Every original face is found on the skeleton.
            for f in 0..m.num_faces() {
                let h = sk.locate_face(&m, m.face_rep(f)).unwrap();
                prop_assert!(skm.map().face(h) < 3);
            }
        }
    }
}
