//! Verification suites shared by the command line and the acceptance run.
//! Each suite compares independent routes and lists every disagreement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::bijection::{check_pointed_round_trip, check_triple_round_trip};
use crate::gf::{DistanceTriple, GfEngine};
use crate::maps::BackboneType;
use crate::oracle::{self, OracleLimits};
use crate::sampler::{sample_rng, LabeledTree};
use crate::series::Series;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: impl Into<String>) -> Self {
        SuiteReport { name: name.into(), cases: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `(3^n / 2) C(2n, n)`, the number of triply-pointed quadrangulations.
pub fn triply_pointed_total(n: usize) -> BigInt {
    let mut c = BigInt::from(1);
    for k in 0..n {
        c = c * BigInt::from(2 * n - k) / BigInt::from(k + 1);
    }
    c * BigInt::from(3).pow(n as u32) / BigInt::from(2)
}

pub fn gf_identities(order: usize, max_stu: usize) -> Vec<SuiteReport> {
    GfEngine::new(order)
        .verify_identities(max_stu)
        .into_iter()
        .map(|c| SuiteReport { name: c.name.to_string(), cases: c.cases, failures: c.failures })
        .collect()
}

/// Sum of the three-point coefficients over every valid distance triple
/// against the closed-form total, for sizes `1..=nmax`.
pub fn three_point_totals(nmax: usize) -> SuiteReport {
    let e = GfEngine::new(nmax);
    let dmax = 2 * nmax as u64;
    let mut sum = Series::zero(nmax);
    for d12 in 1..=dmax {
        for d23 in 1..=dmax {
            for d31 in 1..=dmax {
                if let Ok(d) = DistanceTriple::new(d12, d23, d31) {
                    sum = &sum + &e.g_three(d);
                }
            }
        }
    }
    let mut r = SuiteReport::new("three-point totals from series");
    for n in 1..=nmax {
        let want = BigRational::from_integer(triply_pointed_total(n));
        let got = sum.coeff(n);
        r.check(got == want, || format!("n = {n}: {got} != {want}"));
    }
    r
}

/// Series coefficients against exhaustive enumeration for sizes `1..=nmax`.
pub fn oracle_agreement(nmax: usize) -> Vec<SuiteReport> {
    let limits = OracleLimits { max_tree_edges: nmax.max(7), max_faces: nmax.max(5) };
    let e = GfEngine::new(nmax);
    let mut pairs = SuiteReport::new("pair counts = two-point coefficients");
    let mut triples = SuiteReport::new("triple counts = three-point coefficients");
    let mut totals = SuiteReport::new("enumerated triple totals");
    for n in 1..=nmax {
        match oracle::count_pairs(n, limits) {
            Ok(p) => {
                for i in 1..=2 * n + 2 {
                    let want = p.get(&(i as u32)).cloned().unwrap_or_else(BigRational::zero);
                    let got = e.two_point(i).map(|s| s.coeff(n));
                    pairs.check(got.as_ref() == Ok(&want), || format!("n = {n}, d = {i}: {got:?} != {want}"));
                }
            }
            Err(err) => pairs.check(false, || format!("n = {n}: {err}")),
        }
        let table = match oracle::count_triples(n, limits) {
            Ok(t) => t,
            Err(err) => {
                triples.check(false, || format!("n = {n}: {err}"));
                continue;
            }
        };
        let dmax = 2 * n as u64 + 1;
        for d12 in 1..=dmax {
            for d23 in 1..=dmax {
                for d31 in 1..=dmax {
                    let Ok(d) = DistanceTriple::new(d12, d23, d31) else { continue };
                    let got = e.g_three(d).coeff(n);
                    let want = table.counts.get(&(d12 as u32, d23 as u32, d31 as u32)).cloned().unwrap_or_else(BigInt::zero);
                    triples.check(got == BigRational::from_integer(want.clone()), || format!("n = {n}, {d:?}: {got} != {want}"));
                }
            }
        }
        let (got, want) = (table.total(), triply_pointed_total(n));
        totals.check(got == want, || format!("n = {n}: {got} != {want}"));
    }
    vec![pairs, triples, totals]
}

/// Round trips on random uniform instances with `1..=max_n` faces: `cases`
/// pointed trees, and vertex triples until `cases` non-aligned ones were seen.
pub fn bijection_fuzz(cases: usize, max_n: usize, seed: u64) -> Vec<SuiteReport> {
    let mut pointed = SuiteReport::new("pointed round trip");
    let mut triple = SuiteReport::new("triple round trip with distance tracking and image constraints");
    let mut classifier = SuiteReport::new("backbones are pairwise touching");
    let mut generic = 0;
    let mut i = 0u64;
    while pointed.cases < cases || generic < cases {
        let mut rng = sample_rng(seed, i);
        i += 1;
        let n = rng.gen_range(1..=max_n);
        let tree = LabeledTree::random(n, &mut rng);
        let pq = tree.to_pointed_quadrangulation();
        if pointed.cases < cases {
            let (map, parent) = oracle::tree_from_dyck(&tree.word);
            let inc: Vec<i64> = tree.inc.iter().map(|&x| i64::from(x)).collect();
            let wl = oracle::labeled_tree(&map, &parent, &inc);
            let r = check_pointed_round_trip(&wl);
            pointed.check(r.is_ok(), || format!("n = {n}, stream {}: {}", i - 1, r.unwrap_err()));
        }
        let nv = pq.map().num_vertices();
        if generic >= cases || nv < 3 {
            continue;
        }
        let v = loop {
            let v = [rng.gen_range(0..nv), rng.gen_range(0..nv), rng.gen_range(0..nv)];
            if v[0] != v[1] && v[1] != v[2] && v[0] != v[2] {
                break v;
            }
        };
        match check_triple_round_trip(&pq.quad, v) {
            Ok(r) => {
                triple.check(true, String::new);
                if !r.aligned {
                    generic += 1;
                    classifier.check(r.backbone.is_some_and(BackboneType::pairwise_touching), || {
                        format!("n = {n}, stream {}: backbone {:?}", i - 1, r.backbone)
                    });
                }
            }
            Err(err) => triple.check(false, || format!("n = {n}, stream {}, {v:?}: {err}", i - 1)),
        }
    }
    vec![pointed, triple, classifier]
}
