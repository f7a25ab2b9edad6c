use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use quadgeo::geodesic::{p_finite_n, p_geodesic};
use quadgeo::gf::GfEngine;
use quadgeo::oracle::{self, OracleLimits};

#[test]
fn finite_n_matches_direct_count() {
    let e = GfEngine::new(3);
    let tally = oracle::count_geodesic_points(3, 1, 1, OracleLimits::default()).unwrap();
    let pairs = oracle::count_pairs(3, OracleLimits::default()).unwrap();
    let want = tally.get(&1).cloned().unwrap_or_else(BigRational::zero) / pairs[&2].clone();
    assert_eq!(p_finite_n(&e, 1, 1, 1, 3).unwrap(), want);
}

// p(1) at s = t = 1 crosses the limit 0.8 near n = 6, bottoms out near n = 25 and
// only then climbs back, so the gap is monotone from there on but not over 10, 20, 40.
#[test]
fn finite_n_approaches_local_limit() {
    let e = GfEngine::new(60);
    let limit = p_geodesic(1, 1, 1).unwrap().to_f64().unwrap();
    let p = |n| p_finite_n(&e, 1, 1, 1, n).unwrap().to_f64().unwrap();
    let gaps: Vec<f64> = [30, 45, 60].iter().map(|&n| limit - p(n)).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] > 0.0, "{gaps:?}");
    assert!(p(6) > p(10) && p(10) > p(20) && p(20) < p(40));
}
