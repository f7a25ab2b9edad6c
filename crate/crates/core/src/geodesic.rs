//! Local-limit statistics of geodesic points in large quadrangulations.
//!
//! Everything here is an exact rational function of the distances; the laws for the
//! number of geodesic points are finite mixtures of geometric sequences, so their
//! totals and means have closed forms.

use crate::gf::{GfEngine, GfError};
use crate::series::rational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Q = BigRational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeodesicError {
    #[error("argument out of range: {0}")]
    Domain(String),
    #[error("two-point coefficient vanishes at distance {d}, size {n}")]
    Unreachable { d: usize, n: usize },
    #[error(transparent)]
    Gf(#[from] GfError),
}

pub type Result<T> = std::result::Result<T, GeodesicError>;

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn qu(v: u64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn check_nonneg(name: &str, v: i64) -> Result<u64> {
    u64::try_from(v).map_err(|_| GeodesicError::Domain(format!("{name} = {v} must be nonnegative")))
}

/// Average number of couples at prescribed distances from a source, before differencing.
pub fn f_local(s: i64, t: i64, u: i64) -> Result<Q> {
    let (s, t, u) = (check_nonneg("s", s)?, check_nonneg("t", t)?, check_nonneg("u", u)?);
    Ok(f_local_u(s, t, u))
}

fn f_local_u(s: u64, t: u64, u: u64) -> Q {
    let (s, t, u) = (qu(s), qu(t), qu(u));
    let one = Q::one();
    let sum = &s + &t + &u;
    let top = ((&one + &s) * (&one + &t) * (&one + &u) * (q(3) + &sum)).pow(2);
    let den = (&one + &s + &t) * (q(3) + &s + &t) * (&one + &t + &u) * (q(3) + &t + &u) * (&one + &u + &s) * (q(3) + &u + &s);
    let quad = &s * &s + &t * &t + &u * &u + &s * &t + &t * &u + &u * &s;
    let poly = q(29) + q(20) * &sum + q(5) * quad;
    let stu = &s * &t * &u;
    let last = (&s * &t + &t * &u + &u * &s + &stu) * (q(4) + &sum) - &stu;
    rational(9, 140) * top / den * poly * last
}

/// The `u = 0` specialization written out separately.
pub fn f_local_u0(s: u64, t: u64) -> Q {
    let (s, t) = (qu(s), qu(t));
    let one = Q::one();
    let head = (&one + &s) * (&one + &t) * (q(3) + &s + &t) / ((q(3) + &s) * (q(3) + &t) * (&one + &s + &t));
    let quad = &s * &s + &t * &t + &s * &t;
    rational(9, 140) * head * &s * &t * (q(29) + q(20) * (&s + &t) + q(5) * quad) * (q(4) + &s + &t)
}

fn delta2(s: u64, t: u64, h: impl Fn(u64, u64) -> Q) -> Q {
    h(s, t) - h(s - 1, t) - h(s, t - 1) + h(s - 1, t - 1)
}

/// Average number of couples at distances `d12 = s+t, d23 = t+u, d31 = u+s`, i.e. the
/// triple difference of `f_local`, for `s, t, u >= 1`.
pub fn mean_couples(s: u64, t: u64, u: u64) -> Result<Q> {
    if s == 0 || t == 0 || u == 0 {
        return Err(GeodesicError::Domain(format!("({s}, {t}, {u}) must be positive")));
    }
    let mut acc = Q::zero();
    for (ds, dt, du) in (0..8).map(|m| (m & 1, (m >> 1) & 1, (m >> 2) & 1)) {
        let term = f_local_u(s - ds, t - dt, u - du);
        if (ds + dt + du) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Average number of vertices at distance `d` from the source of a large pointed map.
pub fn vertex_count(d: u64) -> Q {
    rational(3, 35) * qu(d + 1) * qu(5 * d * d + 10 * d + 2)
}

/// `Δ_s Δ_t f(s,t,0)`.
pub fn geodesic_pairs(s: u64, t: u64) -> Result<Q> {
    if s == 0 || t == 0 {
        return Err(GeodesicError::Domain(format!("({s}, {t}) must be positive")));
    }
    Ok(delta2(s, t, f_local_u0))
}

/// Average number of geodesic points at distance `s` from the first source when the
/// sources are at distance `d`.
pub fn geodesic_profile(s: u64, d: u64) -> Result<Q> {
    if s == 0 || s >= d {
        return Err(GeodesicError::Domain(format!("s = {s} outside 1..{d}")));
    }
    Ok(geodesic_pairs(s, d - s)? / vertex_count(d))
}

/// Limit of the profile when the second source is far away.
pub fn mean_geodesic_far(s: u64) -> Q {
    let s = qu(s);
    q(3) * &s * (q(5) + &s) / ((q(3) + &s) * (q(2) + &s))
}

/// `A_{s,t}`, the ratio that sets the geometric decay of the geodesic-count law.
pub fn a_st(s: u64, t: u64) -> Q {
    let (sq, tq) = (qu(s), qu(t));
    q(3) * (&sq + q(1)) * (&tq + q(1)) * (&sq + &tq + q(3)) / ((&sq + q(3)) * (&tq + q(3)) * (&sq + &tq + q(1)))
}

/// A law `p(c) = sum_j a_j q_j^c` on `c >= 1` with `0 <= q_j < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricMixture {
    pub terms: Vec<(Q, Q)>,
}

impl GeometricMixture {
    pub fn eval(&self, c: u32) -> Q {
        self.terms.iter().map(|(a, r)| a * r.pow(c as i32)).sum()
    }

    /// `sum_{c >= 1} p(c)`.
    pub fn total(&self) -> Q {
        self.terms.iter().map(|(a, r)| a * r / (Q::one() - r)).sum()
    }

    /// `sum_{c >= 1} c p(c)`.
    pub fn mean(&self) -> Q {
        self.terms.iter().map(|(a, r)| a * r / (Q::one() - r).pow(2)).sum()
    }

    /// `sum_{c > k} p(c)`.
    pub fn tail(&self, k: u32) -> Q {
        self.terms.iter().map(|(a, r)| a * r.pow(k as i32 + 1) / (Q::one() - r)).sum()
    }
}

/// Law of the number of geodesic points at distance `s` from the first source, sources
/// at distance `s + t`, in the local limit.
pub fn p_geodesic_law(s: u64, t: u64) -> Result<GeometricMixture> {
    if s == 0 || t == 0 {
        return Err(GeodesicError::Domain(format!("({s}, {t}) must be positive")));
    }
    let n = vertex_count(s + t);
    let mut terms = Vec::new();
    for (ds, dt, sign) in [(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, 1)] {
        let (a, b) = (s - ds, t - dt);
        let f = f_local_u0(a, b);
        if f.is_zero() {
            continue;
        }
        // f/A^2 x^(c-1) with x = (A-1)/A, written as (f / (A^2 x)) x^c
        let big_a = a_st(a, b);
        let x = (&big_a - Q::one()) / &big_a;
        let coef = f / (&big_a * &big_a * &x) / &n * q(sign);
        terms.push((coef, x));
    }
    Ok(GeometricMixture { terms })
}

pub fn p_geodesic(c: u32, s: u64, t: u64) -> Result<Q> {
    if c == 0 {
        return Err(GeodesicError::Domain("c must be positive".into()));
    }
    Ok(p_geodesic_law(s, t)?.eval(c))
}

/// `(1/N) Δ_s Δ_t [f / A]`, the total of the law computed without the mixture.
pub fn p_geodesic_total_direct(s: u64, t: u64) -> Result<Q> {
    if s == 0 || t == 0 {
        return Err(GeodesicError::Domain(format!("({s}, {t}) must be positive")));
    }
    Ok(delta2(s, t, |a, b| f_local_u0(a, b) / a_st(a, b)) / vertex_count(s + t))
}

/// Law of the number of geodesic points when the two sources are far apart.
pub fn p_inf_law(s: u64) -> Result<GeometricMixture> {
    if s == 0 {
        return Err(GeodesicError::Domain("s must be positive".into()));
    }
    let sq = qu(s);
    let r1 = q(2) * &sq / (q(3) * (&sq + q(1)));
    let r2 = q(2) * (&sq - q(1)) / (q(3) * &sq);
    Ok(GeometricMixture { terms: vec![((&sq + q(3)) / q(2), r1), (-(&sq + q(2)) / q(2), r2)] })
}

pub fn p_inf(c: u32, s: u64) -> Result<Q> {
    if c == 0 {
        return Err(GeodesicError::Domain("c must be positive".into()));
    }
    Ok(p_inf_law(s)?.eval(c))
}

/// Law far from both sources: `(1/2)(2/3)^c`.
pub fn p_inf_far_law() -> GeometricMixture {
    GeometricMixture { terms: vec![(rational(1, 2), rational(2, 3))] }
}

pub fn p_inf_far(c: u32) -> Result<Q> {
    if c == 0 {
        return Err(GeodesicError::Domain("c must be positive".into()));
    }
    Ok(p_inf_far_law().eval(c))
}

/// Finite-size probability: ratio of the `g^n` coefficients of the aligned-triple
/// function with `c` minimal boundary vertices and of the two-point function.
pub fn p_finite_n(engine: &GfEngine, c: usize, s: usize, t: usize, n: usize) -> Result<Q> {
    if s == 0 || t == 0 || c == 0 {
        return Err(GeodesicError::Domain(format!("(c, s, t) = ({c}, {s}, {t}) must be positive")));
    }
    if n > engine.order() {
        return Err(GeodesicError::Domain(format!("n = {n} beyond series order {}", engine.order())));
    }
    let den = engine.two_point(s + t)?.coeff(n);
    if den.is_zero() {
        return Err(GeodesicError::Unreachable { d: s + t, n });
    }
    let err = std::cell::RefCell::new(None);
    let num = engine.delta2(s, t, |a, b| {
        engine.x_c(a, b, c).unwrap_or_else(|e| {
            *err.borrow_mut() = Some(e);
            crate::series::Series::zero(engine.order())
        })
    });
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    Ok(num.coeff(n) / den)
}

/// `Δ_s Δ_t f(s,t,0) / t^3` over its large-`t` limit `(9/7) s (5+s) / ((3+s)(2+s))`.
pub fn large_t_ratio(s: u64, t: u64) -> Result<f64> {
    let pairs = geodesic_pairs(s, t)?;
    let limit = rational(9, 7) * qu(s) * qu(5 + s) / (qu(3 + s) * qu(2 + s));
    let r = pairs / (qu(t).pow(3) * limit);
    Ok(r.to_f64().unwrap_or(f64::NAN))
}

/// Largest |difference| between two rationals as f64, for trend reporting.
pub fn abs_diff(a: &Q, b: &Q) -> f64 {
    (a - b).abs().to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f_local_reduces_to_u0_form() {
        for s in 0..=6 {
            for t in 0..=6 {
                assert_eq!(f_local(s, t, 0).unwrap(), f_local_u0(s as u64, t as u64), "({s},{t})");
            }
        }
        assert!(f_local(0, 0, 0).unwrap().is_zero());
        assert!(f_local(-1, 0, 0).is_err());
    }

    #[test]
    fn couples_are_nonnegative_and_symmetric() {
        for s in 1..=6 {
            for t in 1..=6 {
                for u in 1..=6 {
                    let c = mean_couples(s, t, u).unwrap();
                    assert!(!c.is_negative(), "({s},{t},{u})");
                    assert_eq!(c, mean_couples(t, u, s).unwrap());
                    assert_eq!(c, mean_couples(t, s, u).unwrap());
                }
            }
        }
    }

    #[test]
    fn profile_values() {
        assert_eq!(vertex_count(1), rational(102, 35));
        assert_eq!(a_st(1, 1), rational(5, 4));
        for s in 1..10 {
            let p = geodesic_profile(s, 10).unwrap();
            assert!(p.is_positive());
            assert_eq!(p, geodesic_profile(10 - s, 10).unwrap());
        }
        assert!(geodesic_profile(0, 5).is_err());
        assert!(geodesic_profile(5, 5).is_err());
        // far second source
        let far = geodesic_profile(3, 20_003).unwrap().to_f64().unwrap();
        assert!((far / mean_geodesic_far(3).to_f64().unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn geodesic_law_sums() {
        for s in 1..=5 {
            for t in 1..=5 {
                let law = p_geodesic_law(s, t).unwrap();
                assert_eq!(law.total(), Q::one(), "({s},{t})");
                assert_eq!(law.total(), p_geodesic_total_direct(s, t).unwrap());
                assert_eq!(law.mean(), geodesic_profile(s, s + t).unwrap());
                for c in 1..30 {
                    assert!(!law.eval(c).is_negative());
                }
                let partial: Q = (1..=12).map(|c| law.eval(c)).sum();
                assert_eq!(partial + law.tail(12), Q::one());
            }
        }
    }

    #[test]
    fn far_laws() {
        for s in 1..=10 {
            let law = p_inf_law(s).unwrap();
            assert_eq!(law.total(), Q::one());
            assert_eq!(law.mean(), mean_geodesic_far(s));
        }
        for c in 1..6 {
            assert_eq!(p_inf(c, 1).unwrap(), q(2) * rational(1, 3).pow(c as i32));
        }
        assert_eq!(p_inf_far(1).unwrap(), rational(1, 3));
        assert_eq!(p_inf_far_law().total(), Q::one());
        assert_eq!(p_inf_far_law().mean(), q(3));
        let d = |s| abs_diff(&p_inf(2, s).unwrap(), &p_inf_far(2).unwrap());
        assert!(d(1000) < d(100) && d(100) < d(10) && d(1000) < 1e-5);
        // the local law at fixed s tends to the far law as t grows
        let gap = abs_diff(&p_geodesic(1, 2, 10_000).unwrap(), &p_inf(1, 2).unwrap());
        assert!(gap < 1e-3, "{gap}");
    }

    #[test]
    fn large_t_asymptotics() {
        // the relative correction is roughly (6 + 2s)/t
        for s in [1, 2] {
            assert!((large_t_ratio(s, 10_000).unwrap() - 1.0).abs() < 1e-3);
        }
        let err = |t| large_t_ratio(5, t).unwrap() - 1.0;
        assert!(err(10_000) > 1e-3 && err(100_000) < 1e-3);
    }

    #[test]
    fn finite_n_probabilities() {
        let e = GfEngine::new(12);
        let total: Q = (1..=13).map(|c| p_finite_n(&e, c, 1, 1, 12).unwrap()).sum();
        assert!(total <= Q::one());
        assert!(matches!(p_finite_n(&e, 1, 5, 5, 3), Err(GeodesicError::Unreachable { .. })));
    }

    proptest! {
        #[test]
        fn f_local_is_symmetric(s in 0i64..30, t in 0i64..30, u in 0i64..30) {
            let v = f_local(s, t, u).unwrap();
            prop_assert_eq!(&v, &f_local(t, s, u).unwrap());
            prop_assert_eq!(&v, &f_local(u, t, s).unwrap());
        }
    }
}
