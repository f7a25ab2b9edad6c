//! Exact distance-dependent generating functions of planar quadrangulations.
//!
//! Everything lives on a [`GfEngine`] fixed at a truncation order `N`. The
//! engine caches `x(g)`, `R(g)`, the brackets `[i]_x` and their inverses, and
//! memoises every family it computes. Most quantities are available through
//! more than one independent route (closed form, recursion, path or sum
//! decomposition) so that the routes can be checked against each other.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::series::{self, Series, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("index {0} out of range (must be >= 1)")]
    IndexOutOfRange(i64),
    #[error("invalid distance triple {0:?}: {1}")]
    InvalidTriple((u64, u64, u64), &'static str),
    #[error("parameter c must be >= 1")]
    ZeroMultiplicity,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Three pairwise distances `(d12, d23, d31)`, checked for parity and the
/// triangle inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DistanceTriple {
    pub d12: u64,
    pub d23: u64,
    pub d31: u64,
}

impl DistanceTriple {
    pub fn new(d12: u64, d23: u64, d31: u64) -> Result<Self, GfError> {
        let t = (d12, d23, d31);
        if (d12 + d23 + d31) % 2 != 0 {
            return Err(GfError::InvalidTriple(t, "sum of distances must be even"));
        }
        if d12 > d23 + d31 || d23 > d31 + d12 || d31 > d12 + d23 {
            return Err(GfError::InvalidTriple(t, "triangle inequality violated"));
        }
        Ok(DistanceTriple { d12, d23, d31 })
    }

    /// `(s, t, u)` with `d12 = s + t`, `d23 = t + u`, `d31 = u + s`.
    pub fn stu(&self) -> (usize, usize, usize) {
        let (a, b, c) = (self.d12 as i64, self.d23 as i64, self.d31 as i64);
        (((a - b + c) / 2) as usize, ((a + b - c) / 2) as usize, ((-a + b + c) / 2) as usize)
    }

    pub fn from_stu(s: usize, t: usize, u: usize) -> Self {
        DistanceTriple { d12: (s + t) as u64, d23: (t + u) as u64, d31: (u + s) as u64 }
    }

    /// One of the three vertices lies on a geodesic between the other two.
    pub fn is_aligned(&self) -> bool {
        let (s, t, u) = self.stu();
        s == 0 || t == 0 || u == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    RClosed(usize),
    XClosed(usize, usize),
    XPath(usize, usize),
    YClosed(usize, usize, usize),
    YRec(usize, usize, usize),
    YSum(usize, usize, usize),
    XTilde(usize, usize, usize),
    FClosed(usize, usize, usize),
    TwoPoint(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum FamilyKey {
    RRec(usize),
    XRec(usize, usize),
}

struct Memo<K, V> {
    map: RwLock<HashMap<K, Arc<V>>>,
}

impl<K: Eq + Hash + Copy, V> Memo<K, V> {
    fn new() -> Self {
        Memo { map: RwLock::new(HashMap::new()) }
    }

    fn get_or(&self, key: K, f: impl FnOnce() -> V) -> Arc<V> {
        if let Some(v) = self.map.read().expect("memo lock").get(&key) {
            return v.clone();
        }
        let v = Arc::new(f());
        self.map.write().expect("memo lock").entry(key).or_insert(v).clone()
    }
}

pub struct GfEngine {
    order: usize,
    x: Series,
    r: Series,
    x_pows: Vec<Series>,
    brackets: Vec<Series>,
    inv_brackets: Vec<Series>,
    memo: Memo<Key, Series>,
    families: Memo<FamilyKey, Vec<Series>>,
}

impl GfEngine {
    pub fn new(order: usize) -> Self {
        let x = series::solve_x(order);
        let r = series::solve_r(order);
        let x_pows = series::powers(&x);
        let mut brackets = vec![Series::zero(order)];
        for i in 1..=order + 1 {
            brackets.push(&brackets[i - 1] + &x_pows.get(i - 1).cloned().unwrap_or_else(|| Series::zero(order)));
        }
        let inv_brackets = brackets
            .iter()
            .map(|b| b.inv().unwrap_or_else(|_| Series::zero(order)))
            .collect();
        GfEngine {
            order,
            x,
            r,
            x_pows,
            brackets,
            inv_brackets,
            memo: Memo::new(),
            families: Memo::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn x(&self) -> &Series {
        &self.x
    }

    pub fn r(&self) -> &Series {
        &self.r
    }

    /// `[i]_x`; indices above `N + 1` agree with `[N + 1]_x` at this order.
    pub fn bracket(&self, i: usize) -> &Series {
        &self.brackets[i.min(self.order + 1)]
    }

    fn x_pow(&self, k: usize) -> Series {
        self.x_pows.get(k).cloned().unwrap_or_else(|| Series::zero(self.order))
    }

    /// `Π [num_i] / Π [den_j]`, all indices at least 1 in the denominator.
    fn bracket_ratio(&self, num: &[usize], den: &[usize]) -> Series {
        let mut acc = Series::one(self.order);
        for &i in num {
            acc = &acc * self.bracket(i);
        }
        for &j in den {
            debug_assert!(j >= 1);
            acc = &acc * &self.inv_brackets[j.min(self.order + 1)];
        }
        acc
    }

    fn cached(&self, key: Key, f: impl FnOnce() -> Series) -> Series {
        (*self.memo.get_or(key, f)).clone()
    }

    // ---- R_i ----

    /// `R_i` from its closed form in terms of brackets.
    pub fn r_closed(&self, i: usize) -> Result<Series, GfError> {
        if i == 0 {
            return Err(GfError::IndexOutOfRange(0));
        }
        Ok(self.r_at(i))
    }

    /// Closed-form `R_i` with the boundary convention `R_0 = 0`.
    fn r_at(&self, i: usize) -> Series {
        if i == 0 {
            return Series::zero(self.order);
        }
        self.cached(Key::RClosed(i), || &self.r * &self.bracket_ratio(&[i, i + 3], &[i + 1, i + 2]))
    }

    /// `R_i` from the recursion `R_i = 1 / (1 - g (R_{i-1} + R_i + R_{i+1}))`.
    pub fn r_recursive(&self, i: usize) -> Result<Series, GfError> {
        if i == 0 {
            return Err(GfError::IndexOutOfRange(0));
        }
        Ok(self.r_family(i)[i].clone())
    }

    /// `R_0..=R_max` from the recursion, computed coefficient by coefficient.
    /// `R_j[k]` only sees `R_{j+1}` below order `k`, so indices up to
    /// `max + N` are enough; the one beyond is frozen at 1.
    fn r_family(&self, max: usize) -> Arc<Vec<Series>> {
        let n = self.order;
        // Round up so that nearby requests share a family.
        let max = max.div_ceil(8) * 8;
        self.families.get_or(FamilyKey::RRec(max), || {
            let top = max + n + 1;
            let mut c: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n + 1]; top + 1];
            for (j, cj) in c.iter_mut().enumerate() {
                if j > 0 {
                    cj[0] = BigInt::one();
                }
            }
            for k in 1..=n {
                let mut next = Vec::with_capacity(top);
                for j in 1..top {
                    let mut acc = BigInt::zero();
                    for a in 0..k {
                        let b = k - 1 - a;
                        let s = &c[j - 1][b] + &c[j][b] + &c[j + 1][b];
                        acc += &c[j][a] * s;
                    }
                    next.push(acc);
                }
                for (j, v) in next.into_iter().enumerate() {
                    c[j + 1][k] = v;
                }
            }
            c.into_iter()
                .take(max + 1)
                .map(|v| Series::from_coeffs(v.into_iter().map(BigRational::from_integer).collect(), n))
                .collect()
        })
    }

    /// Generating function of pointed quadrangulations with a marked vertex at
    /// distance exactly `i` from the origin.
    pub fn two_point(&self, i: usize) -> Result<Series, GfError> {
        if i == 0 {
            return Err(GfError::IndexOutOfRange(0));
        }
        Ok(self.cached(Key::TwoPoint(i), || {
            let ratio = if i == 1 {
                self.r_at(1)
            } else {
                self.r_at(i).div(&self.r_at(i - 1)).expect("R_i has constant term 1")
            };
            ratio.log().expect("R_i / R_{i-1} has constant term 1")
        }))
    }

    // ---- X_{s,t} ----

    pub fn x_closed(&self, s: usize, t: usize) -> Series {
        self.cached(Key::XClosed(s, t), || {
            if s == 0 || t == 0 {
                return Series::one(self.order);
            }
            self.bracket_ratio(&[3, s + 1, t + 1, s + t + 3], &[1, s + 3, t + 3, s + t + 1])
        })
    }

    /// `X_{s,t}` from the recursion
    /// `X = 1 + g R_s R_t X (1 + g R_{s+1} R_{t+1} X_{s+1,t+1})`.
    pub fn x_recursive(&self, s: usize, t: usize) -> Series {
        self.x_family(s, t)[0].clone()
    }

    /// `X_{s+j,t+j}` for `j = 0..=J` from the recursion, `J = ceil(N/2) + 1`.
    /// Member `j` is exact up to order `2 (J + 1 - j) - 1`.
    fn x_family(&self, s: usize, t: usize) -> Arc<Vec<Series>> {
        self.families.get_or(FamilyKey::XRec(s, t), || {
            let n = self.order;
            if s == 0 || t == 0 {
                return vec![Series::one(n)];
            }
            let big_j = n.div_ceil(2) + 1;
            let rr = self.r_family(s.max(t) + big_j + 2);
            let weight: Vec<Series> =
                (0..=big_j + 1).map(|j| (&rr[s + j] * &rr[t + j]).shift_up(1)).collect();
            let mut xs = vec![Series::one(n); big_j + 2];
            for p in 1..=n {
                let mut next = xs.clone();
                for j in 0..=big_j {
                    let w = weight[j].truncate(p);
                    let inner = &Series::one(p) + &(&weight[j + 1].truncate(p) * &xs[j + 1].truncate(p));
                    next[j] = &Series::one(p) + &(&(&w * &xs[j].truncate(p)) * &inner);
                    next[j] = Series::from_coeffs(next[j].coeffs().to_vec(), n);
                }
                xs = next;
            }
            xs.truncate(big_j + 1);
            xs
        })
    }

    /// `X_{s,t}` as a sum over Motzkin paths from height 0 back to 0, where a
    /// step leaving height `l` carries `g R_{l+s} R_{l+t}`. Evaluated by a
    /// transfer over heights rather than explicit enumeration.
    pub fn x_path_sum(&self, s: usize, t: usize) -> Series {
        self.cached(Key::XPath(s, t), || {
            let n = self.order;
            if s == 0 || t == 0 {
                return Series::one(n);
            }
            let hmax = n / 2 + 1;
            let w: Vec<Series> =
                (0..=hmax).map(|l| (&self.r_at(l + s) * &self.r_at(l + t)).shift_up(1)).collect();
            let mut v: Vec<Series> = vec![Series::zero(n); hmax + 2];
            v[0] = Series::one(n);
            let mut total = Series::one(n);
            for m in 1..=n {
                let remaining = n - m;
                let moved: Vec<Series> = (0..=hmax)
                    .map(|h| if v[h].is_zero() { Series::zero(n) } else { &w[h] * &v[h] })
                    .collect();
                let mut nv = vec![Series::zero(n); hmax + 2];
                for h in 0..=hmax.min(remaining) {
                    let mut acc = moved[h].clone();
                    if h > 0 {
                        acc = &acc + &moved[h - 1];
                    }
                    if h < hmax {
                        acc = &acc + &moved[h + 1];
                    }
                    nv[h] = acc;
                }
                total = &total + &nv[0];
                v = nv;
            }
            total
        })
    }

    // ---- Y_{s,t,u} ----

    pub fn y_closed(&self, s: usize, t: usize, u: usize) -> Series {
        self.cached(Key::YClosed(s, t, u), || {
            self.bracket_ratio(&[s + 3, t + 3, u + 3, s + t + u + 3], &[3, s + t + 3, t + u + 3, u + s + 3])
        })
    }

    /// `Y_{s,t,u}` from the explicit recursion relating it to
    /// `Y_{s+1,t+1,u+1}`, using the recursive `R` and `X`.
    pub fn y_recursive(&self, s: usize, t: usize, u: usize) -> Series {
        self.cached(Key::YRec(s, t, u), || {
            let n = self.order;
            if s == 0 || t == 0 || u == 0 {
                return Series::one(n);
            }
            let k = n.div_ceil(3) + 1;
            let rr = self.r_family(s.max(t).max(u) + k + 2);
            let xst = self.x_family(s + 1, t + 1);
            let xtu = self.x_family(t + 1, u + 1);
            let xus = self.x_family(u + 1, s + 1);
            let mut y = Series::one(n);
            for j in (0..k).rev() {
                let mut term = &rr[s + j] * &rr[s + j + 1];
                for r in [&rr[t + j], &rr[t + j + 1], &rr[u + j], &rr[u + j + 1], &xst[j], &xtu[j], &xus[j], &y] {
                    term = &term * r;
                }
                y = &Series::one(n) + &term.shift_up(3);
            }
            y
        })
    }

    /// `X̃_{l,s,t}`: two-face maps with a path of `l` labels between the
    /// faces, in closed form.
    pub fn x_tilde(&self, l: usize, s: usize, t: usize) -> Series {
        self.cached(Key::XTilde(l, s, t), || {
            if l == 0 {
                return Series::one(self.order);
            }
            if t == 0 || 3 * l > self.order + 2 {
                return Series::zero(self.order);
            }
            let ratio = self.bracket_ratio(
                &[s + 1, s + 2, t, t + 3, 2 * l + s + t + 3],
                &[s + t + 3, l + s + 1, l + s + 2, l + t, l + t + 3],
            );
            &self.x_pow(l) * &ratio
        })
    }

    /// `X̃_{l,s,t}` from its recursion in `l`.
    pub fn x_tilde_recursive(&self, l: usize, s: usize, t: usize) -> Series {
        if l == 0 {
            return Series::one(self.order);
        }
        if t == 0 {
            return Series::zero(self.order);
        }
        let prev = self.x_tilde_recursive(l - 1, s + 1, t + 1);
        let w = &(&self.r_at(s + 1) * &self.r_at(t)) * &self.x_closed(s + 1, t + 1);
        (&w * &prev).shift_up(1)
    }

    /// `Y_{s,t,u} = Σ_l X̃_{l,s,t} X̃_{l,t,u} X̃_{l,u,s}`. Each term is
    /// `O(g^{3l})`, so the sum stops at `3 l <= N`.
    pub fn y_sum_form(&self, s: usize, t: usize, u: usize) -> Series {
        self.cached(Key::YSum(s, t, u), || {
            let n = self.order;
            let mut acc = Series::zero(n);
            for l in 0..=n / 3 {
                let term = &(&self.x_tilde(l, s, t) * &self.x_tilde(l, t, u)) * &self.x_tilde(l, u, s);
                acc = &acc + &term;
            }
            acc
        })
    }

    // ---- F and G ----

    /// `F(s,t,u)` with the convention that it vanishes when any index is -1.
    pub fn f_three(&self, s: i64, t: i64, u: i64) -> Result<Series, GfError> {
        if s == -1 || t == -1 || u == -1 {
            return Ok(Series::zero(self.order));
        }
        if s < 0 || t < 0 || u < 0 {
            return Err(GfError::IndexOutOfRange(s.min(t).min(u)));
        }
        Ok(self.f_closed(s as usize, t as usize, u as usize))
    }

    fn f_closed(&self, s: usize, t: usize, u: usize) -> Series {
        self.cached(Key::FClosed(s, t, u), || {
            let core = [s + 1, t + 1, u + 1, s + t + u + 3];
            let num: Vec<usize> = std::iter::once(3).chain(core).chain(core).collect();
            self.bracket_ratio(&num, &[s + t + 1, s + t + 3, t + u + 1, t + u + 3, u + s + 1, u + s + 3])
        })
    }

    /// `F = X_{s,t} X_{t,u} X_{u,s} Y_{s,t,u}^2` from the recursive `X`, `Y`.
    pub fn f_product(&self, s: usize, t: usize, u: usize) -> Series {
        let y = self.y_recursive(s, t, u);
        let mut acc = &self.x_recursive(s, t) * &self.x_recursive(t, u);
        acc = &acc * &self.x_recursive(u, s);
        &(&acc * &y) * &y
    }

    /// Three-point function at prescribed pairwise distances.
    pub fn g_three(&self, d: DistanceTriple) -> Series {
        let (s, t, u) = d.stu();
        self.g_three_stu(s, t, u)
    }

    /// Three-point function in `(s,t,u)` coordinates, on the extended domain
    /// where coinciding vertices give `G(d,d,0) = δ_{d,0}`.
    pub(crate) fn g_three_stu(&self, s: usize, t: usize, u: usize) -> Series {
        let zeros = [s, t, u].iter().filter(|&&v| v == 0).count();
        if zeros >= 2 {
            return if s + t + u == 0 { Series::one(self.order) } else { Series::zero(self.order) };
        }
        let (s, t, u) = (s as i64, t as i64, u as i64);
        let mut acc = Series::zero(self.order);
        for mask in 0..8u32 {
            let (a, b, c) = (s - (mask & 1) as i64, t - ((mask >> 1) & 1) as i64, u - ((mask >> 2) & 1) as i64);
            let f = self.f_three(a, b, c).expect("indices are >= -1");
            acc = if mask.count_ones() % 2 == 0 { &acc + &f } else { &acc - &f };
        }
        acc
    }

    /// `X^{(c)}_{s,t} = (1/c) ((X - 1) / X)^c`: two-face maps whose boundary
    /// has exactly `c` minimal-label vertices.
    pub fn x_c(&self, s: usize, t: usize, c: usize) -> Result<Series, GfError> {
        if c == 0 {
            return Err(GfError::ZeroMultiplicity);
        }
        let x = self.x_closed(s, t);
        let ratio = &Series::one(self.order) - &x.inv()?;
        Ok(ratio.pow(c as u32).scale(&series::rational(1, c as i64)))
    }

    /// `Δ_s Δ_t` applied to `(s,t) -> h(s,t)`, `s, t >= 1`.
    pub fn delta2(&self, s: usize, t: usize, h: impl Fn(usize, usize) -> Series) -> Series {
        let a = &h(s, t) - &h(s - 1, t);
        let b = &h(s, t - 1) - &h(s - 1, t - 1);
        &a - &b
    }

    /// Four-point function building block: product of the six `X` and four
    /// `Y` factors.
    pub fn f_four(&self, s: usize, t: usize, u: usize, v: usize) -> Series {
        let mut acc = Series::one(self.order);
        for (a, b) in [(s, t), (s, u), (s, v), (t, u), (t, v), (u, v)] {
            acc = &acc * &self.x_closed(a, b);
        }
        for (a, b, c) in [(s, t, u), (s, t, v), (s, u, v), (t, u, v)] {
            acc = &acc * &self.y_closed(a, b, c);
        }
        acc
    }

    /// Four-point function `Δ_s Δ_t Δ_u Δ_v F4`, `F4` vanishing at index -1.
    pub fn g_four(&self, s: usize, t: usize, u: usize, v: usize) -> Series {
        let p = [s as i64, t as i64, u as i64, v as i64];
        let mut acc = Series::zero(self.order);
        for mask in 0..16u32 {
            let q: Vec<i64> = (0..4).map(|k| p[k] - ((mask >> k) & 1) as i64).collect();
            if q.iter().any(|&v| v < 0) {
                continue;
            }
            let f = self.f_four(q[0] as usize, q[1] as usize, q[2] as usize, q[3] as usize);
            acc = if mask.count_ones() % 2 == 0 { &acc + &f } else { &acc - &f };
        }
        acc
    }

    /// Limit of `X_{s,v}` as `v -> ∞`: `[3][s+1]/[s+3]`.
    pub fn x_limit(&self, s: usize) -> Series {
        if s == 0 {
            return Series::one(self.order);
        }
        self.bracket_ratio(&[3, s + 1], &[s + 3])
    }

    /// Limit of `Y_{s,t,v}` as `v -> ∞`: `[s+3][t+3]/([3][s+t+3])`.
    pub fn y_limit(&self, s: usize, t: usize) -> Series {
        self.bracket_ratio(&[s + 3, t + 3], &[3, s + t + 3])
    }

    /// `Π_{k=1}^{i} R_k`, product of recursive `R_k`.
    pub fn r_product(&self, i: usize) -> Series {
        let rr = self.r_family(i);
        (1..=i).fold(Series::one(self.order), |acc, k| &acc * &rr[k])
    }

    /// The identity suite: every multi-route quantity compared route by route.
    pub fn verify_identities(&self, max_stu: usize) -> Vec<IdentityCheck> {
        identities::run(self, max_stu)
    }
}

/// Outcome of one family of identity checks.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

mod identities {
    use super::*;

    struct Acc {
        check: IdentityCheck,
    }

    impl Acc {
        fn new(name: &'static str) -> Self {
            Acc { check: IdentityCheck { name, cases: 0, failures: vec![] } }
        }
        fn eq(&mut self, what: impl FnOnce() -> String, a: &Series, b: &Series) {
            self.check.cases += 1;
            if a != b {
                self.check.failures.push(format!("{}: {} != {}", what(), a, b));
            }
        }
        fn holds(&mut self, what: impl FnOnce() -> String, ok: bool) {
            self.check.cases += 1;
            if !ok {
                self.check.failures.push(what());
            }
        }
    }

    pub(super) fn run(e: &GfEngine, m: usize) -> Vec<IdentityCheck> {
        let n = e.order();
        let one = Series::one(n);
        let mut out = Vec::new();

        let mut a = Acc::new("R closed form vs recursion");
        for i in 1..=2 * m {
            a.eq(|| format!("R_{i}"), &e.r_closed(i).unwrap(), &e.r_recursive(i).unwrap());
        }
        a.eq(|| "R vs its closed form".into(), e.r(), &series::solve_r_closed(n));
        out.push(a.check);

        let mut a = Acc::new("X closed form vs recursion vs path sum");
        for s in 0..=m {
            for t in 0..=m {
                let c = e.x_closed(s, t);
                a.eq(|| format!("X_{{{s},{t}}} recursion"), &c, &e.x_recursive(s, t));
                a.eq(|| format!("X_{{{s},{t}}} path sum"), &c, &e.x_path_sum(s, t));
            }
        }
        out.push(a.check);

        let mut a = Acc::new("Y closed form vs recursion vs sum form");
        for s in 0..=m {
            for t in 0..=m {
                for u in 0..=m {
                    let c = e.y_closed(s, t, u);
                    a.eq(|| format!("Y_{{{s},{t},{u}}} recursion"), &c, &e.y_recursive(s, t, u));
                    a.eq(|| format!("Y_{{{s},{t},{u}}} sum form"), &c, &e.y_sum_form(s, t, u));
                }
            }
        }
        out.push(a.check);

        let mut a = Acc::new("X~ closed form vs recursion");
        for l in 0..=3 {
            for s in 0..=m {
                for t in 0..=m {
                    a.eq(|| format!("X~_{{{l},{s},{t}}}"), &e.x_tilde(l, s, t), &e.x_tilde_recursive(l, s, t));
                }
            }
        }
        out.push(a.check);

        let mut a = Acc::new("F closed form vs product form");
        for s in 0..=m {
            for t in 0..=m {
                for u in 0..=m {
                    a.eq(|| format!("F({s},{t},{u})"), &e.f_closed(s, t, u), &e.f_product(s, t, u));
                }
            }
        }
        out.push(a.check);

        let mut a = Acc::new("F special values");
        a.eq(|| "F(0,0,0)".into(), &e.f_closed(0, 0, 0), &one);
        for s in 0..=m {
            a.eq(|| format!("F({s},0,0)"), &e.f_closed(s, 0, 0), &one);
            for t in 0..=m {
                a.eq(|| format!("F({s},{t},0) = X"), &e.f_closed(s, t, 0), &e.x_closed(s, t));
            }
        }
        // Large-index limit: (1 + x + x^2) / (1 - x)^2 = (1 + (1 - 12 g)^{-1/2}) / 2.
        let big = n + 2;
        let lim = {
            let sq = Series::from_ints(&[1, -12], n).sqrt().unwrap().inv().unwrap();
            (&one + &sq).scale(&series::rational(1, 2))
        };
        a.eq(|| "F(∞,∞,∞)".into(), &e.f_closed(big, big, big), &lim);
        let om = &one - e.x();
        let lim2 = (e.bracket(3)).div(&(&om * &om)).unwrap();
        a.eq(|| "F(∞,∞,∞) in x".into(), &lim2, &lim);
        out.push(a.check);

        let mut a = Acc::new("box sum of G reproduces F");
        for s in 0..=m {
            for t in 0..=m {
                for u in 0..=m {
                    let mut acc = Series::zero(n);
                    for s2 in 0..=s {
                        for t2 in 0..=t {
                            for u2 in 0..=u {
                                acc = &acc + &e.g_three_stu(s2, t2, u2);
                            }
                        }
                    }
                    a.eq(|| format!("Σ G up to ({s},{t},{u})"), &acc, &e.f_closed(s, t, u));
                }
            }
        }
        out.push(a.check);

        let mut a = Acc::new("G has nonnegative integer coefficients");
        for s in 0..=m {
            for t in 0..=m {
                for u in 0..=m {
                    let g = e.g_three_stu(s, t, u);
                    a.holds(|| format!("G at ({s},{t},{u}) = {g}"), g.is_nonnegative_integral());
                }
            }
        }
        out.push(a.check);

        let mut a = Acc::new("X^(c) sums");
        for s in 1..=m {
            for t in 1..=m {
                let x = e.x_closed(s, t);
                let mut sum = Series::zero(n);
                let mut weighted = Series::zero(n);
                for c in 1..=n {
                    let xc = e.x_c(s, t, c).unwrap();
                    sum = &sum + &xc;
                    weighted = &weighted + &xc.scale(&BigRational::from_integer(BigInt::from(c)));
                }
                a.eq(|| format!("Σ_c X^(c)_{{{s},{t}}} = log X"), &sum, &x.log().unwrap());
                a.eq(|| format!("Σ_c c X^(c)_{{{s},{t}}} = X - 1"), &weighted, &(&x - &one));
            }
        }
        out.push(a.check);

        let mut a = Acc::new("Δ_s Δ_t log X = log(R_{s+t} / R_{s+t-1})");
        for s in 1..=m {
            for t in 1..=m {
                let lhs = e.delta2(s, t, |a, b| e.x_closed(a, b).log().unwrap());
                let i = s + t;
                let rhs = e.two_point(i).unwrap();
                a.eq(|| format!("({s},{t}) against R"), &lhs, &rhs);
                let br = e
                    .bracket_ratio(&[i + 3, i, i], &[i - 1, i + 2, i + 2])
                    .log()
                    .unwrap();
                a.eq(|| format!("({s},{t}) against brackets"), &lhs, &br);
            }
        }
        out.push(a.check);

        let mut a = Acc::new("products of R_k");
        for i in 1..=2 * m {
            let rhs = &e.r().pow(i as u32) * &e.bracket_ratio(&[1, i + 3], &[3, i + 1]);
            a.eq(|| format!("Π_{{k<={i}}} R_k"), &e.r_product(i), &rhs);
        }
        for s in 1..=m {
            for t in 1..=m {
                let rhs = &(&e.r_product(s) * &e.r_product(t)) * &e.x_closed(s, t);
                a.eq(|| format!("Π_{{k<={}}} R_k split at ({s},{t})", s + t), &e.r_product(s + t), &rhs);
            }
        }
        out.push(a.check);

        let mut a = Acc::new("Δ_s Δ_t X has nonnegative integer coefficients");
        for s in 1..=m {
            for t in 1..=m {
                let d = e.delta2(s, t, |a, b| e.x_closed(a, b));
                a.holds(|| format!("ΔΔX at ({s},{t}) = {d}"), d.is_nonnegative_integral());
            }
        }
        out.push(a.check);

        let mut a = Acc::new("four-point function");
        let mm = m.min(3);
        for s in 0..=mm {
            for t in 0..=mm {
                for u in 0..=mm {
                    // v beyond the order: the v-dependent factors reach their limits.
                    let mut lim = &(&e.x_closed(s, t) * &e.x_closed(s, u)) * &e.x_closed(t, u);
                    lim = &lim * &e.y_closed(s, t, u);
                    for v in [s, t, u] {
                        lim = &lim * &e.x_limit(v);
                    }
                    for (p, q) in [(s, t), (t, u), (s, u)] {
                        lim = &lim * &e.y_limit(p, q);
                    }
                    a.eq(|| format!("F4({s},{t},{u},∞)"), &e.f_four(s, t, u, n + 2), &lim);
                    let g4 = e.g_four(s.max(1), t.max(1), u.max(1), mm);
                    a.holds(|| format!("G4({s},{t},{u},{mm}) = {g4}"), g4.is_nonnegative_integral());
                }
            }
        }
        a.eq(|| "F4 symmetry".into(), &e.f_four(1, 2, 3, 4), &e.f_four(4, 1, 3, 2));
        out.push(a.check);

        out
    }
}
