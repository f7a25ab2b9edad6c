//! Continuum scaling functions of pure 2D gravity.
//!
//! Grand-canonical two- and three-point functions are evaluated in closed form for a
//! complex scaling parameter `alpha`. Canonical densities are obtained from them by the
//! Gaussian-damped integral over a real parameter `xi`, with `alpha = sqrt(-3 i xi / 2)`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

type C = Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContinuumError {
    #[error("pole: sinh vanishes at {0}")]
    Pole(C),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("xi quadrature did not converge: {coarse:e} vs {fine:e}")]
    NotConverged { coarse: f64, fine: f64 },
    #[error("conjugate symmetry of the integrand violated by {0:e}")]
    BranchSymmetry(f64),
    #[error("two-point density {0:e} below the underflow floor")]
    Underflow(f64),
    #[error("xi integral {value:e} lost to cancellation among terms of size {scale:e}")]
    Cancellation { value: f64, scale: f64 },
}

pub type Result<T> = std::result::Result<T, ContinuumError>;

/// Grand-canonical scaling parameter for a cosmological constant `lambda > 0`.
pub fn alpha_grand_canonical(lambda: f64) -> f64 {
    (1.5f64).sqrt() * lambda.powf(0.25)
}

/// Canonical scaling parameter: `sqrt(-i tau)` taken as `exp(-sign(tau) i pi/4) sqrt|tau|`
/// with `tau = 3 xi / 2`.
pub fn alpha_canonical(xi: f64) -> C {
    let r = (1.5 * xi.abs()).sqrt();
    let phase = if xi >= 0.0 { -PI / 4.0 } else { PI / 4.0 };
    C::from_polar(r, phase)
}

// ---------------------------------------------------------------------------
// hyperbolic helpers

/// `z coth z = sum_k b_k z^{2k}`, `b_k = 2^{2k} B_{2k} / (2k)!`.
fn coth_coeffs() -> &'static [f64; 11] {
    static CELL: OnceLock<[f64; 11]> = OnceLock::new();
    CELL.get_or_init(|| {
        let bern: [(f64, f64); 10] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
        ];
        let mut b = [0.0; 11];
        b[0] = 1.0;
        let mut fact = 1.0;
        for k in 1..=10 {
            fact *= ((2 * k - 1) * (2 * k)) as f64;
            let (p, q) = bern[k - 1];
            b[k] = 4f64.powi(k as i32) * p / q / fact;
        }
        b
    })
}

const SERIES_RADIUS: f64 = 0.5;

/// Regular parts `coth z - 1/z`, `1/sinh^2 z - 1/z^2`, `cosh z / sinh^3 z - 1/z^3`, and
/// `ln(sinh z / z)`. Near the origin callers add the poles back as real terms, so
/// imaginary parts never come out of a cancellation; away from it they use the full
/// values, which may be exponentially small.
#[derive(Debug, Clone, Copy, Default)]
struct Hyp {
    coth: C,
    csch2: C,
    ccs3: C,
    lsc: C,
    full: Option<[C; 3]>,
}

impl Hyp {
    /// `a coth(a x)`, `-a^2 / sinh^2(a x)` and `2 a^3 cosh / sinh^3 (a x)`.
    fn scaled(&self, a: C, x: f64) -> [C; 3] {
        let a2 = a * a;
        match self.full {
            Some([ct, c2, c3]) => [a * ct, -a2 * c2, 2.0 * a2 * a * c3],
            None => [1.0 / x + a * self.coth, -1.0 / (x * x) - a2 * self.csch2, 2.0 / (x * x * x) + 2.0 * a2 * a * self.ccs3],
        }
    }
}

/// `exp(w) - 1` without cancellation for small `w`.
fn expm1(w: C) -> C {
    let (x, y) = (w.re, w.im);
    let s = (0.5 * y).sin();
    C::new(x.exp_m1() * y.cos() - 2.0 * s * s, x.exp() * y.sin())
}

fn hyp(z: C) -> Result<Hyp> {
    if z.norm() == 0.0 || !z.is_finite() {
        return Err(ContinuumError::Pole(z));
    }
    if z.norm() < SERIES_RADIUS {
        let b = coth_coeffs();
        let z2 = z * z;
        let (mut rc, mut r2, mut r3, mut ls) = (C::default(), C::default(), C::default(), C::default());
        // p = z2^(k-1)
        let mut p = C::new(1.0, 0.0);
        for (k, &bk) in b.iter().enumerate().skip(1) {
            let km = (2 * k - 1) as f64;
            rc += bk * p;
            r2 -= bk * km * p;
            if k >= 2 {
                r3 += 0.5 * bk * km * (km - 1.0) * p / z2;
            }
            ls += bk / (2 * k) as f64 * p * z2;
            p *= z2;
        }
        return Ok(Hyp { coth: z * rc, csch2: r2, ccs3: z * r3, lsc: ls, full: None });
    }
    let flip = z.re < 0.0;
    let w = if flip { -z } else { z };
    let e = (-2.0 * w).exp();
    let om = -expm1(-2.0 * w);
    if om.norm() < 1e-13 {
        return Err(ContinuumError::Pole(z));
    }
    let sign = if flip { -1.0 } else { 1.0 };
    let coth = sign * (1.0 + e) / om;
    let csch2 = 4.0 * e / (om * om);
    let ccs3 = sign * 4.0 * e * (1.0 + e) / (om * om * om);
    let lsc = w + om.ln() - std::f64::consts::LN_2 - w.ln();
    Ok(Hyp {
        coth: coth - 1.0 / z,
        csch2: csch2 - 1.0 / (z * z),
        ccs3: ccs3 - 1.0 / (z * z * z),
        lsc,
        full: Some([coth, csch2, ccs3]),
    })
}

// ---------------------------------------------------------------------------
// grand-canonical functions

/// Two-point scaling functions `(F, G)` with `G = dF/dD`.
pub fn scaling_two(d: f64, alpha: C) -> Result<(C, C)> {
    if !(d > 0.0) {
        return Err(ContinuumError::Domain(format!("distance {d} must be positive")));
    }
    let [_, dc, ddc] = hyp(alpha * d)?.scaled(alpha, d);
    let f = -(2.0 / 3.0) * (alpha * alpha - 3.0 * dc);
    Ok((f, 2.0 * ddc))
}

/// `d/d alpha` of the two-point `G`.
pub fn scaling_two_dalpha(d: f64, alpha: C) -> Result<C> {
    if !(d > 0.0) {
        return Err(ContinuumError::Domain(format!("distance {d} must be positive")));
    }
    let h = hyp(alpha * d)?;
    let z = alpha * d;
    let (coth, csch2, ccs3) = (h.coth + 1.0 / z, h.csch2 + 1.0 / (z * z), h.ccs3 + 1.0 / (z * z * z));
    let a2 = alpha * alpha;
    Ok(12.0 * a2 * ccs3 + 4.0 * a2 * alpha * d * (csch2 - 3.0 * coth * coth * csch2))
}

/// Large-distance form of the two-point `G`: `16 alpha^3 exp(-2 alpha D)`.
pub fn scaling_two_large(d: f64, alpha: C) -> C {
    16.0 * alpha * alpha * alpha * (-2.0 * alpha * d).exp()
}

fn check_stu(s: f64, t: f64, u: f64) -> Result<()> {
    if s.is_finite() && t.is_finite() && u.is_finite() && s >= 0.0 && t >= 0.0 && u >= 0.0 {
        Ok(())
    } else {
        Err(ContinuumError::Domain(format!("({s}, {t}, {u}) must be nonnegative")))
    }
}

/// Converts rescaled distances to `(S, T, U)`; errors outside the triangle domain.
pub fn stu_from_distances(d12: f64, d23: f64, d31: f64) -> Result<(f64, f64, f64)> {
    let s = 0.5 * (d12 - d23 + d31);
    let t = 0.5 * (d12 + d23 - d31);
    let u = 0.5 * (-d12 + d23 + d31);
    let eps = 1e-12 * (d12.abs() + d23.abs() + d31.abs());
    if s < -eps || t < -eps || u < -eps || !(s + t + u).is_finite() {
        return Err(ContinuumError::Domain(format!("({d12}, {d23}, {d31}) violates a triangle inequality")));
    }
    Ok((s.max(0.0), t.max(0.0), u.max(0.0)))
}

struct ThreeParts {
    hyp: [Hyp; 7],
    /// `F` itself.
    f: C,
}

/// Arguments in the order `S+T+U, S, T, U, S+T, T+U, U+S`.
fn three_parts(s: f64, t: f64, u: f64, a: C) -> Result<ThreeParts> {
    let args = [s + t + u, s, t, u, s + t, t + u, u + s];
    let mut hyp_v = [Hyp::default(); 7];
    for (h, &x) in hyp_v.iter_mut().zip(&args) {
        *h = hyp(a * x)?;
    }
    let ratio = args[0].ln() + s.ln() + t.ln() + u.ln() - args[4].ln() - args[5].ln() - args[6].ln();
    let lw = ratio + hyp_v[0].lsc + hyp_v[1].lsc + hyp_v[2].lsc + hyp_v[3].lsc
        - hyp_v[4].lsc
        - hyp_v[5].lsc
        - hyp_v[6].lsc;
    Ok(ThreeParts { hyp: hyp_v, f: 3.0 * (2.0 * lw).exp() })
}

/// Three-point scaling function `F(S,T,U)`.
pub fn scaling_three_f(s: f64, t: f64, u: f64, alpha: C) -> Result<C> {
    check_stu(s, t, u)?;
    if s == 0.0 || t == 0.0 || u == 0.0 {
        return Ok(C::new(0.0, 0.0));
    }
    Ok(three_parts(s, t, u, alpha)?.f)
}

/// `(1/2) d_S d_T d_U F` in closed form.
pub fn scaling_three_g_stu(s: f64, t: f64, u: f64, a: C) -> Result<C> {
    check_stu(s, t, u)?;
    if s == 0.0 || t == 0.0 || u == 0.0 {
        return Ok(C::new(0.0, 0.0));
    }
    let p = three_parts(s, t, u, a)?;
    let args = [s + t + u, s, t, u, s + t, t + u, u + s];
    // c(x) = a coth(a x) and its derivatives, poles added back as real terms
    let sc: Vec<[C; 3]> = p.hyp.iter().zip(&args).map(|(h, &x)| h.scaled(a, x)).collect();
    let c: Vec<C> = sc.iter().map(|v| v[0]).collect();
    let dc = |i: usize| sc[i][1];
    let fs = 2.0 * (c[0] + c[1] - c[4] - c[6]);
    let ft = 2.0 * (c[0] + c[2] - c[4] - c[5]);
    let fu = 2.0 * (c[0] + c[3] - c[5] - c[6]);
    let fst = 2.0 * (dc(0) - dc(4));
    let ftu = 2.0 * (dc(0) - dc(5));
    let fsu = 2.0 * (dc(0) - dc(6));
    let fstu = 2.0 * sc[0][2];
    Ok(0.5 * p.f * (fs * ft * fu + fs * ftu + ft * fsu + fu * fst + fstu))
}

/// Three-point scaling function `G(D12, D23, D31)`.
pub fn scaling_three_g(d12: f64, d23: f64, d31: f64, alpha: C) -> Result<C> {
    let (s, t, u) = stu_from_distances(d12, d23, d31)?;
    scaling_three_g_stu(s, t, u, alpha)
}

/// Large-distance form of the three-point `G`: `66 alpha exp(-alpha (D12+D23+D31))`.
pub fn scaling_three_large(sum: f64, alpha: C) -> C {
    66.0 * alpha * (-alpha * sum).exp()
}

/// Integral of the grand-canonical `G` over the position of the third point, closed form.
pub fn gc_marginal_closed(d: f64, alpha: f64) -> f64 {
    let x = alpha * d;
    let sh = x.sinh();
    9.0 / (8.0 * sh.powi(4)) * (4.0 * d + 2.0 * d * (2.0 * x).cosh() - 3.0 * (2.0 * x).sinh() / alpha)
}

/// Same integral as `-(9 / (16 alpha^3)) dG/d alpha` of the two-point function.
pub fn gc_marginal_from_two(d: f64, alpha: f64) -> Result<f64> {
    let da = scaling_two_dalpha(d, C::new(alpha, 0.0))?;
    Ok(-9.0 / (16.0 * alpha.powi(3)) * da.re)
}

/// Same integral by cubature of the closed-form three-point `G` over `(S, U)`.
pub fn gc_marginal_cubature(d: f64, alpha: f64) -> Result<f64> {
    let a = C::new(alpha, 0.0);
    let srule = composite_rule(&[0.0, 0.5 * d, d], 24);
    let ubreaks: Vec<f64> = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0].iter().map(|x| x / alpha).collect();
    let urule = composite_rule(&ubreaks, 24);
    let rows: Vec<f64> = srule
        .par_iter()
        .map(|&(s, ws)| {
            let mut acc = 0.0;
            for &(u, wu) in &urule {
                acc += wu * scaling_three_g_stu(s, d - s, u, a)?.re;
            }
            Ok(ws * acc)
        })
        .collect::<Result<_>>()?;
    Ok(2.0 * rows.iter().sum::<f64>())
}

// ---------------------------------------------------------------------------
// quadrature

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    if n == 1 {
        return vec![(0.0, 2.0)];
    }
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss-Legendre rule with `per_panel` nodes between consecutive breakpoints.
pub fn composite_rule(breaks: &[f64], per_panel: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(per_panel);
    let mut out = Vec::with_capacity(gl.len() * breaks.len());
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        out.extend(gl.iter().map(|&(x, wt)| (mid + half * x, half * wt)));
    }
    out
}

/// Discretised `(4/sqrt(pi)) int_0^cutoff xi exp(-xi^2) Im f(alpha(xi)) d xi`, after
/// `xi = w^2`, with panels refined near the origin where the poles of the integrand
/// approach the real axis.
#[derive(Debug, Clone)]
pub struct XiRule {
    nodes: Vec<(C, f64)>,
}

impl XiRule {
    pub fn new(cutoff: f64, per_panel: usize) -> Self {
        assert!(cutoff >= 6.0 && per_panel >= 2);
        let wmax = cutoff.sqrt();
        let mut breaks: Vec<f64> =
            [0.0, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.4, 1.8, 2.3].into_iter().filter(|&w| w < wmax).collect();
        breaks.push(wmax);
        let norm = 4.0 / PI.sqrt();
        let nodes = composite_rule(&breaks, per_panel)
            .into_iter()
            .map(|(w, wt)| {
                let xi = w * w;
                (alpha_canonical(xi), norm * wt * 2.0 * w * xi * (-xi * xi).exp())
            })
            .collect();
        XiRule { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply<F: Fn(C) -> Result<C>>(&self, f: F) -> Result<f64> {
        Ok(self.apply_with_scale(f)?.0)
    }

    /// The sum together with `sum |w Im f|`, the scale of its rounding error.
    pub fn apply_with_scale<F: Fn(C) -> Result<C>>(&self, f: F) -> Result<(f64, f64)> {
        let (mut acc, mut scale) = (0.0, 0.0);
        for &(a, w) in &self.nodes {
            let v = w * f(a)?.im;
            acc += v;
            scale += v.abs();
        }
        Ok((acc, scale))
    }
}

/// Largest tolerated ratio between the summed magnitudes and the result (about 1e-5
/// relative rounding error).
const MAX_CANCELLATION: f64 = 1e11;

/// Canonical (fixed size) evaluator: every density is a `xi` integral of a
/// grand-canonical function.
#[derive(Debug, Clone)]
pub struct Canonical {
    coarse: XiRule,
    fine: XiRule,
    /// Relative tolerance between the coarse and the doubled rule.
    pub rel_tol: f64,
    /// Absolute floor for the same comparison.
    pub abs_tol: f64,
    pub cutoff: f64,
}

impl Default for Canonical {
    fn default() -> Self {
        Self::new(8.0, 20)
    }
}

impl Canonical {
    pub fn new(cutoff: f64, per_panel: usize) -> Self {
        Canonical {
            coarse: XiRule::new(cutoff, per_panel),
            fine: XiRule::new(cutoff, 2 * per_panel),
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            cutoff,
        }
    }

    pub fn nodes(&self) -> usize {
        self.coarse.len()
    }

    /// Checked integral: conjugate symmetry asserted at a few nodes, and the coarse rule
    /// compared against the doubled one (whose value is returned).
    pub fn xi_integral<F: Fn(C) -> Result<C>>(&self, f: F) -> Result<f64> {
        for xi in [0.3, 1.1, 2.7] {
            let a = alpha_canonical(xi);
            let (fp, fm) = (f(a)?, f(alpha_canonical(-xi))?);
            let dev = (fm - fp.conj()).norm();
            if dev > 1e-10 * fp.norm().max(1.0) {
                return Err(ContinuumError::BranchSymmetry(dev));
            }
        }
        let coarse = self.coarse.apply(&f)?;
        let (fine, scale) = self.fine.apply_with_scale(&f)?;
        if scale > MAX_CANCELLATION * fine.abs() {
            return Err(ContinuumError::Cancellation { value: fine, scale });
        }
        if (coarse - fine).abs() > self.rel_tol * fine.abs() + self.abs_tol {
            return Err(ContinuumError::NotConverged { coarse, fine });
        }
        Ok(fine)
    }

    /// Single-pass integral with the coarse rule, for bulk cubature.
    pub fn xi_integral_fast<F: Fn(C) -> Result<C>>(&self, f: F) -> Result<f64> {
        self.coarse.apply(f)
    }

    /// Two-point density of the rescaled distance.
    pub fn rho2(&self, d: f64) -> Result<f64> {
        self.xi_integral(|a| scaling_two(d, a).map(|p| p.1))
    }

    /// Cumulative distribution of the rescaled distance.
    pub fn phi2(&self, d: f64) -> Result<f64> {
        self.xi_integral(|a| scaling_two(d, a).map(|p| p.0))
    }

    /// Three-point density of the pairwise rescaled distances.
    pub fn rho3(&self, d12: f64, d23: f64, d31: f64) -> Result<f64> {
        let (s, t, u) = stu_from_distances(d12, d23, d31)?;
        self.xi_integral(|a| scaling_three_g_stu(s, t, u, a))
    }

    /// Three-point density in `(S, T, U)` coordinates, single pass.
    pub fn rho3_stu_fast(&self, s: f64, t: f64, u: f64) -> Result<f64> {
        self.xi_integral_fast(|a| scaling_three_g_stu(s, t, u, a))
    }

    /// Integrated three-point function.
    pub fn phi3(&self, s: f64, t: f64, u: f64) -> Result<f64> {
        check_stu(s, t, u)?;
        self.xi_integral(|a| scaling_three_f(s, t, u, a))
    }

    /// Density of `(D23, D31)` given `D12`.
    pub fn rho_cond(&self, d23: f64, d31: f64, d12: f64) -> Result<f64> {
        let r2 = self.rho2(d12)?;
        if r2.abs() < 1e-280 {
            return Err(ContinuumError::Underflow(r2));
        }
        Ok(self.rho3(d12, d23, d31)? / r2)
    }

    /// `int rho3 dD23 dD31` at fixed `D12`, i.e. `int_0^D12 dS int_0^umax dU 2 rho3`.
    pub fn marginal3(&self, d12: f64, umax: f64) -> Result<f64> {
        let srule = composite_rule(&[0.0, 0.5 * d12, d12], 16);
        let ubreaks: Vec<f64> =
            [0.0, 0.25, 0.6, 1.2, 2.0, 3.0, 4.5, 6.0, 8.0, 12.0].into_iter().filter(|&x| x < umax).chain([umax]).collect();
        let urule = composite_rule(&ubreaks, 12);
        let pts: Vec<(f64, f64, f64)> =
            srule.iter().flat_map(|&(s, ws)| urule.iter().map(move |&(u, wu)| (s, u, ws * wu))).collect();
        let vals: Vec<f64> =
            pts.par_iter().map(|&(s, u, w)| Ok(w * self.rho3_stu_fast(s, d12 - s, u)?)).collect::<Result<_>>()?;
        Ok(2.0 * vals.iter().sum::<f64>())
    }

    /// `int_D rho3` over the triangle domain, i.e. `int 2 rho3 dS dT dU` on `[0, L]^3`.
    pub fn normalization3(&self, l: f64, per_panel: usize) -> Result<f64> {
        let breaks: Vec<f64> = [0.0, 0.6, 1.5, 3.0, 5.0].into_iter().filter(|&x| x < l).chain([l]).collect();
        let rule = composite_rule(&breaks, per_panel);
        let m = rule.len();
        // the density is symmetric in (S, T, U): sum over i <= j <= k with multiplicities
        let mut pts = Vec::new();
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    let mult = match (i == j, j == k) {
                        (true, true) => 1.0,
                        (false, false) => 6.0,
                        _ => 3.0,
                    };
                    pts.push((i, j, k, mult));
                }
            }
        }
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|&(i, j, k, mult)| {
                let w = rule[i].1 * rule[j].1 * rule[k].1 * mult;
                Ok(w * self.rho3_stu_fast(rule[i].0, rule[j].0, rule[k].0)?)
            })
            .collect::<Result<_>>()?;
        Ok(2.0 * vals.iter().sum::<f64>())
    }
}

// ---------------------------------------------------------------------------
// limiting shapes and asymptotic forms

/// Transverse profile at small `D12`: `(21/64)(1-w^2)^2(3-w^2)` on `[-1, 1]`.
pub fn psi(omega: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&omega) {
        return Err(ContinuumError::Domain(format!("omega = {omega} outside [-1, 1]")));
    }
    let w2 = omega * omega;
    Ok(21.0 / 64.0 * (1.0 - w2).powi(2) * (3.0 - w2))
}

/// Coefficients of `psi` in powers of omega, exact.
pub fn psi_polynomial() -> Vec<num_rational::BigRational> {
    use crate::series::rational;
    // (1 - w^2)^2 (3 - w^2) = 3 - 7 w^2 + 5 w^4 - w^6
    [3, 0, -7, 0, 5, 0, -1].iter().map(|&c| rational(21 * c, 64)).collect()
}

/// Longitudinal profile at large `D12`: `(4/3) sinh^2(v/2) (11 e^{-2v} - 8 e^{-3v})`.
pub fn phi_nu(nu: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(ContinuumError::Domain(format!("nu = {nu} must be nonnegative")));
    }
    Ok(4.0 / 3.0 * (0.5 * nu).sinh().powi(2) * (11.0 * (-2.0 * nu).exp() - 8.0 * (-3.0 * nu).exp()))
}

/// Small-distance form of the integrated three-point function (degree 8).
pub fn phi3_small(s: f64, t: f64, u: f64) -> f64 {
    let num = (s * t * u * (s + t + u)).powi(3) * (s * s + t * t + u * u + s * t + t * u + u * s);
    9.0 / 28.0 * num / ((s + t) * (t + u) * (u + s)).powi(2)
}

/// Large-distance form of the three-point density as a function of `D12+D23+D31`.
pub fn rho3_tail(sum: f64) -> f64 {
    99.0 / 6f64.sqrt() * sum * (-(0.75f64).powf(5.0 / 3.0) * sum.powf(4.0 / 3.0)).exp()
}

// ---------------------------------------------------------------------------
// limiting regimes

/// One measured limiting regime.
#[derive(Debug, Clone)]
pub struct LimitCheck {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tol: f64,
    pub passed: bool,
}

impl LimitCheck {
    fn new(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        let passed = (measured - target).abs() <= tol;
        LimitCheck { name: name.into(), measured, target, tol, passed }
    }
}

/// Mean of `U` under the conditional profile along `D23 = D31` at fixed `D12`.
pub fn ridge_width(c: &Canonical, d12: f64) -> Result<f64> {
    let rule = composite_rule(&[0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0], 12);
    let vals: Vec<(f64, f64)> = rule
        .par_iter()
        .map(|&(u, w)| c.rho3_stu_fast(0.5 * d12, 0.5 * d12, u).map(|r| (w * u * r, w * r)))
        .collect::<Result<_>>()?;
    let (m1, m0) = vals.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    Ok(m1 / m0)
}

/// Small-D12 factorization, large-D12 profile, small-distance homogeneity and
/// large-distance tail, each reported as a measured ratio or exponent. The two
/// deviation-ratio entries show the direction of convergence towards the limits.
pub fn limit_checks(c: &Canonical) -> Result<Vec<LimitCheck>> {
    let mut out = Vec::new();

    let small_ratio = |d12: f64, u: f64, omega: f64| -> Result<f64> {
        let s = 0.5 * (1.0 + omega) * d12;
        let exact = c.rho_cond(d12 - s + u, s + u, d12)?;
        Ok(exact * d12 / (c.rho2(u)? * psi(omega)?))
    };
    for (u, omega) in [(1.0, 0.3), (1.5, 0.0), (0.7, -0.6)] {
        let r = small_ratio(0.05, u, omega)?;
        out.push(LimitCheck::new(format!("small D12 factorization at D12=0.05, U={u}, omega={omega}"), r, 1.0, 0.03));
    }
    // the deviation should shrink linearly with D12
    let shrink = (small_ratio(0.005, 1.0, 0.3)? - 1.0) / (small_ratio(0.05, 1.0, 0.3)? - 1.0);
    out.push(LimitCheck::new("small D12 deviation ratio between D12=0.005 and 0.05", shrink, 0.1, 0.02));

    let large_ratios = |d12: f64, nu: f64| -> Result<Vec<f64>> {
        let scale = (9.0 * d12).powf(1.0 / 3.0);
        let u = nu / scale;
        let limit = scale / (2.0 * d12) * phi_nu(nu)?;
        let r2 = c.rho2(d12)?;
        [0.3, 0.5, 0.7].iter().map(|&f| Ok(c.rho3(d12, d12 - f * d12 + u, f * d12 + u)? / r2 / limit)).collect()
    };
    for nu in [0.5, 1.0, 1.3, 2.0, 3.0] {
        let rs = large_ratios(10.0, nu)?;
        let worst = rs.iter().cloned().fold(1.0, |w: f64, r| if (r - 1.0).abs() > (w - 1.0).abs() { r } else { w });
        out.push(LimitCheck::new(format!("large D12 profile at D12=10, nu={nu} (worst over S=3,5,7)"), worst, 1.0, 0.05));
        let spread = rs.iter().cloned().fold(f64::MIN, f64::max) / rs.iter().cloned().fold(f64::MAX, f64::min);
        out.push(LimitCheck::new(format!("large D12 transverse uniformity at D12=10, nu={nu}"), spread, 1.0, 0.05));
    }
    let shrink = (large_ratios(10.0, 1.3)?[1] - 1.0) / (large_ratios(5.0, 1.3)?[1] - 1.0);
    out.push(LimitCheck::new("large D12 deviation ratio between D12=10 and 5 (below 1)", shrink, 0.5, 0.5));

    let dir = (1.0, 1.5, 2.0);
    let phi_at = |l: f64| c.phi3(l * dir.0, l * dir.1, l * dir.2);
    let (p1, p2) = (phi_at(0.01)?, phi_at(0.02)?);
    out.push(LimitCheck::new("homogeneity exponent of Phi", (p2 / p1).log2(), 8.0, 0.05));
    out.push(LimitCheck::new(
        "homogeneous ratio Phi(2l)/(2^8 Phi(l)) at l = 0.01",
        p2 / (256.0 * p1),
        1.0,
        0.01,
    ));
    out.push(LimitCheck::new(
        "small-distance form of Phi at l = 0.01",
        p1 / phi3_small(0.01 * dir.0, 0.01 * dir.1, 0.01 * dir.2),
        1.0,
        0.01,
    ));
    let rho_at = |l: f64| c.rho3(l * 2.5, l * 3.5, l * 3.0);
    let (r1, r2s) = (rho_at(0.01)?, rho_at(0.02)?);
    out.push(LimitCheck::new("homogeneity exponent of rho3", (r2s / r1).log2(), 5.0, 0.05));

    let sum = 12.0;
    let d = sum / 3.0;
    out.push(LimitCheck::new("large-distance tail ratio at D12+D23+D31 = 12", c.rho3(d, d, d)? / rho3_tail(sum), 1.0, 0.05));

    let (w6, w10) = (ridge_width(c, 6.0)?, ridge_width(c, 10.0)?);
    out.push(LimitCheck::new("ridge width ratio w(6)/w(10) over (10/6)^(1/3)", (w6 / w10) / (10.0f64 / 6.0).powf(1.0 / 3.0), 1.0, 0.10));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn close(a: C, b: C, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn helpers_match_direct_formulas() {
        for z in [c(0.3, 0.1), c(-0.2, 0.35), c(0.49, -0.01), c(0.51, 0.2), c(-1.3, 0.7), c(2.0, -2.0), c(0.05, 0.02)] {
            let h = hyp(z).unwrap();
            let (s, ch) = (z.sinh(), z.cosh());
            assert!(close(h.coth + 1.0 / z, ch / s, 1e-13), "{z}");
            assert!(close(h.csch2 + 1.0 / (z * z), 1.0 / (s * s), 1e-13), "{z}");
            assert!(close(h.ccs3 + 1.0 / (z * z * z), ch / (s * s * s), 1e-13), "{z}");
            assert!((h.lsc - (s / z).ln()).norm() < 1e-12, "{z}");
        }
        // regular parts near the origin against the leading Taylor terms
        let z = c(0.004, -0.003);
        let h = hyp(z).unwrap();
        let (z2, z3) = (z * z, z * z * z);
        assert!(close(h.coth, z / 3.0 - z3 / 45.0, 1e-10));
        assert!(close(h.csch2, -1.0 / 3.0 + z2 / 15.0, 1e-10));
        assert!(close(h.ccs3, -z / 15.0 + 4.0 * z3 / 189.0, 1e-10));
        assert!(close(h.lsc, z2 / 6.0 - z2 * z2 / 180.0, 1e-10));
        // large arguments stay finite where the direct formulas overflow
        let h = hyp(c(800.0, 3.0)).unwrap();
        let [ct, c2, _] = h.full.unwrap();
        assert!((ct - c(1.0, 0.0)).norm() < 1e-12);
        assert!(c2.norm() < 1e-300);
        assert!(matches!(hyp(c(0.0, 0.0)), Err(ContinuumError::Pole(_))));
        assert!(matches!(hyp(c(0.0, PI)), Err(ContinuumError::Pole(_))));
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let r = gauss_legendre(12);
        for k in 0..24u32 {
            let got: f64 = r.iter().map(|&(x, w)| w * x.powi(k as i32)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - want).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn two_point_derivative_matches_finite_difference() {
        let (d, a, h) = (1.3, c(0.7, 0.2), 1e-4);
        let g = scaling_two(d, a).unwrap().1;
        let fd = (scaling_two(d + h, a).unwrap().0 - scaling_two(d - h, a).unwrap().0) / (2.0 * h);
        assert!(close(fd, g, 1e-6));
        let da = scaling_two_dalpha(d, a).unwrap();
        let hv = c(1e-5, 0.0);
        let fd = (scaling_two(d, a + hv).unwrap().1 - scaling_two(d, a - hv).unwrap().1) / (2.0 * hv);
        assert!(close(fd, da, 1e-6));
    }

    #[test]
    fn two_point_large_distance_and_sign() {
        let a = c(0.9, 0.0);
        let g = scaling_two(30.0, a).unwrap().1;
        assert!((g / scaling_two_large(30.0, a) - 1.0).norm() < 1e-10);
        for d in [0.1, 1.0, 5.0] {
            assert!(scaling_two(d, a).unwrap().1.re > 0.0);
        }
        assert!(scaling_two(0.0, a).is_err());
    }

    #[test]
    fn three_point_f_properties() {
        let a = c(0.9, 0.0);
        let v = scaling_three_f(0.3, 0.7, 1.1, a).unwrap();
        for p in [(0.7, 0.3, 1.1), (1.1, 0.7, 0.3), (0.3, 1.1, 0.7)] {
            assert!(close(scaling_three_f(p.0, p.1, p.2, a).unwrap(), v, 1e-13));
        }
        assert_eq!(scaling_three_f(0.3, 0.7, 0.0, a).unwrap(), c(0.0, 0.0));
        let x = 40.0 / 0.9;
        // each sinh ratio tends to 1/2, so F tends to 3 / (4 alpha^2)
        assert!(close(scaling_three_f(x, x, x, a).unwrap(), c(3.0 / (4.0 * 0.81), 0.0), 1e-12));
        // quadratic vanishing as one argument shrinks
        let r = scaling_three_f(0.3, 0.7, 2e-6, a).unwrap() / scaling_three_f(0.3, 0.7, 1e-6, a).unwrap();
        assert!((r.re - 4.0).abs() < 1e-4, "{r}");
        assert!(scaling_three_f(-0.1, 1.0, 1.0, a).is_err());
    }

    fn fd_third(s: f64, t: f64, u: f64, a: C, h: f64) -> C {
        let mut acc = c(0.0, 0.0);
        for i in [-1.0, 1.0] {
            for j in [-1.0, 1.0] {
                for k in [-1.0, 1.0] {
                    acc += i * j * k * scaling_three_f(s + i * h, t + j * h, u + k * h, a).unwrap();
                }
            }
        }
        acc / (8.0 * h * h * h)
    }

    #[test]
    fn three_point_g_matches_finite_difference() {
        let (s, t, u) = stu_from_distances(1.0, 1.2, 1.4).unwrap();
        for a in [c(0.8, 0.0), c(0.9, -0.9), c(0.3, 1.2)] {
            let g = scaling_three_g(1.0, 1.2, 1.4, a).unwrap();
            assert!(close(0.5 * fd_third(s, t, u, a, 1e-3), g, 1e-4), "{a}");
        }
        let g = scaling_three_g(1.0, 1.2, 1.4, c(0.8, 0.0)).unwrap();
        for p in [(1.2, 1.0, 1.4), (1.4, 1.2, 1.0), (1.0, 1.4, 1.2)] {
            assert!(close(scaling_three_g(p.0, p.1, p.2, c(0.8, 0.0)).unwrap(), g, 1e-12));
        }
        assert!(scaling_three_g(1.0, 1.0, 3.0, c(0.8, 0.0)).is_err());
    }

    #[test]
    fn three_point_g_large_distances() {
        let a = 0.8;
        let d = 10.0 / a;
        let g = scaling_three_g(d, d, d, c(a, 0.0)).unwrap();
        let r = (g / scaling_three_large(3.0 * d, c(a, 0.0))).re;
        assert!((r - 1.0).abs() < 0.01, "{r}");
    }

    #[test]
    fn grand_canonical_marginal_routes_agree() {
        for (d, a) in [(1.0, 0.7), (2.5, 1.3), (0.4, 2.0)] {
            let closed = gc_marginal_closed(d, a);
            let two = gc_marginal_from_two(d, a).unwrap();
            let cub = gc_marginal_cubature(d, a).unwrap();
            assert!((closed - two).abs() < 1e-9 * closed.abs(), "{d} {a}");
            assert!((cub - closed).abs() < 1e-6 * closed.abs(), "{d} {a}: {cub} vs {closed}");
        }
    }

    #[test]
    fn xi_integral_basics() {
        let cn = Canonical::default();
        assert!(cn.nodes() >= 200);
        assert_eq!(cn.xi_integral(|_| Ok(c(1.0, 0.0))).unwrap(), 0.0);
        // Im f = xi gives (4/sqrt(pi)) int xi^2 e^{-xi^2} = 1
        let v = cn.xi_integral(|a| Ok(c(0.0, 2.0 / 3.0) * a * a * c(0.0, 1.0))).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        assert!(matches!(cn.xi_integral(|a| Ok(c(0.0, 1.0) * a)), Err(ContinuumError::BranchSymmetry(_))));
        assert!(matches!(cn.rho2(20.0), Err(ContinuumError::Cancellation { .. })));
        assert!(cn.rho2(10.0).unwrap() > 0.0);
    }

    #[test]
    fn two_point_density_basics() {
        let cn = Canonical::default();
        assert!((cn.phi2(25.0).unwrap() - 1.0).abs() < 1e-6);
        assert!(cn.phi2(0.02).unwrap().abs() < 1e-6);
        let small = cn.rho2(0.05).unwrap() / 0.05f64.powi(3);
        assert!((small / (3.0 / 7.0) - 1.0).abs() < 0.02, "{small}");
        let (d, h) = (1.2, 1e-3);
        let fd = (cn.phi2(d + h).unwrap() - cn.phi2(d - h).unwrap()) / (2.0 * h);
        assert!((fd - cn.rho2(d).unwrap()).abs() < 1e-4);
        // mode near 1.5
        let grid: Vec<f64> = (100..=200).map(|i| i as f64 * 0.01).collect();
        let mode = grid
            .iter()
            .map(|&d| (d, cn.rho2(d).unwrap()))
            .fold((0.0, f64::MIN), |m, v| if v.1 > m.1 { v } else { m })
            .0;
        assert!((mode - 1.5).abs() <= 0.1, "{mode}");
    }

    #[test]
    fn three_point_density_is_nonnegative_and_derivative_of_phi() {
        let cn = Canonical::default();
        for (s, t, u) in [(0.2, 0.3, 0.4), (1.0, 0.5, 1.5), (2.0, 2.0, 0.3), (0.05, 3.0, 1.0)] {
            assert!(cn.rho3(s + t, t + u, u + s).unwrap() >= 0.0);
        }
        assert_eq!(cn.rho3(2.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((cn.phi3(12.0, 12.0, 12.0).unwrap() - 1.0).abs() < 1e-8);
        let (s, t, u, h) = (0.6, 0.4, 0.8, 5e-3);
        let mut acc = 0.0;
        for i in [-1.0, 1.0] {
            for j in [-1.0, 1.0] {
                for k in [-1.0, 1.0] {
                    acc += i * j * k * cn.phi3(s + i * h, t + j * h, u + k * h).unwrap();
                }
            }
        }
        let fd = 0.5 * acc / (8.0 * h * h * h);
        let r = cn.rho3(s + t, t + u, u + s).unwrap();
        assert!((fd / r - 1.0).abs() < 1e-4, "{fd} {r}");
    }

    #[test]
    fn profiles() {
        use crate::series::rational;
        assert_eq!(psi(1.0).unwrap(), 0.0);
        assert_eq!(psi(-1.0).unwrap(), 0.0);
        assert!((psi(0.0).unwrap() - 63.0 / 64.0).abs() < 1e-15);
        assert!(psi(1.5).is_err());
        let poly = psi_polynomial();
        let mut integral = rational(0, 1);
        for (k, ck) in poly.iter().enumerate() {
            if k % 2 == 0 {
                integral += ck * rational(2, k as i64 + 1);
            }
        }
        assert_eq!(integral, rational(1, 1));
        for w in [-0.7, 0.2, 0.9] {
            let horner = poly.iter().rev().fold(0.0, |acc, ck| {
                use num_traits::ToPrimitive;
                acc * w + ck.to_f64().unwrap()
            });
            assert!((horner - psi(w).unwrap()).abs() < 1e-14);
        }
        assert_eq!(phi_nu(0.0).unwrap(), 0.0);
        assert!(phi_nu(-1.0).is_err());
        let total: f64 = composite_rule(&[0.0, 1.0, 3.0, 8.0, 20.0, 60.0], 30).iter().map(|&(x, w)| w * phi_nu(x).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        // expanded form (11 e^-v - 30 e^-2v + 27 e^-3v - 8 e^-4v)/3 integrates to (11 - 15 + 9 - 2)/3
        assert_eq!(rational(11, 1) - rational(30, 2) + rational(27, 3) - rational(8, 4), rational(3, 1));
        for v in [0.3, 1.7] {
            let e = |k: f64| (-k * v).exp();
            let expanded = (11.0 * e(1.0) - 30.0 * e(2.0) + 27.0 * e(3.0) - 8.0 * e(4.0)) / 3.0;
            assert!((expanded - phi_nu(v).unwrap()).abs() < 1e-14);
        }
    }
}
