//! Acceptance run: one PASS/FAIL line per criterion, measurements indented
//! below it. Criteria listed in `KNOWN_FAILURES` still print FAIL but do not
//! fail the process unless QUADGEO_STRICT is set; the README explains each.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use quadgeo::continuum::{self, Canonical};
use quadgeo::geodesic;
use quadgeo::oracle::{self, OracleLimits};
use quadgeo::sampler;
use quadgeo::verify::{self, SuiteReport};

const KNOWN_FAILURES: &[u32] = &[5];

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("     {line}"));
    }

    fn suites(&mut self, reports: &[SuiteReport]) {
        for r in reports {
            let first = r.failures.first().map(|f| format!(": {f}")).unwrap_or_default();
            self.check(r.passed(), format!("{} ({} cases, {} failures){first}", r.name, r.cases, r.failures.len()));
        }
    }

    fn runtime(&mut self, elapsed: Duration, limit: Duration) {
        self.check(elapsed <= limit, format!("runtime {:.1} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn series_identities() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    o.suites(&verify::gf_identities(24, 5));
    o.runtime(start.elapsed(), Duration::from_secs(60));
    o
}

fn brute_force_oracle() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    o.suites(&verify::oracle_agreement(4));
    o.suites(&[verify::three_point_totals(8)]);
    o.runtime(start.elapsed(), Duration::from_secs(600));
    o
}

fn bijection_round_trip() -> Outcome {
    let mut o = Outcome::new();
    o.suites(&verify::bijection_fuzz(10_000, 50, 20240601));
    o
}

fn continuum_consistency() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let cn = Canonical::default();
    let phi_inf = cn.phi2(25.0).unwrap();
    o.check((phi_inf - 1.0).abs() < 1e-6, format!("Phi2(25) = {phi_inf:.15}"));
    let rule = continuum::composite_rule(&[0.0, 0.5, 1.0, 2.0, 3.0, 4.5, 6.0, 9.0], 20);
    let total: f64 = rule.iter().map(|&(d, w)| w * cn.rho2(d).unwrap()).sum();
    o.check((total - 1.0).abs() < 1e-4, format!("integral of rho2 over [0, 9] = {total:.12}"));
    o.note(format!("mass beyond D = 9: 1 - Phi2(9) = {:.2e}", 1.0 - cn.phi2(9.0).unwrap()));
    let norm = cn.normalization3(10.0, 10).unwrap();
    o.check((norm - 1.0).abs() < 5e-3, format!("integral of rho3 over the triangle domain, sides <= 10: {norm:.8}"));
    for d12 in [0.8, 1.5, 3.0] {
        let m = cn.marginal3(d12, 12.0).unwrap();
        let r = cn.rho2(d12).unwrap();
        o.check((m - r).abs() < 1e-3, format!("marginal of rho3 at D12 = {d12}: {m:.10} vs rho2 {r:.10}"));
    }
    for (d, a) in [(1.0, 0.7), (2.5, 1.3), (0.4, 2.0)] {
        let closed = continuum::gc_marginal_closed(d, a);
        let cub = continuum::gc_marginal_cubature(d, a).unwrap();
        let two = continuum::gc_marginal_from_two(d, a).unwrap();
        o.check(
            rel(cub, closed) < 1e-6 && rel(two, closed) < 1e-6,
            format!("grand-canonical marginal at D = {d}, alpha = {a}: cubature {cub:.12}, from two-point {two:.12}, closed {closed:.12}"),
        );
    }
    let small = cn.rho2(0.05).unwrap() / 0.05f64.powi(3);
    o.check(rel(small, 3.0 / 7.0) < 0.02, format!("rho2(0.05) / 0.05^3 = {small:.6} vs 3/7"));

    // first order
    let (d, a, h) = (1.3, C::new(0.7, 0.2), 1e-4);
    let g = continuum::scaling_two(d, a).unwrap().1;
    let fd = (continuum::scaling_two(d + h, a).unwrap().0 - continuum::scaling_two(d - h, a).unwrap().0) / (2.0 * h);
    o.check((fd - g).norm() < 1e-6 * g.norm().max(1.0), format!("two-point dF/dD: analytic {g:.10}, difference quotient {fd:.10}"));
    let da = continuum::scaling_two_dalpha(d, a).unwrap();
    let hv = C::new(h, 0.0);
    let fd = (continuum::scaling_two(d, a + hv).unwrap().1 - continuum::scaling_two(d, a - hv).unwrap().1) / (2.0 * h);
    o.check((fd - da).norm() < 1e-6 * da.norm().max(1.0), format!("two-point dG/dalpha: analytic {da:.10}, difference quotient {fd:.10}"));
    let (d, h) = (1.2, 1e-3);
    let fd = (cn.phi2(d + h).unwrap() - cn.phi2(d - h).unwrap()) / (2.0 * h);
    let r = cn.rho2(d).unwrap();
    o.check((fd - r).abs() < 1e-6, format!("dPhi2/dD at {d}: rho2 {r:.12}, difference quotient {fd:.12}"));

    // third order
    let (s, t, u) = continuum::stu_from_distances(1.0, 1.2, 1.4).unwrap();
    for a in [C::new(0.8, 0.0), C::new(0.9, -0.9), C::new(0.3, 1.2)] {
        let h = 1e-3;
        let mut acc = C::new(0.0, 0.0);
        for (i, j, k) in corners() {
            acc += i * j * k * continuum::scaling_three_f(s + i * h, t + j * h, u + k * h, a).unwrap();
        }
        let fd = 0.5 * acc / (8.0 * h * h * h);
        let g = continuum::scaling_three_g(1.0, 1.2, 1.4, a).unwrap();
        o.check((fd - g).norm() < 1e-4 * g.norm(), format!("three-point G at alpha = {a}: analytic {g:.8}, third difference {fd:.8}"));
    }
    let (s, t, u, h) = (0.6, 0.4, 0.8, 5e-3);
    let mut acc = 0.0;
    for (i, j, k) in corners() {
        acc += i * j * k * cn.phi3(s + i * h, t + j * h, u + k * h).unwrap();
    }
    let fd = 0.5 * acc / (8.0 * h * h * h);
    let r = cn.rho3(s + t, t + u, u + s).unwrap();
    o.check(rel(fd, r) < 1e-4, format!("rho3 against third difference of Phi3: {r:.10} vs {fd:.10}"));
    o.runtime(start.elapsed(), Duration::from_secs(300));
    o
}

fn corners() -> impl Iterator<Item = (f64, f64, f64)> {
    (0..8).map(|m| {
        let sg = |b: i32| if (m >> b) & 1 == 1 { 1.0 } else { -1.0 };
        (sg(0), sg(1), sg(2))
    })
}

fn limiting_regimes() -> Outcome {
    let mut o = Outcome::new();
    for l in continuum::limit_checks(&Canonical::default()).unwrap() {
        o.check(l.passed, format!("{}: {:.5} (target {} +/- {})", l.name, l.measured, l.target, l.tol));
    }
    o
}

fn f(q: &BigRational) -> f64 {
    q.to_f64().unwrap()
}

fn geodesic_statistics() -> Outcome {
    let mut o = Outcome::new();
    let one = BigRational::one();
    let (mut sums, mut means) = (true, true);
    for s in 1..=5 {
        for t in 1..=5 {
            let law = geodesic::p_geodesic_law(s, t).unwrap();
            sums &= law.total() == one && geodesic::p_geodesic_total_direct(s, t).unwrap() == one;
            means &= law.mean() == geodesic::geodesic_profile(s, s + t).unwrap();
        }
    }
    o.check(sums, "p_geodesic(., s, t) sums to 1 exactly, by geometric sums and by the direct difference, s, t <= 5".into());
    o.check(means, "mean of p_geodesic(., s, t) equals the geodesic profile exactly, s, t <= 5".into());
    let (mut sums, mut means) = (true, true);
    for s in 1..=10 {
        let law = geodesic::p_inf_law(s).unwrap();
        sums &= law.total() == one;
        means &= law.mean() == geodesic::mean_geodesic_far(s);
    }
    o.check(sums, "p_inf(., s) sums to 1 exactly, s <= 10".into());
    o.check(means, "mean of p_inf(., s) equals 3s(5+s)/((3+s)(2+s)) exactly, s <= 10".into());
    let far = geodesic::p_inf_far_law();
    o.check(far.total() == one, format!("p_inf_far sums to {}", far.total()));
    o.check(far.mean() == BigRational::from_integer(3.into()), format!("p_inf_far mean = {}", far.mean()));
    for s in [1, 2] {
        let r = geodesic::large_t_ratio(s, 10_000).unwrap();
        o.check((r - 1.0).abs() < 1e-3, format!("large-t ratio at s = {s}, t = 1e4: {r:.7}"));
    }
    for s in [3, 5] {
        let r = geodesic::large_t_ratio(s, 10_000).unwrap();
        o.note(format!("large-t ratio at s = {s}, t = 1e4: {r:.7} (correction about (6 + 2s)/t, not checked)"));
    }
    o
}

fn monte_carlo() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let cn = Canonical::default();
    let (n, samples) = (16384, 100_000);
    let two = sampler::empirical_two_point(n, samples, 7).unwrap();
    let cdf = |x: f64| if x <= 0.0 { 0.0 } else { cn.phi2(x).unwrap() };
    let ks = two.ks_distance(1.5, cdf);
    o.check(ks < 0.02, format!("two-point KS at n = {n}, {samples} samples: {ks:.5} (distance i compared at (i + 3/2)/n^(1/4))"));
    o.note(format!("KS sampling noise: 99.9% quantile 1.95/sqrt(N) = {:.5}", 1.95 / (samples as f64).sqrt()));
    let rule = continuum::composite_rule(&[0.0, 0.5, 1.0, 2.0, 3.0, 4.5, 6.0, 9.0], 20);
    let mean: f64 = rule.iter().map(|&(d, w)| w * d * cn.rho2(d).unwrap()).sum();
    let emp = two.mean_rescaled();
    o.note(format!("mean D: sample {emp:.5}, continuum {mean:.5} (relative {:.4})", rel(emp, mean)));
    o.note(format!("fraction with D > 6: {}", two.mass_above(6.0)));

    let (n, wanted) = (100_000, 8000);
    let g = sampler::empirical_geodesic_counts(&[1, 2], 30, n, wanted, 20 * wanted, 11).unwrap();
    o.note(format!("geodesic counts: n = {n}, d12 >= 30, {} accepted of {} attempts", g.accepted(), g.attempts));
    for (k, &s) in g.s_values.iter().enumerate() {
        let law = geodesic::p_inf_law(u64::from(s)).unwrap();
        let tv = g.tv_distance(k, &law);
        let noise: f64 = (1..40)
            .map(|c| {
                let p = f(&law.eval(c));
                (p * (1.0 - p) / wanted as f64).sqrt()
            })
            .sum::<f64>()
            * 0.5;
        o.check(tv < 0.02, format!("geodesic-count TV to p_inf(., {s}): {tv:.5} (sampling scale {noise:.4})"));
        o.note(format!("mean count at s = {s}: {:.4} vs {:.4}", g.mean(k), f(&geodesic::mean_geodesic_far(u64::from(s)))));
    }

    for n in 1..=3 {
        let h = sampler::pointed_class_histogram(n, 1_000_000, 100 + n as u64).unwrap();
        let exact = oracle::pointed_class_frequencies(n, OracleLimits::default()).unwrap();
        let expected = exact.iter().map(|(k, v)| (k.clone(), f(v))).collect();
        let chi = sampler::chi_square(&h, &expected);
        o.check(
            chi.p_value > 1e-3,
            format!("sampler vs exhaustive pointed classes at n = {n}: chi2 = {:.3}, dof = {}, p = {:.4}", chi.statistic, chi.dof, chi.p_value),
        );
    }
    o.runtime(start.elapsed(), Duration::from_secs(900));
    o
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 7] = [
        (1, "series identities", series_identities),
        (2, "brute-force oracle", brute_force_oracle),
        (3, "bijection round trip", bijection_round_trip),
        (4, "continuum normalizations and consistency", continuum_consistency),
        (5, "limiting regimes", limiting_regimes),
        (6, "geodesic statistics", geodesic_statistics),
        (7, "Monte Carlo", monte_carlo),
    ];
    let strict = std::env::var_os("QUADGEO_STRICT").is_some();
    let only: Option<u32> = std::env::var("QUADGEO_CRITERION").ok().and_then(|s| s.parse().ok());
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if only.is_some_and(|k| k != id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {id}: {name} ({:.1} s)", start.elapsed().as_secs_f64());
        for d in &out.details {
            println!("    {d}");
        }
        if !out.pass && (strict || !KNOWN_FAILURES.contains(&id)) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("failing criteria: {unexpected:?}");
        std::process::exit(1);
    }
}
