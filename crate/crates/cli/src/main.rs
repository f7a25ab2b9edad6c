use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use quadgeo::continuum::{self, Canonical};
use quadgeo::geodesic;
use quadgeo::gf::{DistanceTriple, GfEngine};
use quadgeo::sampler;
use quadgeo::series::Series;
use quadgeo::verify::{self, SuiteReport};

/// Distance statistics of random planar quadrangulations.
#[derive(Parser, Debug)]
#[command(name = "quadgeo", version, about)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "QUADGEO_THREADS")]
    threads: Option<usize>,
    /// Print the time spent in each suite or table to stderr.
    #[arg(long, global = true)]
    profile: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Series coefficients of a generating function, as exact rationals.
    Gf(GfArgs),
    /// Identity suites; exits 1 on the first failing suite.
    Verify(VerifyArgs),
    /// Continuum scaling functions on grids.
    Continuum(ContinuumArgs),
    /// Monte Carlo estimates from uniform random quadrangulations.
    Sample(SampleArgs),
    /// Exact geodesic-point profiles and laws.
    Geodesic(GeodesicArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GfName {
    /// R_i, needs --i
    R,
    /// log(R_i / R_{i-1}), needs --i
    TwoPoint,
    /// X_{s,t}
    X,
    /// Y_{s,t,u}
    Y,
    /// F(s,t,u)
    F3,
    /// three-point function at distances --d
    G3,
    /// X^(c)_{s,t}, needs --c
    Xc,
    /// four-point function, needs --v
    G4,
}

#[derive(Args, Debug)]
struct GfArgs {
    name: GfName,
    #[arg(long, default_value_t = 10)]
    order: usize,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 1)]
    u: usize,
    #[arg(long)]
    v: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    /// Distances d12,d23,d31.
    #[arg(long, value_delimiter = ',')]
    d: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    All,
    Gf,
    Oracle,
    Bijection,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    suite: Suite,
    #[arg(long, default_value_t = 16)]
    order: usize,
    #[arg(long, default_value_t = 4)]
    max_stu: usize,
    #[arg(long, default_value_t = 3)]
    oracle_n: usize,
    /// Number of random instances for the bijection round trips.
    #[arg(long, default_value_t = 1000)]
    fuzz: usize,
    #[arg(long, default_value_t = 50)]
    max_n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ContinuumTable {
    /// D, rho2, Phi2
    Rho2,
    /// D23, D31, conditional density at fixed --d12
    RhoCond,
    /// omega, psi
    Psi,
    /// nu, phi
    Phi,
    /// limiting-regime checks
    Limits,
}

#[derive(Args, Debug)]
struct ContinuumArgs {
    table: ContinuumTable,
    #[arg(long, default_value_t = 6.0)]
    dmax: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long, default_value_t = 0.8)]
    d12: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SampleKind {
    TwoPoint,
    ThreePoint,
    Geodesic,
    /// pointed isomorphism classes at small n against exhaustive frequencies
    Classes,
}

#[derive(Args, Debug)]
struct SampleArgs {
    kind: SampleKind,
    #[arg(long, default_value_t = 16384)]
    n: usize,
    #[arg(long, default_value_t = 10000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Distances from the first source for geodesic counts.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    s: Vec<u32>,
    #[arg(long, default_value_t = 30)]
    d_min: u32,
    /// Attempts allowed per requested geodesic sample.
    #[arg(long, default_value_t = 20)]
    attempt_factor: usize,
    /// Bin width in rescaled distance for three-point histograms.
    #[arg(long, default_value_t = 0.2)]
    width: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GeodesicTable {
    /// s, mean number of geodesic points at distance --d
    Profile,
    /// c, law at (--s, --t)
    Pmf,
    /// c, law with the second source far away
    PmfInf,
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    table: GeodesicTable,
    #[arg(long, default_value_t = 10)]
    d: u64,
    #[arg(long, default_value_t = 1)]
    s: u64,
    #[arg(long, default_value_t = 1)]
    t: u64,
    #[arg(long, default_value_t = 20)]
    cmax: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) | Failure::Other(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Decimal with 12 significant digits, scientific outside `[1e-5, 1e12)`.
fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let s = format!("{:.*}", (11 - e).max(0) as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// Writes to a sibling temporary file, then renames over `path`.
fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, text).map_err(|e| Failure::Other(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Other(e.to_string())),
    }
}

struct Profiler {
    on: bool,
}

impl Profiler {
    fn time<T>(&self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let r = f();
        if self.on {
            eprintln!("profile: {name}: {:.3} s", start.elapsed().as_secs_f64());
        }
        r
    }
}

fn series_csv(s: &Series) -> String {
    let mut out = String::from("k,coefficient\n");
    for k in 0..=s.order() {
        let _ = writeln!(out, "{k},{}", s.coeff(k));
    }
    out
}

fn run_gf(a: &GfArgs) -> Result<String, Failure> {
    let e = GfEngine::new(a.order);
    let need = |x: Option<usize>, flag: &str| x.ok_or_else(|| usage(format!("{flag} is required")));
    let s = match a.name {
        GfName::R => e.r_closed(need(a.i, "--i")?).map_err(usage)?,
        GfName::TwoPoint => e.two_point(need(a.i, "--i")?).map_err(usage)?,
        GfName::X => e.x_closed(a.s, a.t),
        GfName::Y => e.y_closed(a.s, a.t, a.u),
        GfName::F3 => e.f_product(a.s, a.t, a.u),
        GfName::G3 => {
            let [d12, d23, d31] = <[u64; 3]>::try_from(a.d.as_slice()).map_err(|_| usage("--d needs d12,d23,d31"))?;
            e.g_three(DistanceTriple::new(d12, d23, d31).map_err(usage)?)
        }
        GfName::Xc => e.x_c(a.s, a.t, need(a.c, "--c")?).map_err(usage)?,
        GfName::G4 => {
            if a.s == 0 || a.t == 0 || a.u == 0 {
                return Err(usage("four-point parameters must be positive"));
            }
            e.g_four(a.s, a.t, a.u, need(a.v, "--v")?)
        }
    };
    Ok(series_csv(&s))
}

fn run_verify(a: &VerifyArgs, prof: &Profiler) -> Result<String, Failure> {
    let mut reports: Vec<SuiteReport> = Vec::new();
    if matches!(a.suite, Suite::All | Suite::Gf) {
        reports.extend(prof.time("gf identities", || verify::gf_identities(a.order, a.max_stu)));
        reports.push(prof.time("three-point totals", || verify::three_point_totals(a.order.min(8))));
    }
    if matches!(a.suite, Suite::All | Suite::Oracle) {
        reports.extend(prof.time("oracle", || verify::oracle_agreement(a.oracle_n)));
    }
    if matches!(a.suite, Suite::All | Suite::Bijection) {
        reports.extend(prof.time("bijection", || verify::bijection_fuzz(a.fuzz, a.max_n, a.seed)));
    }
    let mut out = String::from("suite,cases,failures\n");
    for r in &reports {
        let _ = writeln!(out, "\"{}\",{},{}", r.name, r.cases, r.failures.len());
    }
    if let Some(r) = reports.iter().find(|r| !r.passed()) {
        print!("{out}");
        return Err(Failure::Verification(format!("{}: {}", r.name, r.failures[0])));
    }
    Ok(out)
}

fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if step <= 0.0 || end < start {
        return Err(usage("grid needs a positive step and an increasing range"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

fn run_continuum(a: &ContinuumArgs) -> Result<String, Failure> {
    let c = Canonical::default();
    let err = |e: continuum::ContinuumError| Failure::Other(e.to_string());
    let mut out = String::new();
    match a.table {
        ContinuumTable::Rho2 => {
            out.push_str("D,rho2,Phi2\n");
            for d in grid(a.step, a.dmax, a.step)? {
                let _ = writeln!(out, "{},{},{}", fmt_f64(d), fmt_f64(c.rho2(d).map_err(err)?), fmt_f64(c.phi2(d).map_err(err)?));
            }
        }
        ContinuumTable::RhoCond => {
            out.push_str("D23,D31,rho_cond\n");
            for d23 in grid(a.step, a.dmax, a.step)? {
                for d31 in grid(a.step, a.dmax, a.step)? {
                    let v = match continuum::stu_from_distances(a.d12, d23, d31) {
                        Ok(_) => c.rho_cond(d23, d31, a.d12).map_err(err)?,
                        Err(_) => 0.0,
                    };
                    let _ = writeln!(out, "{},{},{}", fmt_f64(d23), fmt_f64(d31), fmt_f64(v));
                }
            }
        }
        ContinuumTable::Psi => {
            out.push_str("omega,psi\n");
            for w in grid(-1.0, 1.0, a.step)? {
                let _ = writeln!(out, "{},{}", fmt_f64(w), fmt_f64(continuum::psi(w.clamp(-1.0, 1.0)).map_err(err)?));
            }
        }
        ContinuumTable::Phi => {
            out.push_str("nu,phi\n");
            for nu in grid(a.step, a.dmax, a.step)? {
                let _ = writeln!(out, "{},{}", fmt_f64(nu), fmt_f64(continuum::phi_nu(nu).map_err(err)?));
            }
        }
        ContinuumTable::Limits => {
            out.push_str("check,measured,target,tolerance,passed\n");
            for l in continuum::limit_checks(&c).map_err(err)? {
                let _ = writeln!(out, "\"{}\",{},{},{},{}", l.name, fmt_f64(l.measured), fmt_f64(l.target), fmt_f64(l.tol), l.passed);
            }
        }
    }
    Ok(out)
}

fn run_sample(a: &SampleArgs) -> Result<String, Failure> {
    let err = |e: sampler::SamplerError| match e {
        sampler::SamplerError::Domain(_) => usage(e),
        _ => Failure::Other(e.to_string()),
    };
    let mut out = String::new();
    match a.kind {
        SampleKind::TwoPoint => {
            let s = sampler::empirical_two_point(a.n, a.samples, a.seed).map_err(err)?;
            let c = Canonical::default();
            let cdf = |x: f64| if x <= 0.0 { 0.0 } else { c.phi2(x).unwrap_or(f64::NAN) };
            eprintln!(
                "KS = {}, mean D = {}, mass above 6 = {}",
                fmt_f64(s.ks_distance(1.5, cdf)),
                fmt_f64(s.mean_rescaled()),
                fmt_f64(s.mass_above(6.0))
            );
            out.push_str("d,D,count,frequency\n");
            let total = s.distances.len() as f64;
            for (d, &k) in s.histogram().iter().enumerate() {
                let _ = writeln!(out, "{d},{},{k},{}", fmt_f64(d as f64 / s.scale()), fmt_f64(k as f64 / total));
            }
        }
        SampleKind::ThreePoint => {
            let s = sampler::empirical_three_point(a.n, a.samples, a.seed).map_err(err)?;
            out.push_str("D12_bin,D23_bin,D31_bin,count\n");
            for (b, k) in s.histogram(a.width) {
                let lo = |i: u32| fmt_f64(f64::from(i) * a.width);
                let _ = writeln!(out, "{},{},{},{k}", lo(b[0]), lo(b[1]), lo(b[2]));
            }
        }
        SampleKind::Geodesic => {
            let g = sampler::empirical_geodesic_counts(&a.s, a.d_min, a.n, a.samples, a.samples * a.attempt_factor, a.seed)
                .map_err(err)?;
            out.push_str("s,c,empirical,p_inf\n");
            for (k, &s) in g.s_values.iter().enumerate() {
                let law = geodesic::p_inf_law(u64::from(s)).map_err(usage)?;
                eprintln!("s = {s}: TV = {}, mean = {}", fmt_f64(g.tv_distance(k, &law)), fmt_f64(g.mean(k)));
                let pmf = g.pmf(k);
                let top = pmf.keys().copied().max().unwrap_or(1);
                for c in 1..=top {
                    let p = law.eval(c).to_f64().unwrap_or(f64::NAN);
                    let _ = writeln!(out, "{s},{c},{},{}", fmt_f64(pmf.get(&c).copied().unwrap_or(0.0)), fmt_f64(p));
                }
            }
        }
        SampleKind::Classes => {
            if a.n > 5 {
                return Err(usage("class frequencies are enumerated only for n <= 5"));
            }
            let h = sampler::pointed_class_histogram(a.n, a.samples, a.seed).map_err(err)?;
            let freqs = quadgeo::oracle::pointed_class_frequencies(a.n, Default::default()).map_err(usage)?;
            let expected = freqs.iter().map(|(k, v)| (k.clone(), v.to_f64().unwrap_or(f64::NAN))).collect();
            let chi = sampler::chi_square(&h, &expected);
            eprintln!("chi-square = {}, dof = {}, p = {}", fmt_f64(chi.statistic), chi.dof, fmt_f64(chi.p_value));
            out.push_str("class,expected,observed\n");
            for (i, (k, p)) in freqs.iter().enumerate() {
                let _ = writeln!(out, "{i},{p},{}", h.get(k).copied().unwrap_or(0));
            }
        }
    }
    Ok(out)
}

fn run_geodesic(a: &GeodesicArgs) -> Result<String, Failure> {
    let mut out = String::new();
    let float = |q: &num_rational::BigRational| fmt_f64(q.to_f64().unwrap_or(f64::NAN));
    match a.table {
        GeodesicTable::Profile => {
            out.push_str("s,s_over_d,mean,mean_exact,far_limit\n");
            for s in 1..a.d {
                let p = geodesic::geodesic_profile(s, a.d).map_err(usage)?;
                let far = geodesic::mean_geodesic_far(s);
                let _ = writeln!(out, "{s},{},{},{p},{}", fmt_f64(s as f64 / a.d as f64), float(&p), float(&far));
            }
        }
        GeodesicTable::Pmf | GeodesicTable::PmfInf => {
            let law = if a.table == GeodesicTable::Pmf {
                geodesic::p_geodesic_law(a.s, a.t)
            } else {
                geodesic::p_inf_law(a.s)
            }
            .map_err(usage)?;
            out.push_str("c,p,p_exact\n");
            for c in 1..=a.cmax {
                let p = law.eval(c);
                let _ = writeln!(out, "{c},{},{p}", float(&p));
            }
        }
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Other(e.to_string()))?;
    }
    let prof = Profiler { on: cli.profile };
    match &cli.command {
        Command::Gf(a) => emit(&a.out, &prof.time("gf", || run_gf(a))?),
        Command::Verify(a) => emit(&None, &run_verify(a, &prof)?),
        Command::Continuum(a) => emit(&a.out, &prof.time("continuum", || run_continuum(a))?),
        Command::Sample(a) => emit(&a.out, &prof.time("sample", || run_sample(a))?),
        Command::Geodesic(a) => emit(&a.out, &prof.time("geodesic", || run_geodesic(a))?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}\n\nRun with --help for usage."),
                Failure::Verification(m) => eprintln!("verification failed: {m}"),
                Failure::Other(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.1 + 0.2), "0.3");
        assert_eq!(fmt_f64(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_f64(-1234.5), "-1234.5");
        assert_eq!(fmt_f64(1.0e-7), "1.00000000000e-7");
        assert_eq!(fmt_f64(0.0), "0");
    }

    #[test]
    fn grids() {
        assert_eq!(grid(0.5, 1.5, 0.5).unwrap(), vec![0.5, 1.0, 1.5]);
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("quadgeo-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("t.csv");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
