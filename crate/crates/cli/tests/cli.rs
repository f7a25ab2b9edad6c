use std::process::{Command, Output};

fn quadgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadgeo")).args(args).env("QUADGEO_THREADS", "1").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn three_point_coefficients() {
    let o = quadgeo(&["gf", "g3", "--d", "2,1,1", "--order", "6"]);
    assert!(o.status.success());
    let col: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(col.len(), 7);
    assert_eq!(&col[..2], ["0", "1"]);
    assert!(col.iter().all(|c| c.parse::<u64>().is_ok()));
}

#[test]
fn verify_all_passes() {
    let o = quadgeo(&["verify", "all", "--order", "16", "--max-stu", "4", "--oracle-n", "3", "--fuzz", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn rho2_table_has_monotone_cumulative_column() {
    let dir = std::env::temp_dir().join(format!("quadgeo-cli-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rho2.csv");
    let o = quadgeo(&["continuum", "rho2", "--dmax", "6", "--step", "0.01", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("D,rho2,Phi2"));
    let phi: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(phi.len(), 600);
    assert!(phi.windows(2).all(|w| w[1] >= w[0]));
    assert!(phi[phi.len() - 1] > 0.99);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_reproducible() {
    let args = ["sample", "geodesic", "--n", "500", "--samples", "40", "--d-min", "5", "--seed", "3"];
    let a = quadgeo(&args);
    assert!(a.status.success());
    let b = Command::new(env!("CARGO_BIN_EXE_quadgeo")).args(args).env("QUADGEO_THREADS", "2").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exact_tables_use_rationals() {
    let o = quadgeo(&["geodesic", "pmf-inf", "--s", "1", "--cmax", "3"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(rows, ["c,p,p_exact", "1,0.666666666667,2/3", "2,0.222222222222,2/9", "3,0.0740740740741,2/27"]);
}

#[test]
fn bad_input_exits_with_usage_code() {
    assert_eq!(quadgeo(&["gf", "nonsense"]).status.code(), Some(2));
    assert_eq!(quadgeo(&["gf", "g3", "--d", "5,1,1"]).status.code(), Some(2));
    assert_eq!(quadgeo(&["gf", "two-point"]).status.code(), Some(2));
    assert_eq!(quadgeo(&["geodesic", "profile", "--d", "0"]).status.code(), Some(0));
    assert_eq!(quadgeo(&["sample", "classes", "--n", "9"]).status.code(), Some(2));
}
