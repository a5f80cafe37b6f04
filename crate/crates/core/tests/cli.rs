use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_eikonal-vv");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// `(r, p_eps, u_eps, u_limit)` rows of a solution CSV.
fn solution_rows(path: &Path) -> Vec<[f64; 4]> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

fn verdict(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn with_examples() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["examples", "--out", "fig"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

#[test]
fn verify_passes_for_maximal_solution() {
    let dir = with_examples();
    let out = run(dir.path(), &["verify", "fig/figure-u2.pp", "--f", "fig/figure-f.pp", "--out", "v.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(verdict(&dir.path().join("v.json"))["status"], "pass");
}

#[test]
fn verify_fails_inverted_tent_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("inv.pp"), "pp 2\n-1 0 -1 -1 0\n0 1 -1 1 0\n").unwrap();
    let out = run(dir.path(), &["verify", "inv.pp", "--f", "const:1", "--role", "super", "--out", "v.json"]);
    assert_eq!(code(&out), 1);
    let v = verdict(&dir.path().join("v.json"));
    assert_eq!(v["status"], "fail");
    assert!(v["witness_x"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn malformed_candidate_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.pp"), "pp 2\n-1 0 -1 -1 0\n0 1 -1 one 0\n").unwrap();
    let out = run(dir.path(), &["verify", "bad.pp", "--f", "const:1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["solve", "--potential", "const:1"])), 2);
    assert_eq!(code(&run(dir.path(), &["solve", "--potential", "const:1", "--epsilon", "0"])), 2);
    assert_eq!(code(&run(dir.path(), &["solve", "--potential", "wobble:1", "--epsilon", "0.1"])), 2);
    assert_eq!(code(&run(dir.path(), &["no-such-command"])), 2);
    assert_eq!(code(&run(dir.path(), &["--help"])), 0);
}

#[test]
fn compare_orders_examples_and_reports_vacuous_case() {
    let dir = with_examples();
    let fwd = run(dir.path(), &["compare", "--u", "fig/figure-u1.pp", "--v", "fig/figure-u2.pp", "--f", "fig/figure-f.pp", "--out", "c.json"]);
    assert_eq!(code(&fwd), 0);
    assert_eq!(verdict(&dir.path().join("c.json"))["status"], "pass");
    let rev = run(dir.path(), &["compare", "--u", "fig/figure-u2.pp", "--v", "fig/figure-u1.pp", "--f", "fig/figure-f.pp", "--zeros", "-0.5,0.5", "--out", "r.json"]);
    assert_eq!(code(&rev), 0);
    assert_eq!(verdict(&dir.path().join("r.json"))["status"], "hypothesis-not-met");
}

#[test]
fn solve_constant_matches_closed_form_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--potential", "const:1", "--dim", "1", "--epsilon", "0.01", "--grid", "1001"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = solution_rows(&dir.path().join("solution.csv"));
    assert_eq!(rows.len(), 1001);
    assert!((rows[0][2] - 0.99).abs() <= 1e-8, "u_eps(0) = {}", rows[0][2]);
    let sidecar = verdict(&dir.path().join("solution.json"));
    assert_eq!(sidecar["epsilon"], 0.01);
    assert_eq!(sidecar["panel_order"], 8);
    assert!(sidecar.get("created_unix").is_none());
}

#[test]
fn solve_vee_selects_maximal_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--potential", "vee:0.5", "--epsilon", "1e-3", "--out", "s.csv"]);
    assert_eq!(code(&out), 0);
    let rows = solution_rows(&dir.path().join("s.csv"));
    assert!((rows[0][2] - 0.25).abs() < 0.05);
    assert_eq!(rows[0][3], 0.25);
}

#[test]
fn solve_zero_potential_is_identically_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["solve", "--potential", "const:0", "--epsilon", "0.1", "--grid", "101"])), 0);
    for row in solution_rows(&dir.path().join("solution.csv")) {
        assert_eq!(&row[1..], &[0.0, 0.0, 0.0]);
    }
}

#[test]
fn solve_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("v.txt"), "pl\n0 0.3\n0.4 0\n0.7 1.2\n1 0.5\n").unwrap();
    let args = |name: &'static str| ["solve", "--potential", "v.txt", "--dim", "3", "--epsilon", "0.02", "--out", name];
    assert_eq!(code(&run(dir.path(), &args("a.csv"))), 0);
    assert_eq!(code(&run(dir.path(), &args("b.csv"))), 0);
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());
}

#[test]
fn solve_stamp_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--potential", "const:1", "--epsilon", "0.1", "--grid", "11", "--format", "json", "--stamp", "--out", "s.json"]);
    assert_eq!(code(&out), 0);
    let doc = verdict(&dir.path().join("s.json"));
    assert!(doc["created_unix"].as_u64().unwrap() > 0);
    assert_eq!(doc["u_eps"].as_array().unwrap().len(), 11);
}

#[test]
fn round_trip_margins_shrink_with_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let mut sub = Vec::new();
    let mut full = Vec::new();
    for eps in ["0.1", "0.01", "0.001"] {
        let csv = format!("s{eps}.csv");
        assert_eq!(code(&run(dir.path(), &["solve", "--potential", "vee:0.5", "--epsilon", eps, "--out", &csv])), 0);
        for (role, store) in [("sub", &mut sub), ("solution", &mut full)] {
            let json = format!("{role}{eps}.json");
            let out = run(dir.path(), &["verify", &csv, "--f", "vee:0.5", "--reflect", "--role", role, "--out", &json]);
            assert!(matches!(code(&out), 0 | 1));
            store.push(verdict(&dir.path().join(&json))["margin"].as_f64().unwrap().min(0.0).abs());
        }
    }
    for w in full.windows(2) {
        assert!(w[1] < w[0], "solution margins {full:?}");
    }
    for w in sub.windows(2) {
        assert!(w[1] < w[0] / 5.0, "subsolution margins {sub:?}");
    }
}

#[test]
fn limit_writes_exact_integral() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["limit", "--potential", "vee:0.5", "--grid", "5"])), 0);
    let text = fs::read_to_string(dir.path().join("limit.csv")).unwrap();
    let u: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(u, vec![0.25, 0.15625, 0.125, 0.09375, 0.0]);
}

#[test]
fn rate_and_zero_probe_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["rate", "--potential", "vee:0.5", "--dim", "2", "--epsilons", "0.1,0.03,0.01", "--grid", "201"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = verdict(&dir.path().join("rate.json"));
    assert_eq!(report["bound_constants"].as_array().unwrap().len(), 3);
    assert!(report["fitted_slope"].as_f64().is_some());
    let csv = fs::read_to_string(dir.path().join("rate.csv")).unwrap();
    assert!(csv.starts_with("epsilon,sup_error,uniform_error,bound_constant"));
    assert_eq!(csv.lines().count(), 4);

    let probe = run(dir.path(), &["zero-probe", "--potential", "vee:0.5", "--epsilons", "0.1,0.01,0.001", "--out", "z.json"]);
    assert_eq!(code(&probe), 0);
    assert!(String::from_utf8_lossy(&probe.stdout).contains("no theoretical rate claimed"));
    assert_eq!(verdict(&dir.path().join("z.json"))["monotone_decreasing"], true);

    let bad = run(dir.path(), &["rate", "--potential", "vee:0.5", "--epsilons", "0.01,0.1"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn examples_write_all_figure_files() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["examples", "--format", "svg-data"])), 0);
    for name in ["figure-u", "figure-f", "figure-u1", "figure-u2"] {
        for ext in ["csv", "pp", "svgdata"] {
            assert!(dir.path().join("figures").join(format!("{name}.{ext}")).is_file(), "{name}.{ext}");
        }
    }
}
