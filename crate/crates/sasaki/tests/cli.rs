use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const TWO_PI_SQ: f64 = 2.0 * PI * PI;

fn sasaki(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sasaki")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn temp_csv(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn bound_json_has_stable_keys() {
    let o = sasaki(&["bound", "--alpha0", "0.7853981634", "--output", "json"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let order = ["\"alpha0\"", "\"K\"", "\"bound\"", "\"quad_error\"", "\"closed_form_conjecture_gap\"", "\"notes\""];
    let pos: Vec<usize> = order.iter().map(|k| text.find(k).expect(k)).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    let v = json(&o);
    assert!((num(&v, "bound") - TWO_PI_SQ).abs() < 1e-9);
    assert!((num(&v, "K") - TWO_PI_SQ * (1.0 - 0.7853981634f64.cos())).abs() < 1e-9);
    assert!(num(&v, "closed_form_conjecture_gap").abs() < 1e-9);
    assert!(v["notes"].as_str().unwrap().contains("2*pi^2"));
}

#[test]
fn bound_rejects_degenerate_annuli() {
    for bad in ["0", "-0.1", "1.5707963267948966", "2"] {
        let o = sasaki(&["bound", "--alpha0", bad]);
        assert_eq!(code(&o), 2, "{bad}");
        assert!(stderr(&o).contains("alpha0 must lie in (0, pi/2)"));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn bound_near_the_poles() {
    let v = json(&sasaki(&["bound", "--alpha0", "1.57079"]));
    assert!((num(&v, "bound") - TWO_PI_SQ).abs() < 1e-3);
    assert!(num(&v, "quad_error") > 0.0);
    let v = json(&sasaki(&["bound", "--alpha0", "1.57079", "--rule", "simpson"]));
    assert!((num(&v, "bound") - TWO_PI_SQ).abs() < 1e-9);
}

#[test]
fn degrees_flag_converts_input_only() {
    let a = json(&sasaki(&["bound", "--alpha0", "45", "--degrees"]));
    assert!((num(&a, "alpha0") - PI / 4.0).abs() < 1e-15);
    let o = sasaki(&["bound", "--alpha0", "90", "--degrees"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn area_examples() {
    let v = json(&sasaki(&["area", "--alpha0", "0.7853981634", "--field", "minimizer"]));
    assert!(num(&v, "gap").abs() <= 1e-6);
    assert_eq!(v["hypotheses_hold"], Value::Bool(true));

    let v = json(&sasaki(&["area", "--alpha0", "0.5", "--field", "constant"]));
    assert!((num(&v, "area") - 4.0 * PI * 0.5).abs() < 1e-10);
    assert_eq!(v["boundary"]["tangent_at_boundaries"], Value::Bool(false));
    assert_eq!(v["boundary"]["perpendicular_at_equator"], Value::Bool(true));

    let v = json(&sasaki(&["area", "--field", "vk", "--k", "3"]));
    // π·L for semi-axes 3 and 1.
    assert!((num(&v, "area") - PI * 13.364_893_220_555_258).abs() < 1e-6);
    assert_eq!(v["region"], "punctured-sphere");

    let o = sasaki(&["area", "--field", "linear", "--alpha0", "0.7853981634", "--output", "csv"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][0], "field");
    let gap: f64 = rows[1][5].parse().unwrap();
    assert!(gap > 1e-3);
}

#[test]
fn area_input_errors() {
    assert_eq!(code(&sasaki(&["area", "--field", "vk"])), 2);
    assert_eq!(code(&sasaki(&["area", "--field", "minimizer"])), 2);
    assert_eq!(code(&sasaki(&["area", "--field", "grid", "--alpha0", "0.5"])), 2);
    assert_eq!(code(&sasaki(&["area", "--field", "nonsense", "--alpha0", "0.5"])), 2);
    let o = sasaki(&["area", "--alpha0", "0.5", "--field", "constant", "--require-bc"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("boundary"));
}

#[test]
fn grid_parse_failures_exit_4() {
    let cases = [
        "a,b\n-0.5,0\n0.5,3.14\n",
        "alpha,theta\n0.5,0\n-0.5,3.14\n",
        "alpha,theta\n-0.5,zero\n0.5,3.14\n",
        "alpha,theta\n-0.4,0\n0.5,3.14\n",
        "alpha,theta\n",
    ];
    for body in cases {
        let f = temp_csv(body);
        let o = sasaki(&["area", "--alpha0", "0.5", "--field", "grid", "--grid", f.path().to_str().unwrap()]);
        assert_eq!(code(&o), 4, "{body}");
    }
    let o = sasaki(&["area", "--alpha0", "0.5", "--field", "grid", "--grid", "/nonexistent/grid.csv"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn bound_violation_exits_3() {
    let o = sasaki(&["area", "--alpha0", "0.7", "--inject-bound-offset", "1e-3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("falls below bound"));
    assert!(o.stdout.is_empty());
    // Fields outside the hypotheses are never flagged.
    let o = sasaki(&["area", "--alpha0", "0.7", "--field", "constant", "--inject-bound-offset", "1e-3"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn optimized_profile_round_trips_as_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let p = path.to_str().unwrap();
    let o = sasaki(&["optimize", "--alpha0", "0.7853981634", "--n", "64", "--grad-tol", "1e-11", "--direction", "cg", "--export", p]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["converged"], Value::Bool(true));
    assert!(num(&v, "max_deviation_from_closed_form") < 1e-3);

    let first = std::fs::read_to_string(&path).unwrap();
    assert!(first.starts_with("alpha,theta\n"));
    assert_eq!(first.lines().count(), 66);

    let a = json(&sasaki(&["area", "--alpha0", "0.7853981634", "--field", "grid", "--grid", p, "--require-bc"]));
    assert_eq!(a["hypotheses_hold"], Value::Bool(true));
    assert!(num(&a, "gap") >= 0.0 && num(&a, "gap") < 1e-4);

    // Parse and re-serialize through the library: bytes must survive.
    let samples = sasaki::grid_io::parse_grid(first.as_bytes(), "profile").unwrap();
    let mut again = Vec::new();
    sasaki::grid_io::write_grid(&mut again, &samples.alphas, &samples.thetas).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), first);
}

#[test]
fn optimize_rejects_small_grids() {
    assert_eq!(code(&sasaki(&["optimize", "--alpha0", "0.5", "--n", "7"])), 2);
    assert_eq!(code(&sasaki(&["optimize", "--alpha0", "0.5", "--grad-tol", "0"])), 2);
}

#[test]
fn optimize_reports_iteration_cap() {
    let v = json(&sasaki(&["optimize", "--alpha0", "0.5", "--n", "40", "--max-iters", "5"]));
    assert_eq!(v["converged"], Value::Bool(false));
    assert_eq!(v["iterations"], 5);
}

#[test]
fn verify_passes_for_any_seed() {
    let a = sasaki(&["verify", "--seed", "42"]);
    let b = sasaki(&["verify", "--seed", "7"]);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(code(&b), 0, "{}", stdout(&b));
    let passed = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .filter(|l| l.starts_with("PASS"))
            .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
            .collect()
    };
    assert_eq!(passed(&a), passed(&b));
    assert_eq!(passed(&a).len(), sasaki::verify::check_names().len());
}

#[test]
fn corrupted_coefficient_fails_sharpness() {
    let o = sasaki(&["verify", "--bound-reading", "literal"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    let failed: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1, "{out}");
    assert!(failed[0].contains("sharpness"));
}

#[test]
fn sweep_tables() {
    let o = sasaki(&["sweep", "--alpha0", "0.3,0.6,0.9,1.2"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["alpha0", "K", "bound", "minimizer_area", "gap"]);
    assert_eq!(rows.len(), 5);
    for (row, a0) in rows[1..].iter().zip(["0.3", "0.6", "0.9", "1.2"]) {
        assert_eq!(row[0], a0);
        let bound: f64 = row[2].parse().unwrap();
        assert!((bound - TWO_PI_SQ).abs() < 1e-9);
    }

    let o = sasaki(&["sweep", "--k", "1,3,4,5"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["k", "bcj", "bcgn", "vk_area"]);
    for row in &rows[1..] {
        let (bcj, bcgn): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!(bcgn >= bcj);
    }
    // 12 significant digits.
    assert_eq!(rows[1][1], "19.7392088022");
}

#[test]
fn sweep_input_errors() {
    for args in [
        vec!["sweep", "--alpha0", ""],
        vec!["sweep", "--k", ""],
        vec!["sweep", "--k", "1,,3"],
        vec!["sweep", "--alpha0", "0.3,x"],
        vec!["sweep", "--alpha0", "0.3,2.0"],
        vec!["sweep", "--alpha0", "0.3", "--k", "1"],
        vec!["sweep"],
    ] {
        assert_eq!(code(&sasaki(&args)), 2, "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["bound", "--alpha0", "0.9", "--output", "csv"],
        vec!["sweep", "--alpha0", "0.3,0.6,0.9,1.2", "--output", "json"],
        vec!["sweep", "--k", "-1,1,3,4,5"],
        vec!["verify", "--seed", "3"],
    ] {
        let (a, b) = (sasaki(&args), sasaki(&args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&sasaki(&[])), 2);
    assert_eq!(code(&sasaki(&["bound"])), 2);
    assert_eq!(code(&sasaki(&["bound", "--alpha0", "abc"])), 2);
    assert_eq!(code(&sasaki(&["bound", "--alpha0", "0.5", "--rule", "simpson", "--panels", "3"])), 2);
}
