use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use twohop::code_model::TwoHopCode;
use twohop::prob::TwoHopSource;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twohop")).args(args).env_remove("TWOHOP_THREADS").output().expect("spawn twohop")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn region_independent_source_is_zero() {
    let o = run(&["region", p(&data("ind.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("b,c,d,R_value,converged\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 64);
    for r in rows {
        let v: f64 = r[3].parse().unwrap();
        assert!(v.abs() <= 1e-6, "{r:?}");
    }
}

#[test]
fn region_corner_matches_closed_form() {
    let path = data("dsbs.json");
    let s = TwoHopSource::load(&path).unwrap();
    for c in [0.5, 1.0, 2.0] {
        let o = run(&["region", p(&path), "--weights", &format!("0,{c},0")]);
        assert_eq!(o.status.code(), Some(0));
        let rows = csv_rows(&stdout(&o));
        let v: f64 = rows[0][3].parse().unwrap();
        let want = -(1.0 + c) * s.i_xy() - c * s.i_yz();
        assert!((v - want).abs() < 1e-6, "c={c}: {v} vs {want}");
    }
}

#[test]
fn region_dsbs_matches_pinned_csv() {
    let o = run(&["region", p(&data("dsbs.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let got = csv_rows(&stdout(&o));
    let want = csv_rows(&std::fs::read_to_string(data("dsbs_region.csv")).unwrap());
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert_eq!(g[..3], w[..3]);
        let (a, b): (f64, f64) = (g[3].parse().unwrap(), w[3].parse().unwrap());
        assert!((a - b).abs() < 1e-9, "{g:?} vs {w:?}");
    }
}

#[test]
fn region_writes_witnesses_and_respects_cards() {
    let dir = tempfile::tempdir().unwrap();
    let wd = dir.path().join("w");
    let o = run(&["region", p(&data("dsbs.json")), "--weights", "1,0.5,1", "--cards", "2,2", "--witness-dir", p(&wd)]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(wd.join("witness_0000.json")).unwrap()).unwrap();
    assert_eq!(j["b"], 1.0);
    assert!(j["aux"]["u_given_x"].is_object());
}

#[test]
fn region_bad_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, "{ not json").unwrap();
    let o = run(&["region", p(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = run(&["region", p(&data("dsbs.json")), "--weights", "1,-1,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn region_output_is_thread_independent() {
    let a = run(&["--threads", "1", "region", p(&data("dsbs.json")), "--grid", "0,1,4"]);
    let b = Command::new(env!("CARGO_BIN_EXE_twohop"))
        .args(["region", p(&data("dsbs.json")), "--grid", "0,1,4"])
        .env("TWOHOP_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_accept_all_passes_or_vacuous() {
    let dir = tempfile::tempdir().unwrap();
    let s = TwoHopSource::load(&data("dsbs.json")).unwrap();
    let code = dir.path().join("code.json");
    std::fs::write(&code, TwoHopCode::accept_all(&s, 2).unwrap().to_json()).unwrap();
    let o = run(&["verify", p(&data("dsbs.json")), "--code", p(&code), "--gamma", "1", "--gamma", "1.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let runs = j["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    for r in runs {
        for e in r["ledger"]["entries"].as_array().unwrap() {
            let st = e["status"].as_str().unwrap();
            assert!(st == "pass" || st == "vacuous", "{e}");
        }
    }
}

#[test]
fn verify_table_format() {
    let dir = tempfile::tempdir().unwrap();
    let s = TwoHopSource::load(&data("dsbs.json")).unwrap();
    let code = dir.path().join("code.json");
    std::fs::write(&code, TwoHopCode::accept_all(&s, 1).unwrap().to_json()).unwrap();
    let o = run(&["verify", p(&data("dsbs.json")), "--code", p(&code), "--format", "table"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("precursor"));
}

#[test]
fn verify_enumerate_n1_has_no_fails() {
    let o = run(&["verify", p(&data("dsbs.json")), "--enumerate", "--n", "1", "--n1", "2", "--n2", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["summary"]["fail_entries"], 0);
    assert!(j["summary"]["feasible"].as_u64().unwrap() > 0);
}

#[test]
fn verify_boundary_eps_exits_2() {
    let o = run(&["verify", p(&data("dsbs.json")), "--enumerate", "--eps1", "0.4", "--eps2", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_independent_has_zero_exponents() {
    let o = run(&["simulate", p(&data("ind.json")), "--n-list", "2..5"]);
    assert_eq!(o.status.code(), Some(0));
    for r in csv_rows(&stdout(&o)) {
        let (e2, f2): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(e2.abs() < 1e-9 && f2.abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn simulate_dsbs_matches_pinned_csv() {
    let a = run(&["simulate", p(&data("dsbs.json")), "--n-list", "4..12", "--seed", "0"]);
    assert_eq!(a.status.code(), Some(0));
    let got = csv_rows(&stdout(&a));
    let want = csv_rows(&std::fs::read_to_string(data("dsbs_quantize_scan.csv")).unwrap());
    assert_eq!(got.len(), 9);
    for (g, w) in got.iter().zip(&want) {
        assert_eq!(g[0], w[0]);
        assert_eq!(g[5..], w[5..]);
        for k in 1..5 {
            let (x, y): (f64, f64) = (g[k].parse().unwrap(), w[k].parse().unwrap());
            assert!((x - y).abs() < 1e-9, "{g:?} vs {w:?}");
        }
    }
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let src = data("dsbs.json");
    let args = ["simulate", p(&src), "--n-list", "3,5", "--seed", "7"];
    let a = run(&args);
    let mut with_threads = vec!["--threads", "2"];
    with_threads.extend(args);
    let b = run(&with_threads);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_timeshare_guards() {
    let o = run(&["simulate", p(&data("dsbs.json")), "--scheme", "timeshare", "--eps1", "0.5", "--eps2", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["simulate", p(&data("dsbs.json")), "--scheme", "timeshare", "--n-list", "4", "--margin", "0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["simulate", p(&data("dsbs.json")), "--scheme", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_budget_exits_4() {
    let o = run(&["simulate", p(&data("dsbs.json")), "--n-list", "40"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("limit"));
}

#[test]
fn oracle_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("o");
    let o = run(&["oracle", p(&data("dsbs.json")), "--n", "1", "--audit", "--out-dir", p(&od)]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["summary.json", "best_code.json", "frontier_relay.csv", "frontier_receiver.csv"] {
        assert!(od.join(f).exists(), "{f}");
    }
    let code = TwoHopCode::load(&od.join("best_code.json")).unwrap();
    assert_eq!(code.n, 1);
    let fr = std::fs::read_to_string(od.join("frontier_relay.csv")).unwrap();
    assert!(fr.starts_with("type1,type2\n"));
    assert!(!fr.contains("-0\n"));
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(od.join("summary.json")).unwrap()).unwrap();
    assert_eq!(j["audit"]["fail_entries"], 0);
}

#[test]
fn oracle_sample_mode_runs() {
    let o = run(&["oracle", p(&data("dsbs.json")), "--n", "2", "--sample", "20", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["encoder_pairs"], 20);
}
