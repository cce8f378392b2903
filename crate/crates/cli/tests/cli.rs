use std::process::{Command, Output};

use serde_json::Value;

fn knotchar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knotchar")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--json", "-"]);
    let o = knotchar(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn norm_of_the_meridian() {
    let o = knotchar(&["norm", "1", "0", "--knot", "fig8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("4"));
    for (p, q) in [(0, 1), (3, 1), (-4, 1), (-7, 2)] {
        let v = json(&["norm", &p.to_string(), &q.to_string()]);
        let want = 2 * ((p + 4 * q) as i64).abs() + 2 * ((p - 4 * q) as i64).abs();
        assert_eq!(v["result"]["norm"]["norm"], want, "({p},{q})");
    }
}

#[test]
fn three_one_surgery_lists_the_points() {
    let o = knotchar(&["surgery", "3", "1", "--knot", "fig8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let plus: Vec<&str> = text
        .lines()
        .filter(|l| l.contains("chi(gamma) = +2") && !l.contains("excluded"))
        .collect();
    assert_eq!(plus.len(), 3, "{text}");
    for x in ["x = 1-sqrt(2),", "x = 1,", "x = 1+sqrt(2),"] {
        assert!(plus.iter().any(|l| l.contains(x)), "{x} missing in {text}");
    }
}

#[test]
fn reports_are_deterministic_and_carry_the_run_config() {
    for args in [&["apoly", "--seed", "5"][..], &["surgery", "0", "1"], &["volcs", "--driver", "circle(1.0, 0.1)"]] {
        let mut a = args.to_vec();
        a.extend(["--json", "-"]);
        let first = knotchar(&a);
        let second = knotchar(&a);
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        let v: Value = serde_json::from_slice(&first.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["preset"], "fig8");
        assert!(v["seed"].is_u64());
        assert_eq!(v["tolerances"]["max_den"], 64);
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn parallel_range_matches_serial() {
    let serial = knotchar(&["surgery", "--range", "2", "--jobs", "1", "--json", "-"]);
    let parallel = knotchar(&["surgery", "--range", "2", "--jobs", "4", "--json", "-"]);
    assert!(serial.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
    let v: Value = serde_json::from_slice(&serial.stdout).unwrap();
    let rows = v["result"]["comparisons"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r["lambda_le_b"] == true));
}

#[test]
fn volcs_at_the_base_point() {
    let v = json(&["volcs", "--driver", "circle(1.0, 0.1)"]);
    let d = &v["result"]["driver"];
    assert_eq!(d["closed"], true);
    assert!((d["vol"].as_f64().unwrap() - 2.029883212819).abs() < 1e-9);
    assert!(d["cs"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(d["rational"]["n"], 1);
}

#[test]
fn volcs_writes_samples() {
    let path = std::env::temp_dir().join(format!("knotchar-samples-{}.csv", std::process::id()));
    let o = knotchar(&["volcs", "--driver", "line(1.3)", "--csv", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("piece,t,m_re"));
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[1], 1.0);
    assert!((last[2] - 1.3).abs() < 1e-12);
}

#[test]
fn tame_symbol_at_a_zero_of_g() {
    let v = json(&["tame", "l", "m - 2", "--at", "2"]);
    let rows = v["result"]["branches"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r["v_f"], 0);
        assert_eq!(r["v_g"], 1);
    }
    // T = l(2) on each sheet, and the two sheets are swapped by l -> 1/l
    let t: Vec<f64> = rows.iter().map(|r| r["tame_symbol"][0].as_f64().unwrap()).collect();
    assert!((t[0] * t[1] - 1.0).abs() < 1e-9, "{t:?}");
}

fn error_of(o: &Output) -> Value {
    let line = String::from_utf8_lossy(&o.stderr).lines().last().unwrap_or("").to_string();
    serde_json::from_str(&line).unwrap_or_else(|e| panic!("{e}: {line}"))
}

#[test]
fn exit_codes() {
    let o = knotchar(&["charvar", "--knot", "no-such-knot"]);
    assert_eq!(o.status.code(), Some(3));
    let e = error_of(&o);
    assert_eq!(e["schema"], 1);
    assert_eq!(e["error"]["kind"], "input");

    let o = knotchar(&["surgery", "2", "4"]);
    assert_eq!(o.status.code(), Some(3));

    let o = knotchar(&["apoly", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(3));

    // straight into the branch point m = golden ratio
    let o = knotchar(&["volcs", "--driver", "line(1.618033988749895)"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_of(&o)["error"]["kind"], "numeric");
}

#[test]
fn verify_passes_on_the_presets() {
    for knot in ["fig8", "trefoil"] {
        let o = knotchar(&["verify", "--knot", knot]);
        let text = stdout(&o);
        assert!(o.status.success(), "{text}");
        assert_eq!(text.lines().count(), 11);
        assert!(!text.contains("[FAIL]"));
    }
}
