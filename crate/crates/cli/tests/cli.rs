use std::process::{Command, Output};

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("run qwalk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and data rows of a CSV table, metadata skipped.
fn table(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn num(s: &str) -> f64 {
    if s == "inf" {
        f64::INFINITY
    } else {
        s.parse().unwrap()
    }
}

#[test]
fn evolve_hadamard_rows() {
    let o = qwalk(&[
        "evolve",
        "--coin",
        "hadamard",
        "--init-eta",
        "0",
        "--steps",
        "3",
        "--record-every",
        "1",
    ]);
    assert!(o.status.success());
    let (h, rows) = table(&o);
    assert_eq!(h, ["tau", "mean", "variance", "shannon_entropy"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][col(&h, "variance")], "2");
}

#[test]
fn evolve_identity_is_ballistic() {
    let o = qwalk(&[
        "evolve", "--coin", "identity", "--init", "+;0", "--steps", "10",
    ]);
    let (h, rows) = table(&o);
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[col(&h, "variance")] == "0"));
}

#[test]
fn missing_steps_is_a_usage_error() {
    let o = qwalk(&["evolve", "--coin", "hadamard"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("steps"));
}

#[test]
fn bad_flags_are_usage_errors() {
    for args in [
        vec!["evolve", "--coin", "grover", "--steps", "3"],
        vec!["evolve", "--coin", "param:0,0,2", "--steps", "3"],
        vec!["quantumness", "--tau", "5", "--channel", "unital-decay"],
        vec!["quantumness", "--tau", "5", "--sweep", "q:0:1:1"],
        vec!["transport", "--tau", "5"],
    ] {
        assert_eq!(qwalk(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn quantumness_sweep_shape() {
    let run = |coin: &str| {
        qwalk(&[
            "quantumness",
            "--sweep",
            "q:0:1:3",
            "--channel",
            "unital-decay",
            "--tau",
            "100",
            "--coin",
            coin,
            "--init",
            "+;0",
        ])
    };
    let h_out = run("hadamard");
    assert!(h_out.status.success());
    let text = stdout(&h_out);
    assert!(text.starts_with("# tool=qwalk\n# version="));
    assert!(text.contains("# classical_mode=optimal"));
    let (h, rows) = table(&h_out);
    assert_eq!(
        h,
        [
            "q",
            "Q",
            "C",
            "total_Q",
            "p_plus_star",
            "upper_bound_half",
            "variance",
            "mean",
            "diagnostics"
        ]
    );
    let (q, c, t) = (col(&h, "Q"), col(&h, "C"), col(&h, "total_Q"));
    let first = &rows[0];
    assert!(num(&first[c]) > 0.0);
    assert!((num(&first[t]) - num(&first[q]) - num(&first[c])).abs() < 1e-9);
    let hadamard_q1 = num(&rows[2][q]);
    assert!(hadamard_q1 < 1e-9);

    let (_, rows) = table(&run("param:0,0,1"));
    assert!(num(&rows[2][q]) > hadamard_q1 + 0.1);
}

#[test]
fn contraction_sweep_is_classical() {
    let o = qwalk(&[
        "quantumness",
        "--sweep",
        "q:0:1:5",
        "--channel",
        "contraction",
        "--tau",
        "20",
        "--coin",
        "identity",
    ]);
    let (h, rows) = table(&o);
    for r in &rows {
        for name in ["Q", "C", "total_Q"] {
            assert!(num(&r[col(&h, name)]) < 1e-9);
        }
    }
}

#[test]
fn loop_rows_satisfy_the_identity() {
    let o = qwalk(&[
        "quantumness",
        "--tau",
        "12",
        "--coin",
        "param:0,0,1",
        "--init",
        "0.5;0",
        "--loop",
        "6",
        "--sink-site",
        "2",
        "--sink-r",
        "0.7",
        "--channel",
        "depolarizing",
        "--sweep",
        "q:0:1:3",
    ]);
    assert!(o.status.success());
    let (h, rows) = table(&o);
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let (q, c, t) = (
            num(&r[col(&h, "Q")]),
            num(&r[col(&h, "C")]),
            num(&r[col(&h, "total_Q")]),
        );
        assert!(q.is_finite() && q >= 0.0 && c >= 0.0);
        assert!((t - q - c).abs() < 1e-9);
    }
}

#[test]
fn transport_rows_satisfy_the_chain() {
    let o = qwalk(&[
        "transport",
        "--loop",
        "9",
        "--sink-site",
        "3",
        "--sink-r",
        "1",
        "--coin",
        "param:0,0,1",
        "--init",
        "+;0",
        "--channel",
        "unital-decay",
        "--sweep",
        "q:0:1:3",
        "--tau",
        "60",
    ]);
    assert!(o.status.success());
    let (h, rows) = table(&o);
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let (total, q, u) = (
            num(&r[col(&h, "total_Q")]),
            num(&r[col(&h, "Q")]),
            num(&r[col(&h, "u")]),
        );
        assert!(total >= q - 1e-9 && q >= u - 1e-9 && u >= -1e-9);
        assert_eq!(r[col(&h, "classical_mode")], "optimal");
    }
    let mid = &rows[1];
    assert!(num(&mid[col(&h, "deviation")]) > 0.0 && num(&mid[col(&h, "Q")]) > 0.0);
}

#[test]
fn transport_without_leak_has_no_deviation() {
    let o = qwalk(&[
        "transport",
        "--loop",
        "9",
        "--sink-site",
        "3",
        "--sink-r",
        "0",
        "--channel",
        "unital-decay",
        "--q",
        "0.5",
        "--tau",
        "30",
        "--record-every",
        "5",
    ]);
    let (h, rows) = table(&o);
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r[col(&h, "deviation")], "0");
        assert_eq!(r[col(&h, "u")], "0");
    }
}

#[test]
fn transport_fixed_mode_is_recorded() {
    let o = qwalk(&[
        "transport",
        "--loop",
        "5",
        "--sink-site",
        "2",
        "--sink-r",
        "0.5",
        "--tau",
        "10",
        "--classical-mode",
        "fixed:0.3",
        "--format",
        "jsonl",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let head: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(head["metadata"]["classical_mode"], "fixed:0.3");
    let row: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(row["classical_p_plus"], 0.3);
}

#[test]
fn oracle_check_cases() {
    let o = qwalk(&["oracle-check", "--coin", "hadamard", "--max-tau", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let o = qwalk(&["oracle-check", "--coin", "identity"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("skipped"));
    let a = qwalk(&[
        "oracle-check",
        "--random-coins",
        "50",
        "--max-tau",
        "20",
        "--seed",
        "7",
    ]);
    let b = qwalk(&[
        "oracle-check",
        "--random-coins",
        "50",
        "--max-tau",
        "20",
        "--seed",
        "7",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_is_deterministic_across_threads() {
    let args = |threads: &'static str| {
        vec![
            "quantumness",
            "--sweep",
            "q:0:1:9",
            "--sweep",
            "tau:10:20:3",
            "--channel",
            "depolarizing",
            "--coin",
            "param:0.3,0.2,0.9",
            "--init",
            "0.4;1",
            "--threads",
            threads,
        ]
    };
    let a = qwalk(&args("1"));
    let b = qwalk(&args("4"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (_, rows) = table(&a);
    assert_eq!(rows.len(), 27);
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = qwalk(&["evolve", "--steps", "4", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("tau,mean,variance,shannon_entropy"));
}

#[test]
fn probabilities_and_entropies_are_in_range() {
    let o = qwalk(&[
        "quantumness",
        "--sweep",
        "q:0:1:6",
        "--channel",
        "amplitude-damping",
        "--tau",
        "30",
    ]);
    let (h, rows) = table(&o);
    for r in &rows {
        let p = num(&r[col(&h, "p_plus_star")]);
        assert!((0.0..=1.0).contains(&p));
        for name in ["Q", "C", "total_Q", "upper_bound_half"] {
            assert!(num(&r[col(&h, name)]) >= 0.0, "{name} in {r:?}");
        }
    }
}
