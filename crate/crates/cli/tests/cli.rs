use std::path::Path;
use std::process::{Command, Output};

use qprep_core::circuit::{Circuit, GateKind};
use qprep_core::forking::layout_from_json;

const GAUSSIAN: &str = r#"{"kind":"gaussian","mu":0.0,"sigma":1.0}"#;

fn qprep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprep"))
        .args(args)
        .env_remove("QPREP_MAX_QUBITS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn synth_gaussian_has_seven_rotations() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let qasm = dir.path().join("c.qasm");
    let angles = dir.path().join("a.json");
    let out = qprep(&[
        "synth",
        "--dist",
        GAUSSIAN,
        "-n",
        "3",
        "--window",
        "12",
        "--json",
        json.to_str().unwrap(),
        "--qasm",
        qasm.to_str().unwrap(),
        "--angles",
        angles.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let c = Circuit::from_json(&read(&json)).unwrap();
    assert_eq!(c.len(), 7);
    assert!(c
        .gates()
        .iter()
        .all(|g| matches!(g.kind(), GateKind::Ry(_))));
    assert!(read(&qasm).starts_with("OPENQASM 3.0;"));
    let table: serde_json::Value = serde_json::from_str(&read(&angles)).unwrap();
    assert_eq!(table["n"], 3);
}

#[test]
fn synth_binomial_shape() {
    let out = qprep(&["synth", "--dist", r#"{"kind":"binomial","l":7,"p":0.5}"#]);
    assert_eq!(code(&out), 0);
    let c = Circuit::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let hs = c.gates().iter().filter(|g| g.kind() == GateKind::H).count();
    let rys = c.gates().iter().filter(|g| g.controls().len() == 3).count();
    assert_eq!((c.num_qubits(), hs, rys, c.len()), (4, 3, 8, 11));
}

#[test]
fn fork_writes_layout() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("f.json");
    let out = qprep(&[
        "synth",
        "--dist",
        GAUSSIAN,
        "-n",
        "3",
        "--fork",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = read(&json);
    let layout = layout_from_json(&text).unwrap().unwrap();
    assert_eq!(layout.output_register(), &[0, 1, 3]);
    assert_eq!(Circuit::from_json(&text).unwrap().num_qubits(), 7);

    let out = qprep(&["fork", "--dist", GAUSSIAN, "-n", "4"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["rotation_depth"], 1);
    assert_eq!(report["cswap_count"], 11);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let json = dir.path().join(format!("{tag}.json"));
        let qasm = dir.path().join(format!("{tag}.qasm"));
        let out = qprep(&[
            "synth",
            "--dist",
            r#"{"kind":"laplace","mu":0.2,"b":0.7}"#,
            "-n",
            "6",
            "--zeta-seed",
            "99",
            "--lower",
            "--json",
            json.to_str().unwrap(),
            "--qasm",
            qasm.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        (read(&json), read(&qasm))
    };
    assert_eq!(run("a"), run("b"));
    let verify = || qprep(&["verify", "--dist", GAUSSIAN, "-n", "5", "--zeta-seed", "3"]).stdout;
    assert_eq!(verify(), verify());
}

#[test]
fn verify_examples_pass() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = qprep(&[
        "verify",
        "--dist",
        GAUSSIAN,
        "-n",
        "3",
        "--json",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stderr.is_empty());
    let report: serde_json::Value = serde_json::from_str(&read(&json)).unwrap();
    assert!(report["tvd"].as_f64().unwrap() < 1e-10);
    assert!(read(&csv).starts_with("index,x,prob_circuit,prob_oracle,pdf_delta,abs_err"));

    let laplace = qprep(&[
        "verify",
        "--dist",
        r#"{"kind":"laplace","mu":0.0,"b":1.0}"#,
        "-n",
        "3",
    ]);
    assert_eq!(code(&laplace), 0);

    // A narrow window for a heavy tail still verifies, with a visible wrap error.
    let cauchy = qprep(&[
        "verify",
        "--dist",
        r#"{"kind":"cauchy","x0":0.0,"gamma":1.0}"#,
        "-n",
        "3",
        "--window",
        "4",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&cauchy), 0);
    let report: serde_json::Value = serde_json::from_str(&read(&json)).unwrap();
    assert!(report["wrap_error_estimate"].as_f64().unwrap() > 0.1);

    let binomial = qprep(&["verify", "--dist", r#"{"kind":"binomial","l":7,"p":0.3}"#]);
    assert_eq!(code(&binomial), 0);
    let forked = qprep(&["verify", "--dist", GAUSSIAN, "-n", "4", "--fork"]);
    assert_eq!(code(&forked), 0);
}

#[test]
fn dist_from_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("d.json");
    std::fs::write(&dist, GAUSSIAN).unwrap();
    let out = qprep(&["verify", "--dist", dist.to_str().unwrap(), "-n", "2"]);
    assert_eq!(code(&out), 0);

    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        format!(r#"{{"dist":{GAUSSIAN},"qubits":3,"window":"auto"}}"#),
    )
    .unwrap();
    let out = qprep(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    std::fs::write(&config, r#"{"qubits":3,"windw":12}"#).unwrap();
    let out = qprep(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--dist",
        GAUSSIAN,
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&qprep(&["synth", "-n", "3"])), 2);
    assert_eq!(
        code(&qprep(&[
            "synth",
            "--dist",
            r#"{"kind":"gaussian","mu":0}"#,
            "-n",
            "3"
        ])),
        2
    );
    assert_eq!(
        code(&qprep(&[
            "synth", "--dist", GAUSSIAN, "-n", "3", "--zeta", "0.5"
        ])),
        2
    );
    assert_eq!(
        code(&qprep(&[
            "synth", "--dist", GAUSSIAN, "-n", "3", "--window", "-1"
        ])),
        2
    );
    assert_eq!(code(&qprep(&["bogus"])), 2);
    assert_eq!(
        code(&qprep(&["verify", "--dist", GAUSSIAN, "-n", "5", "--fork"])),
        3
    );
    let limited = Command::new(env!("CARGO_BIN_EXE_qprep"))
        .args(["verify", "--dist", GAUSSIAN, "-n", "6"])
        .env("QPREP_MAX_QUBITS", "5")
        .output()
        .unwrap();
    assert_eq!(code(&limited), 3);
    // A circuit that does not prepare the target fails verification.
    let dir = tempfile::tempdir().unwrap();
    let wrong = dir.path().join("wrong.json");
    std::fs::write(
        &wrong,
        r#"{"version":1,"num_qubits":2,"gates":[{"kind":"h","target":0},{"kind":"h","target":1}]}"#,
    )
    .unwrap();
    let out = qprep(&[
        "verify",
        "--dist",
        GAUSSIAN,
        "-n",
        "2",
        "--circuit",
        wrong.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("FAIL"));
}

#[test]
fn circuit_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let p = json.to_str().unwrap();
    assert_eq!(
        code(&qprep(&[
            "synth", "--dist", GAUSSIAN, "-n", "3", "--fork", "--json", p
        ])),
        0
    );
    assert_eq!(
        code(&qprep(&[
            "verify",
            "--dist",
            GAUSSIAN,
            "-n",
            "3",
            "--circuit",
            p
        ])),
        0
    );
    let out = qprep(&["simulate", "--dist", GAUSSIAN, "-n", "3", "--circuit", p]);
    assert_eq!(code(&out), 0);
    let sim: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(sim["register"], serde_json::json!([0, 1, 3]));
    let total: f64 = sim["probabilities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn sweep_rows() {
    let out = qprep(&[
        "sweep", "--dist", GAUSSIAN, "--window", "12", "--n-min", "2", "--n-max", "10",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 9);
    let field = |r: &csv::StringRecord, k: usize| r[k].parse::<f64>().unwrap();
    for pair in rows.windows(2) {
        assert_eq!(field(&pair[1], 1), field(&pair[0], 1) / 2.0);
    }
    for r in &rows {
        assert!(field(r, 4) < 1e-10);
        assert_eq!(&r[8], "true");
    }
    // dx_n / Dx_n approaches 1 from below until it reaches rounding level.
    let ratios: Vec<f64> = rows.iter().map(|r| field(r, 3) / field(r, 1)).collect();
    assert!(ratios[0] < ratios[1] && ratios[1] < 1.0);
    assert!(ratios.iter().skip(2).all(|q| (q - 1.0).abs() < 1e-12));

    assert_eq!(code(&qprep(&["sweep", "--dist", GAUSSIAN])), 2);
}
