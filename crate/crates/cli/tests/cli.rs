use std::fs;
use std::process::{Command, Output};

fn umt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umt"))
        .args(args)
        .env_remove("UMT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn build_reports_depth_and_width() {
    let out = stdout(&umt(&["build", "--m", "8", "--n", "1", "--s", "4", "--prop", "2"]));
    assert_eq!(out.lines().next(), Some("depth=2 qubits=12"));
    assert!(out.contains("UMT-CIRCUIT width=12 m=8 n=1 s=4 prop=2"));
}

#[test]
fn build_writes_qasm_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.qasm");
    let out = stdout(&umt(&[
        "build", "--m", "3", "--n", "1", "--format", "qasm", "--observable", "Z", "--output",
        path.to_str().unwrap(),
    ]));
    assert_eq!(out.trim(), "depth=2 qubits=4");
    let qasm = fs::read_to_string(path).unwrap();
    assert!(qasm.starts_with("OPENQASM 2.0;"));
    assert!(qasm.contains("cswap"));
    assert!(qasm.contains("cz"));
}

#[test]
fn too_many_ancillas_is_a_usage_error() {
    let out = umt(&["build", "--m", "8", "--s", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("s = 5"));
    assert_eq!(umt(&["build", "--m", "1"]).status.code(), Some(2));
    assert_eq!(umt(&["build"]).status.code(), Some(2));
}

#[test]
fn tradeoff_table() {
    let out = stdout(&umt(&["tradeoff", "--m", "8", "--n", "2"]));
    let rows: Vec<Vec<usize>> =
        out.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    let prop1: Vec<usize> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(prop1, [14, 8, 6, 4]);
    let prop2: Vec<usize> = rows.iter().map(|r| r[3]).collect();
    assert_eq!(prop2, [7, 4, 3, 2]);
    let qubits2: Vec<usize> = rows.iter().map(|r| r[4]).collect();
    assert_eq!(qubits2, [18, 20, 22, 24]);
}

#[test]
fn tradeoff_shows_layer_restricted_gap() {
    let out = stdout(&umt(&["tradeoff", "--m", "9"]));
    assert!(out.lines().any(|l| l == "3,3,12,3,12,3,4"), "{out}");
}

#[test]
fn ansatz_state_round_trips_through_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let p = path.to_str().unwrap();
    let out = stdout(&umt(&["ansatz-state", "--gamma0", "0.4", "--output", p]));
    assert_eq!(out.trim(), "expectation=0.4528486979");

    let out = stdout(&umt(&["estimate", "--state", p, "--copies", "3", "--mode", "exact", "--oracle"]));
    let diff: f64 = out.lines().find_map(|l| l.strip_prefix("diff=")).unwrap().parse().unwrap();
    assert!(diff < 1e-9, "{out}");
}

#[test]
fn estimate_shots_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let p = path.to_str().unwrap();
    stdout(&umt(&["ansatz-state", "--gamma0", "0.3", "--output", p]));
    let args = ["estimate", "--state", p, "--state", p, "--shots", "500", "--seed", "11", "--format", "csv"];
    let a = stdout(&umt(&args));
    let b = stdout(&umt(&args));
    assert_eq!(a, b);
    assert!(a.contains("m,n,s,proposition,gamma,gamma0,shots,value,variance,seed,value_im"));

    let mut other = args.to_vec();
    other[8] = "12";
    assert_ne!(a, stdout(&umt(&other)));
}

#[test]
fn malformed_state_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"n\": 1, \"rows\": [[1.0]]}").unwrap();
    let out = umt(&["estimate", "--state", path.to_str().unwrap(), "--copies", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let out = umt(&["estimate", "--state", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn vd_exact_recovers_dominant_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("vd.csv");
    let out = stdout(&umt(&["vd", "--gamma", "0.2,0.8", "--output", csv.to_str().unwrap()]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "ideal=0.7547");
    assert_eq!(lines[1], "noisy=0.4528");
    assert_eq!(lines[2], "gamma,s2_h2,s1_h4");
    assert_eq!(lines[3], "0.2,0.7546,0.7546");
    assert_eq!(lines[4], "0.8,0.7546,0.7546");
    let table = fs::read_to_string(csv).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.starts_with("variant,m,n,s,proposition,gamma,gamma0,shots,value,variance,seed\n"));
}

#[test]
fn vd_single_copy_is_the_noisy_value() {
    let out = stdout(&umt(&["vd", "--m", "1", "--s", "1", "--gamma", "0.5"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[2], "gamma,s1_h0");
    assert_eq!(lines[3], "0.5,0.4528");
}

#[test]
fn two_copies_need_one_round() {
    let out = stdout(&umt(&["build", "--m", "2", "--n", "1", "--s", "1", "--prop", "2"]));
    assert!(out.starts_with("depth=1 "));
    let out = stdout(&umt(&["tradeoff", "--m", "2"]));
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn zero_angles_give_the_basis_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    let out = stdout(&umt(&["ansatz-state", "--alpha", "0,0,0,0", "--output", path.to_str().unwrap()]));
    assert_eq!(out.trim(), "expectation=1.000000000");
    assert_eq!(umt(&["ansatz-state", "--alpha", "0,0,0"]).status.code(), Some(2));
}

#[test]
fn estimate_three_random_states_against_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["estimate".to_string()];
    for (k, alpha) in ["0.3,1.1,-0.4,2.0", "1.7,0.2,0.9,-1.3", "-0.6,2.4,0.5,0.8"].iter().enumerate() {
        let path = dir.path().join(format!("r{k}.json"));
        let p = path.to_str().unwrap().to_string();
        stdout(&umt(&["ansatz-state", "--alpha", alpha, "--gamma0", "0.25", "--output", &p]));
        args.extend(["--state".to_string(), p]);
    }
    args.extend(["--oracle", "--seed", "3", "--shots", "20000"].map(String::from));
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = stdout(&umt(&argv));
    let diff: f64 = out.lines().find_map(|l| l.strip_prefix("diff=")).unwrap().parse().unwrap();
    // Two parts of 20000 shots each: 5σ is well under 0.04.
    assert!(diff < 0.04, "{out}");
    assert!(out.lines().any(|l| l.starts_with("oracle=")));
}

#[test]
fn vd_shots_mode_stays_within_three_sigma() {
    let out = stdout(&umt(&["vd", "--mode", "shots", "--shots", "200000", "--seed", "5", "--gamma", "0.2"]));
    let csv: Vec<&str> = out.lines().skip_while(|l| !l.starts_with("variant,")).skip(1).collect();
    assert_eq!(csv.len(), 2);
    for row in csv {
        let f: Vec<&str> = row.split(',').collect();
        let (value, variance): (f64, f64) = (f[8].parse().unwrap(), f[9].parse().unwrap());
        assert!((value - 0.7546).abs() <= 3.0 * variance.sqrt(), "{row}");
    }
}

#[test]
fn seed_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let p = path.to_str().unwrap();
    stdout(&umt(&["ansatz-state", "--gamma0", "0.3", "--output", p]));
    let run = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_umt"))
            .args(["estimate", "--state", p, "--copies", "2", "--shots", "300", "--format", "csv"])
            .env("UMT_SEED", seed)
            .output()
            .unwrap();
        stdout(&out)
    };
    assert_eq!(run("9"), stdout(&umt(&["estimate", "--state", p, "--copies", "2", "--shots", "300", "--format", "csv", "--seed", "9"])));
    assert_ne!(run("9"), run("10"));
}
