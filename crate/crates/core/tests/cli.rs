use serde_json::Value;
use tempfile::tempdir;

use percolab::cli;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = cli::run(std::iter::once("percolab").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn analytic_examples() {
    let (code, out) = run(&["analytic", "--dist", "regular:3"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["p_hat"], 0.5);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);

    let (code, out) = run(&["analytic", "--dist", "table:1=0.5,3=0.5"]);
    assert_eq!(code, 0);
    assert!((json(&out)["p_hat"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);

    let (code, out) = run(&["analytic", "--dist", "powerlaw:3.3"]);
    assert_eq!(code, 0);
    let pl = &json(&out)["power_law"];
    assert_eq!(pl["valid"], true);
    assert!(pl["zeta_ratio"].as_f64().unwrap() > 0.5);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["analytic", "--dist", "powerlaw:2.5"]).0, 3);

    assert_eq!(run(&["analytic", "--dist", "table:1=0.5,3=0.6"]).0, 2);
    assert_eq!(run(&["analytic"]).0, 2);
    assert_eq!(run(&["sweep", "--dist", "regular:3", "--n", "100"]).0, 2);
    assert_eq!(run(&["analytic", "--config", "/nonexistent/config.json"]).0, 2);

    let dir = tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let out_dir = blocker.join("sub");
    let (code, _) = run(&[
        "sweep", "--dist", "regular:3", "--n", "100", "--p-grid", "0.5", "--trials", "2",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 4);

    // a perfect matching never grows a component beyond two vertices
    let (code, out) = run(&["threshold", "--dist", "regular:1", "--n", "1000", "--trials", "2"]);
    assert_eq!(code, 5, "{out}");

    let (code, out) = run(&["validate", "--quick"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("6 of 6 checks passed"));
}

#[test]
fn sweep_endpoints_and_kinds() {
    let n = 1000;
    let (code, bond) = run(&[
        "sweep", "--dist", "regular:3", "--n", "1000", "--p-grid", "0,1", "--trials", "5",
        "--seed", "4", "--kind", "bond",
    ]);
    assert_eq!(code, 0);
    let (code, site) = run(&[
        "sweep", "--dist", "regular:3", "--n", "1000", "--p-grid", "0,1", "--trials", "5",
        "--seed", "4", "--kind", "site",
    ]);
    assert_eq!(code, 0);

    let rows = |csv: &str| -> Vec<Vec<f64>> {
        csv.lines()
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect()
    };
    let (b, s) = (rows(&bond), rows(&site));
    assert_eq!(bond.lines().next().unwrap(), "p,trials,mean_l1_frac,sd_l1_frac,mean_l2_frac");
    assert_eq!(b.len(), 2);
    assert!((b[0][2] - 1.0 / n as f64).abs() < 1e-15);
    assert!((s[0][2] - 1.0 / n as f64).abs() < 1e-15);
    assert!(b[1][2] > 0.9);
    assert_eq!(b[1][2], s[1][2]);
    assert_eq!(b[1][3], s[1][3]);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"dist":{"kind":"table","weights":{"1":0.5,"3":0.5}},"n":500,"p_grid":[0.5],"trials":3}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let (code, a) = run(&["analytic", "--config", cfg]);
    assert_eq!(code, 0);
    let (_, b) = run(&["analytic", "--config", cfg, "--dist", "regular:4"]);
    assert_ne!(json(&a)["config_hash"], json(&b)["config_hash"]);
    assert!((json(&b)["p_hat"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);

    std::fs::write(&path, r#"{"n":500,"unknown":1}"#).unwrap();
    assert_eq!(run(&["analytic", "--config", cfg]).0, 2);
}

#[test]
fn generate_writes_edge_list() {
    let (code, out) = run(&["generate", "--dist", "regular:3", "--n", "10", "--seed", "2"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "# n=10 m=15");
    let mut degree = [0usize; 10];
    for l in lines {
        let mut it = l.split(' ').map(|x| x.parse::<usize>().unwrap());
        degree[it.next().unwrap()] += 1;
        degree[it.next().unwrap()] += 1;
    }
    assert!(degree.iter().all(|&d| d == 3));

    let dir = tempdir().unwrap();
    let file = dir.path().join("g.txt");
    let (code, _) = run(&[
        "generate", "--dist", "regular:3", "--n", "10", "--seed", "2", "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&file).unwrap(), out);
}

#[test]
fn threshold_writes_trace() {
    let dir = tempdir().unwrap();
    let (code, out) = run(&[
        "threshold", "--dist", "regular:3", "--n", "5000", "--trials", "10", "--seed", "1",
        "--tolerance", "0.05", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&std::fs::read_to_string(dir.path().join("threshold.json")).unwrap());
    assert!(v["trace"].as_array().unwrap().len() >= 3);
    assert_eq!(v["analytic_p_hat"], 0.5);
    assert!((v["estimate"].as_f64().unwrap() - 0.5).abs() <= 0.1);
}
