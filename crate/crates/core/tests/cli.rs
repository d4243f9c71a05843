use std::process::{Command, Output};

fn negcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negcurv"))
        .args(args)
        .env_remove("NEGCURV_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_prints_record() {
    let out = negcurv(&[
        "solve",
        "--problem",
        "rosenbr:2",
        "--algo",
        "an2e",
        "--trace",
        "summary",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = json(&out);
    assert_eq!(r["status"], "first_order");
    assert_eq!(r["algo"], "an2e");
    assert_eq!(r["problem"], "rosenbr:2");
    assert!(r["grad_norm_final"].as_f64().unwrap() <= 1e-6);
    assert!(r["trace"].as_array().unwrap().len() <= 2);
    for key in [
        "f_evals",
        "g_evals",
        "H_evals",
        "factorizations",
        "eigen_solves",
    ] {
        assert!(r["counters"][key].is_u64(), "{key}");
    }
}

#[test]
fn solve_exit_codes() {
    let out = negcurv(&["solve", "--problem", "rosenbr:10", "--max-iter", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "max_iter");

    assert_eq!(
        negcurv(&["solve", "--problem", "nosuch"]).status.code(),
        Some(1)
    );
    assert_eq!(
        negcurv(&["solve", "--problem", "rosenbr", "--algo", "bfgs"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        negcurv(&["solve", "--problem", "rosenbr", "--eta1", "0.99"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(negcurv(&["--help"]).status.code(), Some(0));
}

#[test]
fn saddle_escape_is_unbounded() {
    let out = negcurv(&[
        "solve",
        "--problem",
        "saddle4",
        "--algo",
        "soan2c",
        "--max-iter",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["status"], "max_iter");
    let trace = r["trace"].as_array().unwrap();
    assert_eq!(trace[0]["step_tag"], "so");
    assert_eq!(trace[0]["grad_norm"], 0.0);
    let f: Vec<f64> = trace.iter().map(|t| t["f"].as_f64().unwrap()).collect();
    assert!(f.windows(2).all(|w| w[1] < w[0]), "{f:?}");
}

#[test]
fn random_start_is_seeded() {
    let run = |seed: &str| {
        json(&negcurv(&[
            "solve",
            "--problem",
            "woods",
            "--random-start",
            "--seed",
            seed,
            "--trace",
            "none",
        ]))
    };
    let (a, b, c) = (run("3"), run("3"), run("4"));
    assert_eq!(a["x_final"], b["x_final"]);
    assert_eq!(a["iterations"], b["iterations"]);
    assert_ne!(a["trace"], serde_json::Value::Null);
    assert!(a["iterations"] != c["iterations"] || a["x_final"] != c["x_final"]);
}

#[test]
fn list_problems() {
    let out = negcurv(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let entries = json(&out);
    let names: Vec<&str> = entries
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    for name in ["rosenbr", "woods", "curly10", "saddle2", "badgrad-fixture"] {
        assert!(names.contains(&name), "{name}");
    }
    assert!(
        entries
            .as_array()
            .unwrap()
            .iter()
            .filter(|e| e["in_suite"] == true)
            .count()
            >= 15
    );
}

#[test]
fn check_flags_bad_derivatives() {
    let out = negcurv(&["check", "--problem", "rosenbr:4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ok"], true);

    let out = negcurv(&["check", "--problem", "badgrad-fixture"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["ok"], false);
    assert!(json(&out)["max_rel_grad_err"].as_f64().unwrap() > 1e-3);

    assert_eq!(
        negcurv(&["check", "--problem", "rosenbr", "--h", "-1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(negcurv(&["check"]).status.code(), Some(1));
}

#[test]
fn bench_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("problems.txt");
    std::fs::write(
        &list,
        "# three problems\nrosenbr:2\nwoods\n\ndiagquad:10  # convex\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = negcurv(&[
        "bench",
        "--suite",
        "custom-file",
        list.to_str().unwrap(),
        "--algos",
        "an2c,ar2",
        "--workers",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("an2c") && table.contains("ar2"), "{table}");

    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 2 * 3, "{results}");
    assert!(results.lines().nth(1).unwrap().starts_with("an2c,"));
    for algo in ["an2c", "ar2"] {
        let profile = std::fs::read_to_string(out_dir.join(format!("profile_{algo}.csv"))).unwrap();
        assert!(profile.lines().count() >= 2);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["problems"], 3);
    assert_eq!(summary["algos"].as_array().unwrap().len(), 2);
}

#[test]
fn bench_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = Vec::new();
    for workers in ["1", "3"] {
        let out_dir = dir.path().join(workers);
        let out = Command::new(env!("CARGO_BIN_EXE_negcurv"))
            .args([
                "bench",
                "--suite",
                "small",
                "--algos",
                "an2c,an2e",
                "--workers",
                workers,
            ])
            .env("NEGCURV_OUT_DIR", &out_dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        csv.push(std::fs::read_to_string(out_dir.join("results.csv")).unwrap());
    }
    assert_eq!(csv[0], csv[1]);
}

#[test]
fn bench_rejects_bad_suite() {
    assert_eq!(
        negcurv(&["bench", "--suite", "huge"]).status.code(),
        Some(1)
    );
    assert_eq!(
        negcurv(&["bench", "--suite", "custom-file", "/nonexistent/list"])
            .status
            .code(),
        Some(1)
    );
}
