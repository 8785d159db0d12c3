use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shotnoise"));
    c.env_remove("SHOTNOISE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn shotnoise")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn bernoulli_ensemble_has_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&["simulate", "--family", "bernoulli", "--lambda", "1000", "--t", "1", "--n", "1000", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# shotnoise "));
    assert!(text.lines().any(|l| l == "sample,value"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1000);
    for r in rows {
        let v: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v >= 0.0);
    }
}

fn rerun_and_replay(args: &[&str], dir: &Path, ext: &str) {
    let a = dir.join(format!("a.{ext}"));
    let b = dir.join(format!("b.{ext}"));
    let c = dir.join(format!("c.{ext}"));
    let with = |p: &Path| {
        let mut v: Vec<&str> = args.to_vec();
        v.extend(["-o", p.to_str().unwrap()]);
        let o = run(&v);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    with(&a);
    with(&b);
    let o = run(&["replay", a.to_str().unwrap(), "-o", c.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (a, b, c) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), std::fs::read(c).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn reruns_and_replays_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    rerun_and_replay(&["simulate", "--family", "gamma", "--lambda", "200", "--t", "0.7", "--n", "50", "--seed", "4"], dir.path(), "csv");
    rerun_and_replay(
        &["simulate", "--process", "ou-ig", "--t-grid", "0.1,0.5,2", "--n", "5", "--seed", "8", "--format", "json"],
        dir.path(),
        "json",
    );
    rerun_and_replay(&["moments", "--family", "beta", "--lambda", "3e3", "--t", "1.3", "--s", "0.2"], dir.path(), "csv");
    rerun_and_replay(&["tails", "--sub", "bp", "--beta", "0.7", "--x", "0.01,0.5"], dir.path(), "csv");
}

#[test]
fn worker_count_does_not_change_output() {
    let base = ["simulate", "--family", "poisson", "--lambda", "500", "--t", "2", "--n", "300", "--seed", "21"];
    let one = run(&[&base[..], &["--workers", "1"]].concat());
    let four = run(&[&base[..], &["--workers", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn seed_env_var_sets_default_seed() {
    let args = ["simulate", "--family", "gamma", "--t", "1", "--n", "3"];
    let env = bin().args(args).env("SHOTNOISE_SEED", "77").output().unwrap();
    let flag = run(&[&args[..], &["--seed", "77"]].concat());
    assert_eq!(env.stdout, flag.stdout);
    assert!(stdout(&env).contains("# seed: 77"));
}

#[test]
fn exact_path_writes_event_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let ev = dir.path().join("ev.csv");
    let o = run(&["simulate", "--family", "exponential", "--lambda", "50", "--t-grid", "0.5,1,3", "--events", ev.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_rows(&stdout(&o)).len(), 3);
    let events = std::fs::read_to_string(ev).unwrap();
    assert_eq!(events.lines().next(), Some("time,amplitude"));
    assert!(events.lines().count() > 50);
}

#[test]
fn ou_beta_simulation_is_rejected() {
    let o = run(&["simulate", "--process", "ou-beta", "--beta", "2", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no exact sampler for BetaProc"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn invalid_parameters_exit_2() {
    assert_eq!(run(&["simulate", "--family", "gamma", "--t", "1", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--t", "1"]).status.code(), Some(2));
    assert_eq!(run(&["tails", "--sub", "bp", "--beta", "1", "--x", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn check_classifications() {
    for (family, extra, want) in [
        ("exponential", &[][..], "deterministic"),
        ("degenerate", &[][..], "deterministic"),
        ("degenerate", &["--scaling", "second-moment"][..], "mean_explodes"),
        ("gamma", &[][..], "levy_ou(GP)"),
        ("ig", &[][..], "levy_ou(IGP)"),
        ("poisson", &[][..], "levy_ou(PP)"),
        ("theorem3", &["--sigma2", "3"][..], "gaussian_diffusion"),
    ] {
        let o = run(&[&["check", "--family", family][..], extra].concat());
        assert!(o.status.success(), "{family}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o).trim(), want, "{family}");
    }
}

#[test]
fn check_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["check", "--family", "chisq", "--table", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("limit"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["data"]["classification"], "levy_ou(GP)");
    assert_eq!(doc["config"]["command"], "check");
}

#[test]
fn gamma_process_tail_at_one() {
    let o = run(&["tails", "--sub", "gp", "--mu", "1", "--sigma2", "1", "--x", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = data_rows(&text)[0];
    let u: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((u - 0.219384).abs() < 1e-6, "{u}");
}

#[test]
fn moments_at_time_zero() {
    for process in ["shot", "ou-gamma", "ou-ig", "gauss-ou"] {
        let o = run(&["moments", "--process", process, "--family", "gamma", "--x0", "2.5", "--t", "0"]);
        assert!(o.status.success(), "{process}");
        let text = stdout(&o);
        let f: Vec<&str> = data_rows(&text)[0].split(',').collect();
        assert_eq!(f[2].parse::<f64>().unwrap(), 2.5, "{process}");
        assert_eq!(f[3].parse::<f64>().unwrap(), 0.0, "{process}");
    }
}

#[test]
fn compare_reports_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"families":["bernoulli","gamma","nope"],"mu":[1,3],"t":[1],"lambda":[100],"n":500}"#).unwrap();
    let out = dir.path().join("o.csv");
    let o = run(&["compare", "--config", cfg.to_str().unwrap(), "--workers", "2", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let header = "family,mu,sigma_tilde2,lambda,t,n,iae_levy,iae_gauss,seed";
    assert!(text.lines().any(|l| l == header));
    let rows: Vec<&str> = text.lines().skip_while(|l| *l != header).skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(text.lines().filter(|l| l.starts_with("# cell")).count(), 2);

    std::fs::write(&cfg, r#"{"families":["nope"],"mu":[1],"t":[1],"lambda":[100],"n":10}"#).unwrap();
    let o = run(&["compare", "--config", cfg.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));

    std::fs::write(&cfg, r#"{"families":["gamma"],"mu":[1],"t":[1],"lambda":[100],"typo":1}"#).unwrap();
    assert_eq!(run(&["compare", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn help_lists_units() {
    for sub in ["simulate", "moments", "check", "tails", "compare", "replay"] {
        let o = run(&[sub, "--help"]);
        assert!(o.status.success());
        let text = stdout(&o);
        let mut blocks: Vec<String> = Vec::new();
        for line in text.lines() {
            if line.trim_start().starts_with('-') {
                blocks.push(String::new());
            }
            if let Some(b) = blocks.last_mut() {
                b.push_str(line);
                b.push('\n');
            }
        }
        for b in blocks {
            let head = b.lines().next().unwrap();
            // Flags without a value or with an enumerated value carry no unit.
            if !head.contains('<') || b.to_lowercase().contains("possible values") {
                continue;
            }
            let has_unit = b.split('[').skip(1).any(|rest| {
                !["default:", "env:", "aliases:", "possible"].iter().any(|p| rest.starts_with(p))
            });
            assert!(has_unit, "{sub}: {b}");
        }
    }
}
