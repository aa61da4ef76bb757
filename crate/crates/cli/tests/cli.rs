use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn scldpc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scldpc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SCLDPC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(args: &[&str], out: &Path) -> String {
    let o = scldpc(args, out);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

#[test]
fn optimize_gamma4_kappa7() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        &[
            "optimize", "--gamma", "4", "--kappa", "7", "--m", "1", "--L", "30",
        ],
        dir.path(),
    );
    assert!(text.contains("F* = 4680"), "{text}");
    let csv = fs::read_to_string(dir.path().join("optimum.csv")).unwrap();
    assert!(csv.starts_with("parameter,value\nt{0},"));
    assert!(csv.contains("f_star,4680\n"));
    let part = fs::read_to_string(dir.path().join("partition.txt")).unwrap();
    assert_eq!(part.lines().count(), 4);
}

#[test]
fn missing_kappa_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = scldpc(
        &["optimize", "--gamma", "3", "--m", "1", "--L", "30"],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing --kappa"));
}

#[test]
fn census_cutting_vector_and_uncoupled() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        &[
            "census", "--gamma", "3", "--kappa", "17", "--L", "30", "--zeta", "4,9,13",
        ],
        dir.path(),
    );
    assert!(text.contains("lifted cycles-6: 59024"), "{text}");
    let csv = fs::read_to_string(dir.path().join("census.csv")).unwrap();
    assert!(csv.contains("lifted,total,,,59024"));
    let text = ok(
        &[
            "census", "--gamma", "3", "--kappa", "17", "--m", "0", "--L", "30",
        ],
        dir.path(),
    );
    assert!(text.contains("lifted cycles-6: 138720"), "{text}");
}

#[test]
fn unit_circulants_lift_to_the_protograph() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        &[
            "census", "--gamma", "3", "--kappa", "5", "--p", "1", "--L", "4", "--zeta", "1,2,4",
        ],
        dir.path(),
    );
    let nums: Vec<&str> = text.lines().filter_map(|l| l.split(": ").nth(1)).collect();
    assert_eq!(nums[0], nums[1], "{text}");
}

#[test]
fn cpo_needs_seed_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "cpo", "--gamma", "3", "--kappa", "7", "--L", "6", "--zeta", "2,4,6",
    ];
    assert!(!scldpc(&base, dir.path()).status.success());

    let mut args = base.to_vec();
    args.extend(["--seed", "3", "--stale", "2"]);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(&args, a.path());
    ok(&args, b.path());
    for f in ["powers.txt", "trace.csv", "partition.txt"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }

    args.extend(["--target", "1000000"]);
    ok(&args, dir.path());
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(
        trace,
        "round,cells,powers,f_sc_before,f_sc_after,accepted\n"
    );
}

#[test]
fn pipeline_reports_match_exported_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        &[
            "pipeline", "--gamma", "3", "--kappa", "5", "--m", "1", "--L", "4", "--seed", "1",
        ],
        dir.path(),
    );
    let lifted: u64 = text
        .lines()
        .find_map(|l| l.strip_prefix("lifted cycles-6: "))
        .unwrap()
        .parse()
        .unwrap();
    let alist = dir.path().join("h_sc.alist");
    let head = fs::read_to_string(&alist).unwrap();
    assert!(head.starts_with("100 75\n3 "), "{}", &head[..20]);
    let audit = ok(&["census", "--matrix", alist.to_str().unwrap()], dir.path());
    assert!(
        audit.contains(&format!("0 cycles-4, {lifted} cycles-6")),
        "{audit} vs {lifted}"
    );
}

#[test]
fn config_file_flags_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[code]\ngamma = 3\nkappa = 17\nL = 30\n\n[partition]\nzeta = [[4, 9, 13]]\n\n[output]\ndir = \"from-file\"\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_scldpc"))
        .args(["census", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(stdout(&o).contains("lifted cycles-6: 59024"));
    assert!(dir.path().join("from-file/census.csv").exists());

    // flags override the file
    let o = Command::new(env!("CARGO_BIN_EXE_scldpc"))
        .args([
            "census",
            "--config",
            cfg.to_str().unwrap(),
            "--zeta",
            "3,7,11",
        ])
        .arg("--out")
        .arg(dir.path().join("flag"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(!stdout(&o).contains("59024"));
    assert!(dir.path().join("flag/census.csv").exists());

    // env var supplies the default output directory
    let env_dir = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_scldpc"))
        .args([
            "export", "--gamma", "3", "--kappa", "5", "--L", "3", "--zeta", "1,2,4",
        ])
        .env("SCLDPC_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    for f in ["h_sc_protograph.alist", "partition.txt", "powers.txt"] {
        assert!(env_dir.join(f).exists(), "{f}");
    }
}

#[test]
fn malformed_matrix_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.alist");
    fs::write(&bad, "2 2\n1 1\n1 1\n").unwrap();
    let o = scldpc(&["census", "--matrix", bad.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
}
