use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMOKE: [&str; 12] = [
    "--side",
    "100",
    "--realizations",
    "2",
    "--grid-points",
    "100",
    "--base-seed",
    "7",
    "--workers",
    "1",
    "--quiet",
    "--kind=binary",
];

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_landscape-idos"));
    cmd.env_remove("LANDSCAPE_IDOS_WORKERS");
    cmd
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--output-dir").arg(out).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&bin().arg("frobnicate").output().unwrap()), 1);
    assert_eq!(code(&bin().args(["run", "--no-such-flag"]).output().unwrap()), 1);
    assert_eq!(code(&bin().arg("--help").output().unwrap()), 0);
}

#[test]
fn bad_config_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "dimension = 1\nside = -5\n").unwrap();
    let o = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn bad_flag_value_names_the_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["run", "--vmax=-1"], tmp.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--vmax"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let o = bin()
        .args(["run", "--config", "/nonexistent/run.cfg"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn unwritable_output_dir_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = run(&[&["run"], &SMOKE[..]].concat(), &blocker.join("out"));
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn fitting_all_zero_curves_is_a_numerical_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from("energy,n_mean,n_std,nu_mean,nu_std\n");
    for k in 0..20 {
        text.push_str(&format!("{:?},0.0,0.0,0.0,0.0\n", 0.01 * 1.3f64.powi(k)));
    }
    let curves = tmp.path().join("zeros.csv");
    fs::write(&curves, text).unwrap();
    let o = bin()
        .args(["fit", "--curves"])
        .arg(&curves)
        .arg("--output-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn run_then_post_process_stored_curves() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[&["run"], &SMOKE[..]].concat(), tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in [
        "curves.csv",
        "constants.csv",
        "scaling.csv",
        "ratio.csv",
        "curves.svg",
        "manifest.txt",
    ] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let constants = fs::read(tmp.path().join("constants.csv")).unwrap();
    let scaling = fs::read(tmp.path().join("scaling.csv")).unwrap();
    let ratio = fs::read(tmp.path().join("ratio.csv")).unwrap();
    for sub in ["fit", "scaling", "ratio"] {
        let o = run(&[&[sub][..], &SMOKE[..]].concat(), tmp.path());
        assert!(o.status.success(), "{sub}: {}", stderr(&o));
    }
    assert_eq!(fs::read(tmp.path().join("constants.csv")).unwrap(), constants);
    assert_eq!(fs::read(tmp.path().join("scaling.csv")).unwrap(), scaling);
    assert_eq!(fs::read(tmp.path().join("ratio.csv")).unwrap(), ratio);
}

#[test]
fn separate_curves_feed_the_fit() {
    let full = tempfile::tempdir().unwrap();
    assert!(run(&[&["run"], &SMOKE[..]].concat(), full.path()).status.success());

    let split = tempfile::tempdir().unwrap();
    for sub in ["idos", "nu"] {
        let o = run(&[&[sub][..], &SMOKE[..]].concat(), split.path());
        assert!(o.status.success(), "{sub}: {}", stderr(&o));
    }
    let o = bin()
        .args(["fit", "--idos"])
        .arg(split.path().join("idos.csv"))
        .arg("--nu")
        .arg(split.path().join("nu.csv"))
        .args(SMOKE)
        .arg("--output-dir")
        .arg(split.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(split.path().join("constants.csv")).unwrap(),
        fs::read(full.path().join("constants.csv")).unwrap()
    );
}

#[test]
fn landscape_subcommand_writes_one_row_per_site() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &[&["landscape"], &SMOKE[..], &["--realization", "1"]].concat(),
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("landscape.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("site,potential,u,w"));
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn worker_count_from_environment_or_flag_gives_identical_curves() {
    let args = [
        "run",
        "--side",
        "100",
        "--realizations",
        "4",
        "--grid-points",
        "60",
        "--quiet",
    ];
    let by_env = tempfile::tempdir().unwrap();
    let o = bin()
        .env("LANDSCAPE_IDOS_WORKERS", "3")
        .args(args)
        .arg("--output-dir")
        .arg(by_env.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let by_flag = tempfile::tempdir().unwrap();
    let o = run(&[&args[..], &["--workers", "1"]].concat(), by_flag.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(by_env.path().join("curves.csv")).unwrap(),
        fs::read(by_flag.path().join("curves.csv")).unwrap()
    );
}
