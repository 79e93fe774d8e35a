use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cornermhd_cli::config::parse_config;

fn write_cfg(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cornermhd"))
        .arg(cmd)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// All files of a directory, sorted by name.
fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn symmetrizer_table_has_one_row_per_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "c.cfg", "command = check-symmetrizer\nseed = 7\n");
    let out = tmp.path().join("out");
    let o = run("check-symmetrizer", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("symmetrizer.csv")).unwrap();
    let mut lines = csv.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# cornermhd check-symmetrizer config="), "{head}");
    assert!(head.contains("grid="));
    assert!(lines.next().unwrap().starts_with("sample,"));
    assert_eq!(lines.count(), 1000);
}

#[test]
fn every_output_starts_with_the_provenance_header() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "c.cfg",
        "command = run-picard\n[grid]\nn = 24\n[time]\nT = 0.05\n",
    );
    let out = tmp.path().join("out");
    let o = run("run-picard", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let all = files(&out);
    for name in ["run.echo.cfg", "picard.csv", "constraints.csv", "field_u1.txt"] {
        assert!(all.iter().any(|(n, _)| n == name), "missing {name}");
    }
    for (name, bytes) in &all {
        let text = String::from_utf8_lossy(bytes);
        assert!(text.starts_with("# cornermhd run-picard config="), "{name}");
    }
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("norm-study", "command = norm-study\nseed = 3\n[grid]\nrefinements = 16, 32, 48\n[norms]\nfields = 4\n"),
        ("elliptic-suite", "command = elliptic-suite\n[grid]\nrefinements = 16, 32, 64\n"),
        ("run-linear", "command = run-linear\n[grid]\nn = 16\nrefinements = 16, 24, 32\n[time]\nT = 0.05\n"),
    ];
    for (cmd, text) in cases {
        let cfg = write_cfg(tmp.path(), &format!("{cmd}.cfg"), text);
        let a = tmp.path().join(format!("{cmd}-1"));
        let b = tmp.path().join(format!("{cmd}-3"));
        let oa = run(cmd, &cfg, &a, &["--jobs", "1"]);
        let ob = run(cmd, &cfg, &b, &["--jobs", "3"]);
        assert_eq!(oa.status.code(), Some(0), "{cmd}: {}", stderr(&oa));
        assert_eq!(ob.status.code(), Some(0), "{cmd}: {}", stderr(&ob));
        let (fa, fb) = (files(&a), files(&b));
        assert_eq!(fa.len(), fb.len());
        for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
            assert_eq!(na, nb);
            if na == "run.echo.cfg" {
                continue; // names the output directory
            }
            assert!(ba == bb, "{cmd}: {na} differs between worker counts");
        }
    }
}

#[test]
fn seed_flag_overrides_and_changes_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "c.cfg", "command = check-symmetrizer\n[data]\nsamples = 10\n");
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(run("check-symmetrizer", &cfg, &a, &["--seed", "1"]).status.code(), Some(0));
    assert_eq!(run("check-symmetrizer", &cfg, &b, &["--seed", "1"]).status.code(), Some(0));
    assert_eq!(run("check-symmetrizer", &cfg, &c, &["--seed", "2"]).status.code(), Some(0));
    let read = |d: &Path| fs::read(d.join("symmetrizer.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn divergent_scan_reports_the_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "c.cfg",
        "command = singularity-scan\n[domain]\nkind = sector\nomega = 2*pi/5\n[singularity]\ns = 3\nfit = false\nexpect = divergent\n",
    );
    let out = tmp.path().join("out");
    let o = run("singularity-scan", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let scan = fs::read_to_string(out.join("scan.csv")).unwrap();
    assert!(scan.lines().any(|l| l.ends_with(",divergent")), "{scan}");
}

#[test]
fn failed_expectation_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "c.cfg",
        "command = singularity-scan\n[domain]\nkind = sector\nomega = 2*pi/5\n[grid]\nrefinements = 16, 32, 64\n[singularity]\ns = 2\nfit = false\nexpect = divergent\n",
    );
    let o = run("singularity-scan", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn incompatible_data_names_order_and_magnitude() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "c.cfg",
        "command = run-picard\n[grid]\nn = 32\n[data]\ngenerator = constant-flow\namplitude = 0.1\n",
    );
    let o = run("run-picard", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("compatibility order 0"), "{e}");
    assert!(e.contains("1.000e-1"), "{e}");
}

#[test]
fn config_errors_exit_two_with_line_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        ("command = elliptic-suite\n[domain]\nkind = sector\nomega = 3.5\n", "line 4"),
        ("command = run-linear\n[grid]\nn = 32\nn = 64\n", "lines 3 and 4"),
        ("command = run-linear\n[grid]\nnn = 32\n", "unknown key `grid.nn`"),
        ("command = run-linear\n[time]\ncfl = fast\n", "line 3"),
        ("command = norm-study\n", "seed"),
    ];
    for (k, (text, needle)) in cases.iter().enumerate() {
        let cfg = write_cfg(tmp.path(), &format!("c{k}.cfg"), text);
        let cmd = text.lines().next().unwrap().trim_start_matches("command = ");
        let o = run(cmd, &cfg, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(needle), "{text}: {}", stderr(&o));
    }
    let missing = run("run-linear", &tmp.path().join("absent.cfg"), &out, &[]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn numerical_breakdown_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "c.cfg", "command = run-picard\n[grid]\nn = 32\n[data]\namplitude = 2\n");
    let o = run("run-picard", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn echo_reparses_to_the_same_configuration() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "c.cfg",
        "command = elliptic-suite\n[domain]\nkind = sector\nomega = 2*pi/5\n[grid]\nrefinements = 16, 32, 64\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(run("elliptic-suite", &cfg, &out, &[]).status.code(), Some(0));
    let echo = fs::read_to_string(out.join("run.echo.cfg")).unwrap();
    let original = parse_config(&fs::read_to_string(&cfg).unwrap()).unwrap();
    let reparsed = parse_config(&echo).unwrap();
    assert_eq!(original.hash(), reparsed.hash());
    assert!(echo.contains(&format!("config={}", original.hash())));
}
