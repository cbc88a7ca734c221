use std::path::Path;
use std::process::{Command, Output};

fn lq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lbm-quartic"))
        .args(args)
        .env_remove("LBM_QUARTIC_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn params_prints_seventeen_digits() {
    let o = lq(&["params", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("name,value\n"));
    assert!(text.contains("s_phi,0.37925445705024311\n"), "{text}");

    let json: serde_json::Value = serde_json::from_str(&stdout(&lq(&["params"]))).unwrap();
    assert_eq!(json["equilibrium"]["c0"].as_f64(), Some(0.623538));
}

#[test]
fn singular_inputs_exit_two_naming_the_field() {
    let o = lq(&["params", "--sigma-e", "0.5", "--sigma-x", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigma-x"), "{}", stderr(&o));

    let o = lq(&["params", "--digits", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("digits"));

    let o = lq(&["spectra", "--direction", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("direction"));

    let o = lq(&["params", "--usual", "--sigma-e", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigma-e"));
}

#[test]
fn spectra_has_one_row_per_wavenumber_and_branch() {
    let o = lq(&["spectra"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 65);
    let o = lq(&["spectra", "--points", "5", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(json.is_object() || json.is_array());
}

#[test]
fn config_file_sits_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"points": 7, "format": "csv"}"#).unwrap();
    let o = lq(&["spectra", "--config", path(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 4 * 7);
    let o = lq(&["spectra", "--config", path(&cfg), "--points", "3"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 4 * 3);

    std::fs::write(&cfg, r#"{"pionts": 7}"#).unwrap();
    let o = lq(&["spectra", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pionts"));

    std::fs::write(&cfg, r#"{"points": "many"}"#).unwrap();
    let o = lq(&["spectra", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("points"));
}

#[test]
fn thread_count_does_not_change_output() {
    for args in [&["spectra", "--points", "16"][..], &["run", "shear", "--steps", "300", "--format", "csv"][..]] {
        let one = lq(&[args, &["--threads", "1"]].concat());
        let four = lq(&[args, &["--threads", "4"]].concat());
        assert!(one.status.success(), "{}", stderr(&one));
        assert_eq!(one.stdout, four.stdout);
    }
}

#[test]
fn verify_exit_codes() {
    let o = lq(&["verify", "--only", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
    let o = lq(&["verify", "--only", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lq(&["verify", "--only", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn field_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let bin = dir.path().join("f.bin");
    let base = ["run", "sphere", "--n", "10", "--radius", "4", "--steps", "3"];
    let o = lq(&[&base[..], &["--fields", path(&csv)]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y,z,rho,qx,qy,qz\n"));

    let o = lq(&[&base[..], &["--fields", path(&bin), "--field-format", "binary"]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let bytes = std::fs::read(&bin).unwrap();
    assert_eq!(&bytes[..8], b"LQFIELD1");
    assert_eq!(bytes.len(), 8 + 4 * 8 + 1000 * 4 * 8);
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = lq(&["matrix", "--format", "csv", "--output", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 27 + usize::from(text.lines().next().unwrap().contains(|c: char| c.is_alphabetic())));
}

#[test]
fn fit_order_reads_spectra_output() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("s.csv");
    assert!(lq(&["spectra", "--output", path(&table)]).status.success());
    let o = lq(&["fit-order", "--input", path(&table), "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let shear = text.lines().find(|l| l.starts_with("shear,")).unwrap();
    let slope: f64 = shear.split(',').nth(1).unwrap().parse().unwrap();
    assert!((slope - 6.0).abs() < 0.4);
}
