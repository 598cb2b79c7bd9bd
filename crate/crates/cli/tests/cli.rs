use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quadapn::boolfun::Vbf;
use quadapn::known::{kim_mapping, power_map};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadapn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_table(dir: &Path, name: &str, f: &Vbf) -> String {
    let path = dir.join(name);
    fs::write(&path, f.to_lut_text()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn analyze_identity_on_eight_bits() {
    let dir = TempDir::new().unwrap();
    let file = write_table(dir.path(), "id.lut", &Vbf::identity(8));
    let o = run(&["analyze", &file]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("degree 1, not APN, linearity 256"));
    assert!(text.contains("permutation: yes"));
}

#[test]
fn analyze_cube_on_five_bits() {
    let dir = TempDir::new().unwrap();
    let file = write_table(dir.path(), "x3.lut", &power_map(5, 3));
    let o = run(&["analyze", &file]);
    assert_eq!(stdout(&o).lines().next(), Some("degree 2, APN, linearity 8"));
}

#[test]
fn class_counts() {
    let o = run(&["classes", "--n", "7"]);
    assert_eq!(stdout(&o), "128 classes (56/36/36), 53 admissible\n");
    let o = run(&["classes", "--n", "8"]);
    assert_eq!(stdout(&o), "157 classes (75/41/41), 67 admissible\n");
    let o = run(&["classes", "--n", "8", "--list"]);
    assert_eq!(stdout(&o).lines().count(), 158);
}

#[test]
fn verify_published_passes() {
    let o = run(&["verify-published"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
    assert!(text.lines().count() >= 10);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.lut");
    fs::write(&bad, "n=2\n0 1 2\n").unwrap();
    assert_eq!(run(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["analyze", dir.path().join("missing.lut").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["search", "--n", "11"]).status.code(), Some(2));
    assert_eq!(run(&["le-search", "--n", "8", "--class", "999"]).status.code(), Some(3));
    assert_eq!(run(&["le-search", "--n", "8", "--class", "0"]).status.code(), Some(3));
    let id = write_table(dir.path(), "id.lut", &Vbf::identity(5));
    assert_eq!(run(&["fingerprint", &id]).status.code(), Some(1));
}

#[test]
fn search_output_is_reproducible() {
    let a = run(&["search", "--n", "6", "--seed", "11", "--runs", "2"]);
    let b = run(&["search", "--n", "6", "--seed", "11", "--runs", "2", "--jobs", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let first: String = body.lines().take(2).map(|l| format!("{l}\n")).collect();
    let f = Vbf::from_lut_text(&first).unwrap();
    assert!(f.is_apn() && f.algebraic_degree() <= 2 && f.eval(0) == 0);
}

#[test]
fn fingerprint_matches_library() {
    let dir = TempDir::new().unwrap();
    let file = write_table(dir.path(), "kim.lut", &kim_mapping());
    let o = run(&["fingerprint", &file]);
    let expected = quadapn::equiv::Fingerprint::of(&kim_mapping()).unwrap();
    assert_eq!(stdout(&o), format!("{expected}\n"));
}

#[test]
fn catalog_round_trip_is_byte_exact() {
    let dir = TempDir::new().unwrap();
    let cat = dir.path().join("cat");
    let files = [
        write_table(dir.path(), "a.lut", &power_map(6, 3)),
        write_table(dir.path(), "b.lut", &kim_mapping()),
    ];
    // extra whitespace must survive the round trip
    let c = dir.path().join("c.lut");
    fs::write(&c, format!("{}\n", power_map(5, 5).to_lut_text())).unwrap();
    let cat_s = cat.to_str().unwrap();
    let o = run(&["catalog", "insert", "--dir", cat_s, &files[0], &files[1], c.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["catalog", "insert", "--dir", cat_s, &files[0]]);
    assert!(stdout(&o).contains("Duplicate"));

    let list = stdout(&run(&["catalog", "list", "--dir", cat_s]));
    assert!(list.ends_with("3 tables, 3 fingerprints\n"));
    assert!(run(&["catalog", "verify", "--dir", cat_s]).status.success());

    let out = dir.path().join("export");
    let o = run(&["catalog", "export", "--dir", cat_s, "--out", out.to_str().unwrap()]);
    assert_eq!(stdout(&o), "exported 3 tables\n");
    let mut exported: Vec<Vec<u8>> = fs::read_dir(&out).unwrap().map(|e| fs::read(e.unwrap().path()).unwrap()).collect();
    let mut inputs: Vec<Vec<u8>> = [&files[0], &files[1], c.to_str().unwrap()].iter().map(|p| fs::read(p).unwrap()).collect();
    exported.sort();
    inputs.sort();
    assert_eq!(exported, inputs);
}

#[test]
fn catalog_rejects_non_apn() {
    let dir = TempDir::new().unwrap();
    let id = write_table(dir.path(), "id.lut", &Vbf::identity(4));
    let o = run(&["catalog", "insert", "--dir", dir.path().join("cat").to_str().unwrap(), &id]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("quadapn.toml");
    fs::write(&cfg, "seed = 5\nbudget = \"2s\"\nrestarts = 20\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let from_config = run(&["--config", cfg_s, "search", "--n", "5"]);
    let explicit = run(&["search", "--n", "5", "--seed", "5"]);
    assert!(from_config.status.success());
    assert_eq!(from_config.stdout, explicit.stdout);
    assert!(stdout(&from_config).starts_with("# seed=5 "));

    let overridden = run(&["--config", cfg_s, "search", "--n", "5", "--seed", "9"]);
    assert!(stdout(&overridden).starts_with("# seed=9 "));

    fs::write(&cfg, "seed = 5\nunknown_key = 1\n").unwrap();
    assert_eq!(run(&["--config", cfg_s, "search", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn switch_reports_dimensions() {
    let dir = TempDir::new().unwrap();
    let file = write_table(dir.path(), "x3.lut", &power_map(5, 3));
    let o = run(&["switch", &file, "--v", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("dim=11"), "{}", stdout(&o));
}
