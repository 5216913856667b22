use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn k3fm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3fm"))
        .args(args)
        .env_remove("K3FM_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn table_csv_rows() {
    let o = k3fm(&["table", "--format", "csv"]);
    assert!(o.status.success());
    let expected = "p,h,fm\n229,3,2\n257,3,2\n401,5,3\n577,7,4\n733,3,2\n761,3,2\n1009,7,4\n\
                    1093,5,3\n1129,9,5\n1229,3,2\n1297,11,6\n1373,3,2\n1429,5,3\n1489,3,2\n";
    assert_eq!(stdout(&o), expected);
    // byte-identical on a second run
    assert_eq!(stdout(&k3fm(&["table", "--format", "csv"])), expected);
}

#[test]
fn table_text_and_list() {
    let o = k3fm(&["table", "--list", "5,13,229"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect();
    assert_eq!(lines, vec!["p h fm", "5 1 1", "13 1 1", "229 3 2"]);
    let o = k3fm(&["table", "--list", "7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rank_one_and_class_numbers() {
    assert_eq!(stdout(&k3fm(&["fm", "--rank1", "6"])), "fm=2\n");
    assert_eq!(stdout(&k3fm(&["fm", "--rank1", "1"])), "fm=1\n");
    assert_eq!(stdout(&k3fm(&["classnum", "1297"])), "h=11\n");
    assert!(stdout(&k3fm(&["classnum", "20"])).contains("form class number"));
    let o = k3fm(&["classnum", "49"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o), "isotropic discriminant unsupported\n");
}

#[test]
fn lattice_files() {
    let s = json(r#"{"gram": [[2,1],[1,-2]]}"#);
    let o = k3fm(&["discform", path(&s)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("det=-5"));
    assert!(out.contains("invariant_factors=[5]"));

    let bad = json(r#"{"gram": [[2,1],[1,2],[0,0]]}"#);
    let o = k3fm(&["discform", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o), "gram must be square\n");

    let asym = json(r#"{"gram": [[2,1],[0,2]]}"#);
    assert_eq!(stderr(&k3fm(&["discform", path(&asym)])), "gram must be symmetric\n");
    let frac = json(r#"{"gram": [[2.5]]}"#);
    assert_eq!(
        stderr(&k3fm(&["discform", path(&frac)])),
        "gram entries must be integers\n"
    );
    let degenerate = json(r#"{"gram": [[2,2],[2,2]]}"#);
    assert_eq!(k3fm(&["discform", path(&degenerate)]).status.code(), Some(2));
    assert_eq!(k3fm(&["discform", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn fm_from_lattice() {
    let p229 = json(r#"{"gram": [[2,1],[1,-114]]}"#);
    let o = k3fm(&["fm", "--lattice", path(&p229)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("fm=2\nmethod=rank2\n"));
    assert_eq!(out.lines().count(), 5);

    let csv = stdout(&k3fm(&["fm", "--lattice", path(&p229), "--format", "csv"]));
    assert!(csv.contains("\nj,gram,form,count\n"));

    let u_a1 = json(r#"{"gram": [[0,1,0],[1,0,0],[0,0,-2]]}"#);
    assert!(stdout(&k3fm(&["fm", "--lattice", path(&u_a1)])).starts_with("fm=1\nmethod=nikulin\n"));
}

#[test]
fn fm_error_paths() {
    let p229 = json(r#"{"gram": [[2,1],[1,-114]]}"#);
    let o = k3fm(&["fm", "--lattice", path(&p229), "--hodge-order", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o), "explicit Hodge action required\n");

    let odd = json(r#"{"gram": [[1,0],[0,-1]]}"#);
    assert_eq!(k3fm(&["fm", "--lattice", path(&odd)]).status.code(), Some(2));

    // rank three with three generators: no shortcut applies
    let hard = json(r#"{"gram": [[2,0,0],[0,-2,0],[0,0,-2]]}"#);
    let o = k3fm(&["fm", "--lattice", path(&hard)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr(&o).lines().count(), 1);

    let o = Command::new(env!("CARGO_BIN_EXE_k3fm"))
        .args(["fm", "--rank1", "30"])
        .env("K3FM_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));

    let o = Command::new(env!("CARGO_BIN_EXE_k3fm"))
        .args(["fm", "--rank1", "30"])
        .env("K3FM_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = k3fm(&["fm"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn hodge_action_file() {
    let p = json(r#"{"gram": [[2,1],[1,-2]]}"#);
    // -1 on Z/5 written out explicitly
    let action = json(r#"{"order": 2, "discriminant": [[4]]}"#);
    let o = k3fm(&["fm", "--lattice", path(&p), "--hodge-action", path(&action)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("fm=1\n"));
    let mismatch = k3fm(&[
        "fm",
        "--lattice",
        path(&p),
        "--hodge-action",
        path(&action),
        "--hodge-order",
        "4",
    ]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn scan_report() {
    let o = k3fm(&["scan", "--max", "1300"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let ones = out.lines().find(|l| l.starts_with("|FM| = 1")).unwrap();
    assert!(ones.contains(": 5,13,"));
    assert!(!ones.contains(",401,"));
    let maxima: Vec<String> = out
        .lines()
        .skip_while(|l| !l.starts_with("running maximum"))
        .skip(2)
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(maxima, vec!["5,1", "229,2", "401,3", "577,4", "1129,5", "1297,6"]);
    assert_eq!(k3fm(&["scan", "--max", "3"]).status.code(), Some(2));
}

#[test]
fn genus_listing() {
    let out = stdout(&k3fm(&["genus", "205"]));
    assert!(out.contains("h=4\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("genus ")).count(), 2);
    assert!(out.contains("ambiguous: "));
}

#[test]
fn glue_and_verify() {
    let s = json(r#"{"gram": [[2,1],[1,-2]]}"#);
    let t = json(r#"{"gram": [[-2,-1],[-1,2]]}"#);
    let o = k3fm(&["glue", "--s", path(&s), "--t", path(&t), "--list"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("gluings=2\nclasses=1\n"));
    assert_eq!(out.matches("unimodular=true").count(), 2);
    assert!(!out.contains("=false"));

    let o = k3fm(&["verify-t14", "--s", path(&s), "--t", path(&t)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("total orbits=1 double_cosets=1"));

    let a2m = json(r#"[{"gram": [[-2,-1],[-1,-2]]}]"#);
    let a2 = json(r#"{"gram": [[2,1],[1,2]]}"#);
    let o = k3fm(&["verify-t14", "--s", path(&a2m), "--t", path(&a2), "--g-order", "6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = k3fm(&["verify-t14", "--s", path(&a2m), "--t", path(&a2), "--g-order", "4"]);
    assert_eq!(o.status.code(), Some(2));

    let wrong = json(r#"{"gram": [[4]]}"#);
    let o = k3fm(&["glue", "--s", path(&s), "--t", path(&wrong)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("gluings=0\nclasses=0\n"));
}
