use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mdcode::absorbing::{CanonicalUas, UasConfig};
use mdcode::oracle::brute_force_uas;
use mdcode::relocation::{assemble_md, split_matrices, Modulus};
use mdcode::tanner::{expand_qc, parse_alist, write_alist, write_qc, QcMatrix};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdcode"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn toy_qc() -> QcMatrix {
    let h = CanonicalUas::by_name("4_2_g3").unwrap().incidence().clone();
    QcMatrix::new(
        3,
        h.n_rows(),
        h.n_cols(),
        h.entries().iter().map(|&e| (e, 0)).collect::<Vec<_>>(),
    )
    .unwrap()
}

#[test]
fn fractions_golden_rows() {
    let o = run(&["fractions", "--uas", "uas:4_2_g3", "--M", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "config\tM\tn_f\tl1\tl2\tf_nof\tf_noc_bound\tf_nou\tf_not\ts1_pct\ts2_pct\ts1_pct_approx\ts2_pct_approx\n\
         4_2_g3\t5\t2\t2\t1\t16/25\t12/25\t24/25\t12/25\t48\t-16\t48.00\t-16.00\n"
    );
    let o = run(&["fractions", "--uas", "uas:4_4_g4", "--M", "5"]);
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        "4_4_g4\t5\t3\t3\t3\t64/125\t24/125\t124/125\t4/5\t80\t144/5\t80.00\t28.80"
    );
}

#[test]
fn fractions_with_oracle_match() {
    let o = run(&["fractions", "--uas", "uas:4_2_g3", "--M", "3", "--oracle"]);
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row.last(), Some(&"true"));
    // formula f_nof, f_nou, f_not against measured columns
    assert_eq!((row[5], row[7], row[8]), (row[15], row[16], row[17]));
}

#[test]
fn fractions_from_subgraph_file() {
    let dir = TempDir::new().unwrap();
    let h = CanonicalUas::by_name("4_4_g4").unwrap().incidence().clone();
    let f = write(&dir, "u.alist", &write_alist(&h));
    let o = run(&["fractions", "--input", s(&f), "--M", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("4_4_g4\t5\t3\t3\t3\t64/125"));
}

#[test]
fn analyze_canonical_fixture() {
    let dir = TempDir::new().unwrap();
    let h = CanonicalUas::by_name("4_2_g3").unwrap().incidence().clone();
    let f = write(&dir, "u.alist", &write_alist(&h));
    let o = run(&["analyze", "--input", s(&f), "--uas", "4,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("gamma\t3\n"));
    assert!(out.contains("n_f\t2\n"));
    assert!(out.contains("instances\t1\n"));
    assert!(out.contains("instance\t0,1,2,3\tn_c=3\n"));
}

#[test]
fn analyze_identity_code() {
    let dir = TempDir::new().unwrap();
    let q = QcMatrix::new(5, 2, 2, vec![((0, 0), 0), ((1, 1), 3)]).unwrap();
    let f = write(&dir, "id.qc", &write_qc(&q));
    let o = run(&["analyze", "--input", s(&f)]);
    let out = stdout(&o);
    assert!(out.contains("cycles_4\t0\ncycles_6\t0\ncycles_8\t0\n"));
    // gamma 1 cannot host a (4, 2) gamma-3 set
    assert_eq!(
        run(&["analyze", "--input", s(&f), "--uas", "4,2,3"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn analyze_matches_subset_scan() {
    let dir = TempDir::new().unwrap();
    let q = QcMatrix::array_code(5, 3, 5);
    let f = write(&dir, "a.qc", &write_qc(&q));
    let o = run(&["analyze", "--input", s(&f), "--uas", "4,2"]);
    let expected = brute_force_uas(&expand_qc(&q), &UasConfig::new(4, 2, 3).unwrap()).len();
    assert!(stdout(&o).contains(&format!("instances\t{expected}\n")));
}

#[test]
fn design_then_verify() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "toy.qc", &write_qc(&toy_qc()));
    let md = dir.path().join("md.alist");
    let reloc = dir.path().join("r.txt");
    let rep = dir.path().join("rep.tsv");
    let o = run(&[
        "design",
        "--input",
        s(&f),
        "--M",
        "3",
        "--uas",
        "4,2,3",
        "--out-md",
        s(&md),
        "--out-reloc",
        s(&reloc),
        "--report",
        s(&rep),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = std::fs::read_to_string(&rep).unwrap();
    assert!(report.contains("final_active\t0\n"));
    assert!(std::fs::read_to_string(&reloc)
        .unwrap()
        .starts_with("reloc M=3 granularity=circulant\n"));
    let v = run(&["verify", "--md", s(&md), "--uas", "4,2", "--expect", "0"]);
    assert_eq!(v.status.code(), Some(0));
    let v = run(&["verify", "--md", s(&md), "--uas", "4,2", "--expect", "1"]);
    assert_eq!(v.status.code(), Some(11));
}

#[test]
fn instance_free_design_is_block_diagonal() {
    let dir = TempDir::new().unwrap();
    let h = CanonicalUas::by_name("4_2_g3").unwrap().incidence().clone();
    let f = write(&dir, "u.alist", &write_alist(&h));
    let md = dir.path().join("md.alist");
    let reloc = dir.path().join("r.txt");
    let o = run(&[
        "design",
        "--input",
        s(&f),
        "--M",
        "3",
        "--uas",
        "4,0",
        "--out-md",
        s(&md),
        "--out-reloc",
        s(&reloc),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&reloc).unwrap(),
        "reloc M=3 granularity=entry\n"
    );
    let m = parse_alist(&std::fs::read_to_string(&md).unwrap()).unwrap();
    assert!(m
        .entries()
        .iter()
        .all(|&(r, c)| r / h.n_rows() == c / h.n_cols()));
}

#[test]
fn verify_no_coupling_baseline_and_tampering() {
    let dir = TempDir::new().unwrap();
    let h = CanonicalUas::by_name("4_2_g3").unwrap().incidence().clone();
    let m3 = Modulus::new(3).unwrap();
    let md = assemble_md(&split_matrices(&h, &vec![0; h.nnz()], m3).unwrap()).unwrap();
    let f = write(&dir, "md.alist", &write_alist(&md));
    assert_eq!(
        run(&["verify", "--md", s(&f), "--uas", "4,2,3", "--expect", "3"])
            .status
            .code(),
        Some(0)
    );
    // move one copy's c5 edge onto another copy: two instances survive
    let mut entries = md.entries().to_vec();
    let i = entries.iter().position(|&e| e == (4, 1)).unwrap();
    entries[i] = (4 + h.n_rows(), 1);
    let tampered = mdcode::tanner::BinaryMatrix::new(md.n_rows(), md.n_cols(), entries).unwrap();
    let t = write(&dir, "t.alist", &write_alist(&tampered));
    let o = run(&["verify", "--md", s(&t), "--uas", "4,2,3", "--expect", "3"]);
    assert_eq!(o.status.code(), Some(11));
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.alist", "3 2\n1 1\nx\n");
    assert_eq!(run(&["analyze", "--input", s(&bad)]).status.code(), Some(2));
    let o = run(&["fractions", "--uas", "uas:4_2_g3", "--M", "4"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["fractions", "--uas", "uas:nope", "--M", "5"]);
    assert_eq!(o.status.code(), Some(3));
    let f = write(&dir, "toy.qc", &write_qc(&toy_qc()));
    let o = run(&["design", "--input", s(&f), "--M", "3", "--uas", "4,4,4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "a.qc", &write_qc(&QcMatrix::array_code(5, 3, 5)));
    let one = run(&[
        "--threads",
        "1",
        "design",
        "--input",
        s(&f),
        "--M",
        "3",
        "--uas",
        "4,2",
    ]);
    let four = run(&[
        "--threads",
        "4",
        "design",
        "--input",
        s(&f),
        "--M",
        "3",
        "--uas",
        "4,2",
    ]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&four));

    let k4 = "4 6\n3 2\n3 3 3 3\n2 2 2 2 2 2\n1 2 3\n1 4 5\n2 4 6\n3 5 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";
    let h = write(&dir, "k4.alist", k4);
    let args = |t: &'static str| {
        vec![
            "--threads",
            t,
            "oracle",
            "--uas",
            "4,0",
            "--M",
            "3",
            "--input",
            s(&h),
            "--trials",
            "500",
            "--seed",
            "9",
        ]
    };
    let a = run(&args("1"));
    let b = run(&args("3"));
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn oracle_full_sweep() {
    let o = run(&["oracle", "--uas", "uas:4_2_g3", "--M", "3", "--full"]);
    assert_eq!(
        stdout(&o),
        "config\tM\tclasses\tf_0\tf_1\tf_nof\tf_nou\tf_not\tall_inactive\n\
         4_2_g3\t3\t9\t1/9\t2/3\t4/9\t8/9\t2/9\t2/9\nfull_sweep_matches\ttrue\n"
    );
}
