use std::process::{Command, Output};

use imtk::build::{self, Kind, MatrixKind};
use imtk::cli::{self, MatrixDocument};

fn imtk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imtk")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn kinds(s: u32, k: u32) -> Vec<Kind> {
    let m = s.min(k) + 1;
    let mut out = vec![Kind::W, Kind::Wbar, Kind::F { t: None }];
    for a in 0..=m {
        out.extend([Kind::U { l: a }, Kind::Uge { l: a }, Kind::A { i: a }, Kind::N { t: a }, Kind::F { t: Some(a) }]);
        for b in 0..=a {
            out.push(Kind::Utl { t: a, l: b });
        }
    }
    for t in 0..=k {
        out.push(Kind::X { t });
        for l in 0..=t {
            out.push(Kind::Y { t, l });
        }
    }
    out
}

#[test]
fn documents_round_trip_on_v6_grid() {
    let mut count = 0;
    for v in 1..=6u32 {
        for s in 0..=v {
            for k in 0..=v {
                for kind in kinds(s, k) {
                    let mk = MatrixKind::new(kind, s, k, v);
                    if mk.validate().is_err() {
                        continue;
                    }
                    let m = build::build(&mk).unwrap();
                    let text = MatrixDocument::new(&mk, &m).to_json();
                    let (mk2, m2) = MatrixDocument::from_json(&text).unwrap().to_matrix().unwrap();
                    assert_eq!(mk2, mk);
                    assert_eq!(m2, m, "{mk:?}");
                    let (a, b) = (m.to_poly(), m2.to_poly());
                    assert_eq!((a.row_family(), a.col_family()), (b.row_family(), b.col_family()));
                    count += 1;
                }
            }
        }
    }
    assert!(count > 1000);
}

#[test]
fn build_w_example() {
    let o = imtk(&["build", "--kind", "W", "--s", "1", "--k", "2", "--v", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = MatrixDocument::from_json(&stdout(&o)).unwrap();
    assert_eq!((doc.rows, doc.cols, doc.order.as_str()), (3, 3, "lex"));
    let (_, m) = doc.to_matrix().unwrap();
    assert_eq!(m, build::build(&MatrixKind::new(Kind::W, 1, 2, 3)).unwrap());
}

#[test]
fn build_f_has_bounded_degrees() {
    let o = imtk(&["build", "--kind", "F", "--t", "2", "--s", "2", "--k", "3", "--v", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = MatrixDocument::from_json(&stdout(&o)).unwrap();
    assert_eq!(doc.entry_type, "polynomial");
    for row in &doc.entries {
        for e in row {
            match e {
                cli::Entry::Poly(cs) => assert!(cs.len() <= 3),
                cli::Entry::Scalar(_) => panic!("scalar entry in F"),
            }
        }
    }
}

#[test]
fn csv_output_and_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    let o = imtk(&["build", "--kind", "A", "--i", "1", "--k", "2", "--v", "4", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert_eq!(text.lines().next().unwrap(), "2,1,1,1,1,0");
    let o = imtk(&["build", "--kind", "F", "--t", "1", "--k", "2", "--v", "4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(imtk(&["verify", "--identity", "nosuch"]).status.code(), Some(2));
    assert_eq!(imtk(&["build", "--kind", "Q", "--k", "1", "--v", "2"]).status.code(), Some(2));
    assert_eq!(imtk(&["build", "--kind", "U", "--k", "1", "--v", "2"]).status.code(), Some(2));
    assert_eq!(imtk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(imtk(&["build", "--kind", "W", "--k", "1", "--v", "2", "--out", "/nonexistent/dir/m.json"]).status.code(), Some(3));
    assert_eq!(imtk(&["spectrum", "--kind", "U", "--l", "1", "--k", "4", "--v", "5"]).status.code(), Some(2));
    assert_eq!(imtk(&["rank", "--kind", "F", "--k", "2", "--v", "4", "--method", "formula"]).status.code(), Some(2));
    assert_eq!(imtk(&["johnson", "--v", "3", "--k", "4"]).status.code(), Some(2));
    assert_eq!(imtk(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_commands() {
    let o = imtk(&["verify", "--identity", "eq30", "--v-max", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("note: Y numerator (k-t) fails on 0"), "{out}");
    let o = imtk(&["verify", "--identity", "eq1", "--params", "i=0,s=1,k=2,v=3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass"));
    let o = imtk(&["verify", "--identity", "eq1", "--params", "i=2,s=1,k=2,v=3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = imtk(&["verify", "--identity", "blocks.*", "--v-max", "5", "--report", "json", "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["total_failures"], 0);
    assert_eq!(rep["identities"].as_array().unwrap().len(), 6);
}

#[test]
fn spectrum_commands() {
    let o = imtk(&["spectrum", "--kind", "A", "--i", "0", "--k", "2", "--v", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("distinct: 10:1 0:9"), "{}", stdout(&o));
    let o = imtk(&["spectrum", "--kind", "U", "--l", "1", "--k", "2", "--v", "5", "--check", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("distinct: 6:1 1:4 -2:5") && out.trim_end().ends_with("verified"), "{out}");
    let o = imtk(&["spectrum", "--kind", "N", "--t", "5", "--k", "6", "--v", "13", "--check", "modp", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let table: Vec<&str> = out.lines().skip(1).take_while(|l| !l.starts_with("distinct")).collect();
    assert_eq!(table.len(), 7);
    assert!(out.contains("distinct: -6:1 7:12 -4:65 5:208 -2:429 3:572 0:429"));
    let o = imtk(&["spectrum", "--kind", "F", "--t", "1", "--k", "2", "--v", "5", "--z", "2", "--check", "modp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn rank_and_johnson_commands() {
    let o = imtk(&["rank", "--kind", "N", "--t", "5", "--k", "6", "--v", "13", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "formula: 1287\ncomputed: 1287\nmatch\n");
    let o = imtk(&["rank", "--kind", "U", "--l", "2", "--s", "2", "--k", "3", "--v", "8", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("match\n"));
    let o = imtk(&["johnson", "--v", "5", "--k", "2", "--emit", "axioms"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("J(5,2): pass"));
    let o = imtk(&["johnson", "--v", "5", "--k", "2", "--emit", "p-numbers"]);
    assert!(stdout(&o).contains("p(1,1,2) = 6"));
    let o = imtk(&["johnson", "--v", "4", "--k", "2", "--emit", "bases"]);
    let out = stdout(&o);
    assert_eq!(out.matches("3 members").count(), 3, "{out}");
}

#[test]
fn threads_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_imtk"))
        .args(["verify", "--identity", "eq2", "--v-max", "4"])
        .env("IMTK_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
