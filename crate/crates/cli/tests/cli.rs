use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dlie_cli::{run_file, run_source, CliError, RunOptions};

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "dlie"))
        .collect();
    files.sort();
    files
}

fn dlie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlie")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn every_corpus_file_passes() {
    let files = corpus();
    assert!(files.iter().any(|p| p.ends_with("curvature_type.dlie")));
    for f in files {
        let report = run_file(&f, &RunOptions::default()).unwrap();
        assert!(report.all_passed(), "{}:\n{}", f.display(), report.to_text());
    }
}

#[test]
fn corpus_reaches_every_task() {
    let mut seen = std::collections::BTreeSet::new();
    for f in corpus() {
        for t in run_file(&f, &RunOptions::default()).unwrap().tasks {
            seen.insert(t.task);
        }
    }
    for name in dlie_cli::tasks::TASK_NAMES {
        assert!(seen.contains(*name), "no corpus task uses {name}");
    }
}

#[test]
fn reports_are_reproducible() {
    for f in corpus() {
        let opts = RunOptions { seed: 7, ..Default::default() };
        let a = run_file(&f, &opts).unwrap().to_json();
        let b = run_file(&f, &opts).unwrap().to_json();
        let c = run_file(&f, &RunOptions { parallel: true, ..opts }).unwrap().to_json();
        assert_eq!(a, b, "{}", f.display());
        assert_eq!(a, c, "{}", f.display());
    }
}

#[test]
fn seed_reaches_sampled_checks() {
    let src = "ring { vars = 2 }\ncochain f {\n  values = { (1,2) -> x }\n}\ndlie T { from = (Der, f) }\ntasks {\n  check-axioms T samples=3\n}\n";
    let a = run_source("s", src, &RunOptions { seed: 1, ..Default::default() }).unwrap();
    let b = run_source("s", src, &RunOptions { seed: 2, ..Default::default() }).unwrap();
    assert_eq!(a.tasks[0].seed, 1);
    assert_eq!(b.tasks[0].seed, 2);
}

#[test]
fn zero_cocycle_file_passes() {
    let src = "ring { vars = 1 }\ncochain f { }\ntasks {\n  check-cocycle f\n}\n";
    let r = run_source("zero", src, &RunOptions::default()).unwrap();
    assert!(r.all_passed());
    assert_eq!(r.tasks.len(), 1);
}

#[test]
fn unknown_connection_is_named() {
    let src = "ring { vars = 2 }\ntasks {\n  jet nowhere\n}\n";
    match run_source("x", src, &RunOptions::default()) {
        Err(CliError::Unresolved { kind, id, at }) => {
            assert_eq!((kind.as_str(), id.as_str()), ("connection", "nowhere"));
            assert_eq!(at.line, 3);
            assert!(at.to_string().contains("nowhere"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_reference_inside_a_block() {
    let src = "ring { vars = 2 }\nconnection c {\n  dlie = missing\n  gamma = []\n  rank = 1\n}\n";
    let Err(CliError::Unresolved { id, at, .. }) = run_source("x", src, &RunOptions::default()) else { panic!() };
    assert_eq!(id, "missing");
    assert_eq!((at.line, at.column), (3, 10));
}

#[test]
fn parse_errors_have_positions() {
    let cases = [
        ("ring { vars = 2 }\ncochain f {\n  values = { (1,2) x }\n}\n", 3),
        ("ring { vars = 2 }\ncochain f {\n  values = { (1,2) -> x + }\n}\n", 3),
        ("ring { vars = 2 }\n\n\nlie_rinehart L {\n  anchor = [[1, 0], [0]]\n}\n", 5),
        ("ring { vars = 2 }\ncochain z { }\ndlie T { from = (Der, z) }\ntasks {\n  nf T expr=\"u1\" bogus=1\n}\n", 5),
        ("ring { vars = 2 }\ntasks {\n  frobnicate x\n}\n", 3),
    ];
    for (src, line) in cases {
        match run_source("x", src, &RunOptions::default()) {
            Err(CliError::Input(loc)) => assert_eq!(loc.line, line, "{src}: {loc}"),
            other => panic!("{src}: {other:?}"),
        }
    }
}

#[test]
fn normal_form_of_swapped_pair() {
    let o = dlie(&["--json", "nf", "--kind=utensor-tilde", "--dlie=der_xy_one", "--expr=u2 ⊗ u1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let out = &v["tasks"][0]["output"];
    assert_eq!(out["normal_form"], "u1 ⊗ u2 - 1");
    assert_eq!(out["degree"], "2");
    assert!(out["steps"].as_str().unwrap().parse::<u64>().unwrap() > 0);

    let src = "ring { vars = 2 }\ncochain f {\n  values = { (1,2) -> 5 }\n}\ndlie T { from = (Der, f) }\ntasks {\n  nf T kind=utensor-tilde expr=\"u2 ⊗ u1\" expect-nf=\"u1 ⊗ u2 - 5\"\n}\n";
    let r = run_source("nf", src, &RunOptions::default()).unwrap();
    assert!(r.all_passed(), "{}", r.to_text());
    assert_eq!(r.tasks[0].output["normal_form"], "u1 ⊗ u2 - 5");
}

#[test]
fn exit_codes() {
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/curvature_type.dlie");
    let ok = dlie(&["run", "--file", file.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));

    let dir = std::env::temp_dir().join(format!("dlie-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let failing = dir.join("fail.dlie");
    std::fs::write(&failing, "ring { vars = 2 }\ncochain z { }\ntasks {\n  curvature-type curvature_type cocycle=z\n}\n").unwrap();
    // the connection only exists in the library, not in this file
    assert_eq!(dlie(&["run", "--file", failing.to_str().unwrap()]).status.code(), Some(2));

    let fail = dlie(&["chern", "--connection=chern_split_4", "--k=2"]);
    assert_eq!(fail.status.code(), Some(1), "{}", stdout(&fail));

    let bad = dir.join("bad.dlie");
    std::fs::write(&bad, "ring { vars = 2 }\nwidget w { }\n").unwrap();
    let o = dlie(&["run", "--file", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column 1"));

    assert_eq!(dlie(&["run", "--file", dir.join("absent.dlie").to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn subcommands_use_the_library() {
    for args in [
        vec!["end-ext", "--connection=nilpotent", "--check=orders", "--degree=2"],
        vec!["jet", "--connection=curvature_type"],
        vec!["chern", "--connection=chern_scalar_4", "--cocycle=chern_scalar_4_f", "--k=2"],
        vec!["list"],
    ] {
        let o = dlie(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
}
