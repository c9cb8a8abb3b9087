use std::collections::BTreeMap;
use std::path::Path;

use toral_lab::cli::main_with_args;
use toral_lab::{EXIT_CONFIG, EXIT_OK};

const SUBCOMMANDS: [&str; 10] = [
    "analyze-map",
    "make-pairs",
    "rank-one-scan",
    "avoid-sft",
    "sample",
    "density",
    "average",
    "bound-chain",
    "cartan",
    "flagship",
];

/// A small flagship so the full sweep stays quick.
const SMALL: &str = "[flagship]\nsamples = 20\nsteps = 20000\n";

fn run(dir: &Path, config: Option<&str>, args: &[&str]) -> i32 {
    let mut argv = vec!["toral".to_string(), "--out".into(), dir.join("out").display().to_string()];
    if let Some(text) = config {
        let path = dir.join("lab.toml");
        std::fs::write(&path, text).unwrap();
        argv.extend(["--config".into(), path.display().to_string()]);
    }
    argv.extend(args.iter().map(|s| s.to_string()));
    main_with_args(argv)
}

/// Every output file, with JSON headers removed.
fn outputs(dir: &Path) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.join("out")];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
                continue;
            }
            let text = std::fs::read_to_string(&p).unwrap();
            let body = if p.extension().is_some_and(|e| e == "json") {
                let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
                // subshift files are plain data; reports carry a header
                if let Some(header) = v.as_object_mut().unwrap().remove("header") {
                    assert_eq!(header["config_hash"].as_str().unwrap().len(), 64);
                } else {
                    assert!(p.to_string_lossy().ends_with(".sft.json"), "{} has no header", p.display());
                }
                v.to_string()
            } else {
                text
            };
            files.insert(p.strip_prefix(dir).unwrap().display().to_string(), body);
        }
    }
    files
}

#[test]
fn every_subcommand_is_deterministic_modulo_header() {
    for cmd in SUBCOMMANDS {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(run(a.path(), Some(SMALL), &["--seed", "5", cmd]), EXIT_OK, "{cmd}");
        assert_eq!(run(b.path(), Some(SMALL), &["--seed", "5", "--threads", "2", cmd]), EXIT_OK, "{cmd}");
        let (fa, fb) = (outputs(a.path()), outputs(b.path()));
        assert!(!fa.is_empty(), "{cmd} wrote nothing");
        assert_eq!(fa, fb, "{cmd}");
    }
}

#[test]
fn seed_changes_samples() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run(a.path(), None, &["--seed", "1", "sample"]), EXIT_OK);
    assert_eq!(run(b.path(), None, &["--seed", "2", "sample"]), EXIT_OK);
    assert_ne!(outputs(a.path()), outputs(b.path()));
}

#[test]
fn empty_flagship_is_not_an_error() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), Some("[flagship]\nsamples = 0\n"), &["flagship"]), EXIT_OK);
}

#[test]
fn configuration_errors_exit_with_two() {
    let cases: [(&str, &[&str]); 6] = [
        ("[flagship]\nball = { base = 1 }\n", &["flagship"]),
        ("[flagship]\nsampels = 3\n", &["flagship"]),
        ("[nonsense]\n", &["cartan"]),
        ("[flagship]\nepsilon = 2.0\n", &["flagship"]),
        ("[avoid_sft]\nball = { radius = \"1/3\" }\n", &["avoid-sft"]),
        ("", &["--threads", "0", "cartan"]),
    ];
    for (text, args) in cases {
        let d = tempfile::tempdir().unwrap();
        assert_eq!(run(d.path(), Some(text), args), EXIT_CONFIG, "{text:?} {args:?}");
    }
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), None, &["--no-such-flag", "cartan"]), EXIT_CONFIG);
    assert_eq!(run(d.path(), None, &["no-such-command"]), EXIT_CONFIG);
    assert_eq!(run(d.path(), None, &["--tolerance", "1e-6", "cartan"]), EXIT_CONFIG);
    assert_eq!(run(d.path(), None, &["--config", "/nonexistent/lab.toml", "cartan"]), EXIT_CONFIG);
}

#[test]
fn unknown_fields_are_reported_with_their_position() {
    let err = toral_lab::config::ConfigFile::parse("[average]\ndepth = 4\nmultiplyer = 3\n").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("multiplyer") && msg.contains("line 3"), "{msg}");
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(main_with_args(["toral", "--help"]), EXIT_OK);
    assert_eq!(main_with_args(["toral", "--version"]), EXIT_OK);
}
