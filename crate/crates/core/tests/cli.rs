//! End-to-end checks of the command-line interface: exit codes, file
//! handling, and deterministic machine-readable output.

use std::process::{Command, Output};

fn comrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_comrel"))
        .args(args)
        .env_remove("COMREL_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn theorem7_order_end_to_end() {
    // nq on the fixture presentation, then the order query.
    let out = comrel(&[
        "order",
        "--fixture",
        "theorem7",
        "--class",
        "6",
        "--word",
        "[a,t,a,a,t,a]",
        "--json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["order"], "2");
    assert_eq!(value["finite"], true);
}

#[test]
fn witt_and_basic_counts() {
    let out = comrel(&["witt", "--gens", "2", "--n", "6"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "9");

    let out = comrel(&["basic", "--gens", "2", "--max-weight", "3", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["count"], 5);
    assert_eq!(value["count_by_weight"], serde_json::json!([2, 1, 2]));
}

#[test]
fn presentation_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("comrel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d.pres");

    // `fixtures --emit` writes a loadable presentation file
    let out = comrel(&["fixtures", "--emit", "theorem7"]);
    assert!(out.status.success());
    std::fs::write(&path, stdout(&out)).unwrap();

    let from_file = comrel(&[
        "lcs",
        "--pres",
        path.to_str().unwrap(),
        "--class",
        "4",
        "--json",
    ]);
    assert!(from_file.status.success());
    let from_fixture = comrel(&["lcs", "--fixture", "theorem7", "--class", "4", "--json"]);
    assert_eq!(stdout(&from_file), stdout(&from_fixture));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn structured_output_is_deterministic() {
    let args = ["nq", "--fixture", "theorem7", "--class", "5", "--json"];
    let first = comrel(&args);
    let second = comrel(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "byte-identical reruns");

    let value: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(value["class"], 5);
    assert!(value["num_generators"].as_u64().unwrap() >= 6);

    let probe = comrel(&[
        "probe",
        "--fixture",
        "theorem7",
        "--word",
        "[a,t,a,a,t,a]",
        "--classes",
        "5,6",
        "--json",
    ]);
    assert!(probe.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&probe)).unwrap();
    assert_eq!(value["power_of_two_everywhere"], true);
    assert_eq!(value["entries"][1]["order"], "2");
}

#[test]
fn inline_presentations() {
    let out = comrel(&[
        "order",
        "--gens",
        "a,t",
        "--rel",
        "[a,t,t]",
        "--rel",
        "[a,t,a,a,a]",
        "--class",
        "6",
        "--word",
        "[a,t,a,a,t,a]",
        "--json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["order"], "2");
}

#[test]
fn verify_script_and_single() {
    let out = comrel(&["verify", "--fixture", "theorem7", "--script", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["all_hold"], true);

    let out = comrel(&[
        "verify",
        "--fixture",
        "theorem7",
        "--class",
        "6",
        "--lhs",
        "[a,t,a,a,t,[a,t]]",
        "--rhs",
        "([a,t,[a,t,a,a]^-1,t^-1]^([a,t,a,a]*t))^-1",
        "--json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["equal"], true);
}

#[test]
fn exit_codes() {
    // parse error in a word: exit 2
    let out = comrel(&["order", "--gens", "a,t", "--class", "2", "--word", "[a,t"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown generator: exit 2
    let out = comrel(&["order", "--gens", "a,t", "--class", "2", "--word", "b"]);
    assert_eq!(out.status.code(), Some(2));

    // budget exceeded: exit 3
    let out = comrel(&[
        "nq",
        "--fixture",
        "free-rank2",
        "--class",
        "4",
        "--max-gens",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // invalid input: exit 1
    let out = comrel(&["nq", "--fixture", "no-such-fixture", "--class", "2"]);
    assert_eq!(out.status.code(), Some(1));

    // clap usage errors: exit 2
    let out = comrel(&["order", "--fixture", "theorem7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_env_var() {
    let out = Command::new(env!("CARGO_BIN_EXE_comrel"))
        .args(["nq", "--fixture", "free-rank2", "--class", "4"])
        .env("COMREL_BUDGET", "3")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3), "env budget is honored");

    let out = Command::new(env!("CARGO_BIN_EXE_comrel"))
        .args([
            "nq",
            "--fixture",
            "free-rank2",
            "--class",
            "4",
            "--max-gens",
            "64",
        ])
        .env("COMREL_BUDGET", "3")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "flag overrides env");
}

#[test]
fn hydra_subcommands() {
    let out = comrel(&["hydra-nf", "--k", "3", "--word", "[a,t,t,t]", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["trivial"], true);

    let out = comrel(&["hydra-rewrite", "--k", "2", "--l", "2", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let word = value["word"].as_str().unwrap().to_string();
    // equals [c1,c2,c2] as a free word over c1, c2
    let c = comrel::words::Alphabet::new(["c1", "c2"]).unwrap();
    let got = comrel::words::parse_word(&word, &c).unwrap();
    let expected = comrel::words::parse_word("[c1,c2,c2]", &c).unwrap();
    assert_eq!(got, expected);
}

#[test]
fn hall_witt_check_runs() {
    let out = comrel(&[
        "hall-witt-check",
        "--count",
        "50",
        "--max-len",
        "5",
        "--json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["all_reduce_to_identity"], true);
    assert_eq!(value["failures"], 0);
}
