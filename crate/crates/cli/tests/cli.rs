use std::path::Path;
use std::process::{Command, Output};

use modcat_core::filters::{default_rules, parse_rules};
use serde_json::Value;

fn modcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modcat"))
        .args(args)
        .env_remove("MODCAT_THREADS")
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn data(records: &[Value]) -> Vec<&Value> {
    records
        .iter()
        .filter(|r| r.get("record").is_none())
        .collect()
}

#[test]
fn search_rank_five_emits_two_solutions() {
    let out = modcat(&["search", "--rank", "5", "--deterministic"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    assert_eq!(recs[0]["record"], "manifest");
    assert_eq!(recs[0]["subcommand"], "search");
    assert_eq!(recs.last().unwrap()["record"], "summary");
    let sols = data(&recs);
    assert_eq!(sols.len(), 2);
    assert_eq!(
        sols[0].to_string(),
        r#"{"rank":5,"ell":1,"x":[2,8,8,8,8],"dim":8,"dims":{"1":4,"2":1}}"#
    );
}

#[test]
fn invalid_arguments_exit_two() {
    assert_eq!(modcat(&["search", "--rank", "0"]).status.code(), Some(2));
    assert_eq!(
        modcat(&["search", "--rank", "5", "--no-such-flag"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(modcat(&["mnsd", "--rank", "4"]).status.code(), Some(2));
    assert_eq!(
        modcat(&["bounds", "--rank", "6", "--ell", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        modcat(&["search", "--rank", "5", "--dim-cap", "abc"])
            .status
            .code(),
        Some(2)
    );
    let out = modcat(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn missing_input_exits_three() {
    let out = modcat(&["filter", "--in", "/nonexistent/input.jsonl"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bounds_table_ends_at_u7() {
    let out = modcat(&["bounds", "--rank", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let last = text.lines().last().unwrap();
    assert!(last.trim_end().ends_with("10650056950806"), "{last}");
}

#[test]
fn large_integers_are_strings() {
    let out = modcat(&["bounds", "--rank", "8", "--json"]);
    let recs = lines(&out);
    let rows = data(&recs);
    assert_eq!(rows[6]["u"], Value::from(10650056950806i64));
    assert_eq!(rows[7]["u"], Value::from("113423713055421844361000442"));
    let csv = modcat(&["bounds", "--rank", "3", "--csv"]);
    assert_eq!(
        String::from_utf8_lossy(&csv.stdout),
        "i,u,lower,upper\n1,1,1,3\n2,2,2,4\n3,6,3,6\n"
    );
}

#[test]
fn filter_annotates_records() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s6.jsonl");
    let out = modcat(&["search", "--rank", "6", "--out", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = modcat(&["filter", "--in", input.to_str().unwrap(), "--deterministic"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    let digest = recs[0]["inputs"][input.to_str().unwrap()].as_str().unwrap();
    assert!(digest.starts_with("sha256:") && digest.len() == 7 + 64);
    let statuses: Vec<&str> = data(&recs)
        .iter()
        .map(|r| r["verdict"]["status"].as_str().unwrap())
        .collect();
    assert_eq!(statuses, ["eliminated", "eliminated", "pointed"]);
}

#[test]
fn malformed_rules_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s5.jsonl");
    modcat(&["search", "--rank", "5", "--out", input.to_str().unwrap()]);
    let rules = dir.path().join("rules.toml");
    std::fs::write(
        &rules,
        "[[rule]]\nname = \"x\"\nconclusion = \"maybe\"\ncitation = \"c\"\n",
    )
    .unwrap();
    let out = modcat(&[
        "filter",
        "--in",
        input.to_str().unwrap(),
        "--rules",
        rules.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_rule_file_matches_builtin_table() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("rules/default.toml");
    let rules = parse_rules(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(rules, default_rules());
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_modcat"))
        .args(["count", "--rank", "3", "--json", "--deterministic"])
        .env("MODCAT_THREADS", "3")
        .output()
        .unwrap();
    let recs = lines(&out);
    assert_eq!(recs[0]["threads"], 3);
    assert_eq!(recs[1]["count"], 3);
    let out = Command::new(env!("CARGO_BIN_EXE_modcat"))
        .args(["count", "--rank", "3", "--json", "--threads", "2"])
        .env("MODCAT_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(lines(&out)[0]["threads"], 2);
}

const SCAN: &[&str] = &[
    "scan",
    "--mnsd",
    "--r-min",
    "13",
    "--r-max",
    "19",
    "--d-max",
    "15",
    "--t-max",
    "3",
    "--deterministic",
];

fn scan_to(out: &Path, resume: &Path) -> Output {
    let mut args = SCAN.to_vec();
    args.extend([
        "--out",
        out.to_str().unwrap(),
        "--resume",
        resume.to_str().unwrap(),
    ]);
    modcat(&args)
}

fn after_manifest(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    text.split_once('\n').unwrap().1.to_string()
}

#[test]
fn interrupted_scan_resumes_to_the_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let (full, ck) = (dir.path().join("full.jsonl"), dir.path().join("full.ckpt"));
    assert_eq!(scan_to(&full, &ck).status.code(), Some(0));
    let ck_text = std::fs::read_to_string(&ck).unwrap();
    let ck_lines: Vec<&str> = ck_text.lines().collect();
    assert!(ck_lines.len() > 10);

    // Keep the header and a few units, then half of the next line.
    let partial = dir.path().join("part.ckpt");
    let mut cut: String = ck_lines[..6].iter().map(|l| format!("{l}\n")).collect();
    cut.push_str(&ck_lines[6][..ck_lines[6].len() / 2]);
    std::fs::write(&partial, cut).unwrap();

    let resumed = dir.path().join("resumed.jsonl");
    assert_eq!(scan_to(&resumed, &partial).status.code(), Some(0));
    assert_eq!(after_manifest(&full), after_manifest(&resumed));
    assert_eq!(std::fs::read_to_string(&partial).unwrap(), ck_text);
    let manifest: Value = serde_json::from_str(
        std::fs::read_to_string(&resumed)
            .unwrap()
            .lines()
            .next()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["config"]["resumed_units"], 5);
}

#[test]
fn checkpoint_mismatch_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let (out, ck) = (dir.path().join("o.jsonl"), dir.path().join("c.ckpt"));
    assert_eq!(scan_to(&out, &ck).status.code(), Some(0));

    // Different configuration.
    let other = modcat(&[
        "scan",
        "--mnsd",
        "--r-max",
        "17",
        "--d-max",
        "15",
        "--t-max",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--resume",
        ck.to_str().unwrap(),
    ]);
    assert_eq!(other.status.code(), Some(4));

    // Tampered record.
    let text = std::fs::read_to_string(&ck).unwrap();
    let tampered = text.replacen("\"dim\":81,", "\"dim\":82,", 1);
    assert_ne!(tampered, text);
    std::fs::write(&ck, tampered).unwrap();
    let res = scan_to(&out, &ck);
    assert_eq!(res.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&res.stderr).contains("digest chain"));
}
