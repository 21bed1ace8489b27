use clap::Parser;
use voaforge_cli::commands::{run, Cli, Outcome};

fn try_cli(args: &[&str]) -> anyhow::Result<Outcome> {
    let mut argv = vec!["voaforge"];
    argv.extend_from_slice(args);
    run(&Cli::try_parse_from(argv)?)
}

fn cli(args: &[&str]) -> String {
    let out = try_cli(args).unwrap();
    assert!(out.success, "{}", out.text);
    out.text
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn remainder_json_for_rank_two() {
    let v: serde_json::Value = serde_json::from_str(&cli(&["remainder", "--n", "2", "--emit", "json"])).unwrap();
    assert_eq!(v, serde_json::json!({"n": 2, "remainder": "149/600", "weight": 12}));
}

#[test]
fn rank_three_needs_the_flag() {
    assert!(try_cli(&["remainder", "--n", "3"]).is_err());
    assert!(try_cli(&["verify", "--suite", "appendix3"]).is_err());
}

#[test]
fn virasoro_ope() {
    let out = cli(&["ope", "--n", "2", "1/2 :a{1} a{1}: + 1/2 :a{2} a{2}:", "1/2 :a{1} a{1}: + 1/2 :a{2} a{2}:"]);
    assert_eq!(out, "# m = 3\n1\n# m = 1\n:a{1} a{1}: + :a{2} a{2}:\n# m = 0\n:a{1} d^1 a{1}: + :a{2} d^1 a{2}:\n");
}

#[test]
fn circle_in_both_contexts() {
    // j^2 o_1 j^0 = 8 j^2, and vac o_{-1} x = x
    assert_eq!(cli(&["circle", "--n", "1", "-m", "1", "j{2}", "j{0}"]), cli(&["circle", "--n", "1", "-m", "-1", "vac", "8 w{0,2}"]));
    assert_eq!(cli(&["circle", "--n", "1", "-m", "1", "J{2}", "J{0}"]), "8 Om{0,2}\n");
    assert_eq!(cli(&["circle", "--n", "2", "-m", "-1", "a{1}", "a{2}"]), ":a{1} a{2}:\n");
    assert!(try_cli(&["circle", "--n", "1", "-m", "0", "a{1}", "J{0}"]).is_err());
}

#[test]
fn appendix_evaluates_to_zero() {
    assert_eq!(cli(&["eval", "--n", "2", &data("appendix_n2.txt")]), "0\n");
    let v: serde_json::Value = serde_json::from_str(&cli(&["eval", "--n", "2", &data("appendix_n2.txt"), "--emit", "json"])).unwrap();
    assert_eq!(v, serde_json::json!({"rank": 2, "terms": []}));
    // in rank 3 the leading 3x3 determinant no longer vanishes
    assert_ne!(cli(&["eval", "--n", "3", &data("appendix_n2.txt")]), "0\n");
}

#[test]
fn parse_check_and_canonical_form() {
    assert_eq!(cli(&["parse", "--check", &data("appendix_n3.txt")]), "ok: normally ordered expression with 220 terms\n");
    let canonical = cli(&["parse", &data("appendix_n2.txt")]);
    assert!(canonical.starts_with(":Om{0,0} Om{1,1} Om{2,2}: - :Om{0,2} Om{0,2} Om{1,1}:"));
}

#[test]
fn decoupling_commands_agree_after_evaluation() {
    let direct = cli(&["decouple", "--n", "1", "--target", "6"]);
    let promoted = cli(&["decouple", "--n", "1", "--target", "6", "--promote"]);
    for text in [direct, promoted] {
        let body: String = text.lines().skip(1).collect();
        let tmp = std::env::temp_dir().join(format!("voaforge-decouple-{}.txt", std::process::id()));
        std::fs::write(&tmp, format!("{body} - J{{6}}")).unwrap();
        assert_eq!(cli(&["eval", "--n", "1", tmp.to_str().unwrap()]), "0\n");
        std::fs::remove_file(tmp).unwrap();
    }
    assert!(try_cli(&["decouple", "--n", "1", "--target", "2"]).is_err());
    assert!(try_cli(&["decouple", "--n", "1", "--target", "5"]).is_err());
}

#[test]
fn verify_reports_each_check() {
    let out = cli(&["verify", "--suite", "relationfree", "--n", "1"]);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("PASS first relation at weight 6"));
    assert!(try_cli(&["verify", "--suite", "nonsense"]).is_err());
}

#[test]
fn zhu_commutator_command() {
    let out = try_cli(&["zhu-comm", "--n", "1", "--max-weight", "8", "j{0}", "j{2}"]).unwrap();
    assert!(out.success, "{}", out.text);
    assert!(out.text.starts_with("commutator: certified\nresidue identity: certified\n"));
}

#[test]
fn worker_count_is_validated() {
    assert!(try_cli(&["--workers", "0", "remainder", "--n", "1"]).is_err());
    assert_eq!(cli(&["remainder", "--n", "1", "--workers", "3"]), cli(&["remainder", "--n", "1"]));
}
