use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn covrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covrel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn identity_channel_is_reversible_with_identity_reverse() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rev.json");
    let basic = fixture("basic.json");
    let o = covrel(&["analyze-channel", basic.to_str().unwrap(), "id", "--emit-reverse", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reversible: yes"));
    let v = read_json(&out);
    let choi = &v["channels"]["id_reverse"]["choi"]["0,0"];
    // |vec I><vec I| in the stored orientation
    for (r, c, x) in [(0, 0, 1.0), (0, 3, 1.0), (3, 3, 1.0), (1, 1, 0.0), (2, 2, 0.0)] {
        assert!((choi[r][c][0].as_f64().unwrap() - x).abs() < 1e-9);
    }
}

#[test]
fn merging_channel_is_not_reversible() {
    let o = covrel(&["analyze-channel", fixture("basic.json").to_str().unwrap(), "merge"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reversible: no"));
}

#[test]
fn unitary_channel_has_rank_one_relation() {
    let o = covrel(&["analyze-channel", fixture("basic.json").to_str().unwrap(), "hadamard"]);
    assert!(stdout(&o).contains("relation ranks: 1\n"));
}

#[test]
fn graph_to_channel_round_trips_and_rejects_simple_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let basic = fixture("basic.json");
    for g in ["discrete", "complete", "c2_discrete"] {
        let out = dir.path().join(format!("{}.json", g));
        let o = covrel(&["graph-to-channel", basic.to_str().unwrap(), g, "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", g);
        assert!(stdout(&o).contains("round trip: pass"));
        assert_eq!(read_json(&out)["report"]["round_trip"], Value::Bool(true));
    }
    let o = covrel(&["graph-to-channel", basic.to_str().unwrap(), "c2_edge"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a confusability graph"));
    let o = covrel(&["graph-to-channel", basic.to_str().unwrap(), "complete", "--tau", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn realized_discrete_graph_channel_is_reversible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    covrel(&["graph-to-channel", fixture("basic.json").to_str().unwrap(), "discrete", "-o", out.to_str().unwrap()]);
    let o = covrel(&["analyze-channel", out.to_str().unwrap(), "discrete_channel"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reversible: yes"));
}

#[test]
fn homomorphism_checks() {
    let basic = fixture("basic.json");
    let p = basic.to_str().unwrap();
    let o = covrel(&["check-hom", p, "id", "discrete", "discrete"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("true"));
    let o = covrel(&["check-hom", p, "depolarize", "discrete", "discrete"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness: block (0, 0)"));
    let o = covrel(&["check-hom", p, "depolarize", "complete", "discrete"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn scc_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dec.json");
    let scc = fixture("scc.json");
    let p = scc.to_str().unwrap();
    let o = covrel(&["scc-verify", p, "side_info", "noise", "constant", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valid"));
    assert!(read_json(&out)["channels"]["decoder"].is_object());
    let o = covrel(&["scc-verify", p, "alice_only", "depolarize", "embed"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("invalid"));
    let o = covrel(&["scc-verify", p, "alice_only", "id", "embed"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn supplied_decoder_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dec.json");
    let scc = fixture("scc.json");
    covrel(&["scc-verify", scc.to_str().unwrap(), "side_info", "noise", "constant", "-o", out.to_str().unwrap()]);
    // merge the synthesized decoder back into the bundle and pass it by name
    let mut bundle = read_json(&scc);
    let dec = read_json(&out);
    for (k, v) in dec["systems"].as_object().unwrap() {
        bundle["systems"][k] = v.clone();
    }
    bundle["channels"]["decoder"] = dec["channels"]["decoder"].clone();
    let merged = dir.path().join("merged.json");
    std::fs::write(&merged, bundle.to_string()).unwrap();
    let o = covrel(&["scc-verify", merged.to_str().unwrap(), "side_info", "noise", "constant", "decoder"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).contains("synthesized"));
}

#[test]
fn twirl_makes_a_covariant_channel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let p = fixture("swap_group.json");
    let o = covrel(&["twirl", p.to_str().unwrap(), "biased", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("covariant before twirling: no"));
    let v = read_json(&out);
    let choi = &v["channels"]["biased_twirled"]["choi"];
    assert!((choi["0,0"][0][0][0].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert!((choi["0,1"][0][0][0].as_f64().unwrap() - 0.2).abs() < 1e-12);
    // the output loads as a covariant bundle
    let o = covrel(&["analyze-channel", out.to_str().unwrap(), "biased_twirled"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    assert_eq!(covrel(&["analyze-channel", broken.to_str().unwrap(), "id"]).status.code(), Some(2));
    let basic = fixture("basic.json");
    assert_eq!(covrel(&["analyze-channel", basic.to_str().unwrap(), "missing"]).status.code(), Some(2));
    assert_eq!(covrel(&["twirl", basic.to_str().unwrap(), "id"]).status.code(), Some(2));
    let noncov = dir.path().join("noncov.json");
    let text = std::fs::read_to_string(fixture("swap_group.json")).unwrap().replace("\"covariant\": false, ", "");
    std::fs::write(&noncov, text).unwrap();
    let o = covrel(&["analyze-channel", noncov.to_str().unwrap(), "symmetric"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not covariant"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let basic = fixture("basic.json");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{}.json", k));
        let o = covrel(&["graph-to-channel", basic.to_str().unwrap(), "complete", "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn tolerance_flag_is_validated() {
    let basic = fixture("basic.json");
    assert_eq!(covrel(&["--tol", "2", "analyze-channel", basic.to_str().unwrap(), "id"]).status.code(), Some(2));
    assert_eq!(covrel(&["--tol", "1e-6", "analyze-channel", basic.to_str().unwrap(), "id"]).status.code(), Some(0));
}
