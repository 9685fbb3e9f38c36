use std::path::PathBuf;

use girale_core::cli::{run, Outcome, EXIT_CAPACITY, EXIT_FALSE, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn go(args: &[&str]) -> Outcome {
    run(std::iter::once("girale").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", o.stdout))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("girale-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn built_algebra_file_feeds_consequence() {
    let built = go(&["--json", "build", "--group", "2", "--sig", "none"]);
    assert_eq!(built.code, EXIT_OK);
    let path = scratch("r_z2.json", &built.stdout);
    let p = path.to_str().unwrap();
    let o = go(&["--json", "consequence", "--algebras", p, "--premises", "x*y", "--conclusion", "x"]);
    assert_eq!(o.code, EXIT_FALSE);
    let v = json(&o);
    assert_eq!(v["countermodel"]["assignment"]["x"], "a");
    assert_eq!(v["countermodel"]["assignment"]["y"], "a");
    let o = go(&["check", "--algebras", p, "--conclusion", "x -> x"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout, "holds\n");
}

#[test]
fn class_membership_and_congruences() {
    let o = go(&["--json", "check-class", "--algebra", "R:2x2:full"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(json(&o)["class"], "girale");
    let o = go(&["--json", "member-k", "--algebra", "R:3", "--primes", "2"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(json(&o)["member"], true);
    let o = go(&["--json", "member-k", "--algebra", "R:3", "--primes", "3"]);
    assert_eq!(o.code, EXIT_FALSE);
    assert_eq!(json(&o)["prime"], 3);
    let o = go(&["member-k", "--algebra", "L:3", "--primes", "2"]);
    assert_eq!(o.code, EXIT_FALSE);
    let o = go(&["--json", "congruences", "--algebra", "R:4:none"]);
    assert_eq!(json(&o)["count"], 2);
    assert_eq!(json(&o)["simple"], true);
    assert_eq!(go(&["member-k", "--algebra", "R:3", "--primes", "4"]).code, EXIT_USAGE);
}

#[test]
fn homs_and_amalgams() {
    let o = go(&["--json", "homs", "--from", "R:2:none", "--to", "R:2:none"]);
    assert_eq!(json(&o)["count"], 2);
    let o = go(&["--json", "homs", "--from", "R:3:full", "--to", "R:9:full", "--injective"]);
    assert_eq!(json(&o)["count"], 2);
    let o = go(&["--json", "amalgamate", "--a", "1", "--b", "3", "--c", "5", "--sig", "full", "--primes", "2"]);
    assert_eq!(o.code, EXIT_OK);
    let v = json(&o);
    assert_eq!(v["d_size"], 17);
    assert_eq!(v["strong"], true);
    assert_eq!(go(&["amalgamate", "--a", "2", "--b", "3", "--c", "4"]).code, EXIT_USAGE);
}

#[test]
fn eval_and_interpolate() {
    let o = go(&["eval", "--algebra", "R:3:none", "--formula", "x * y", "--assign", "x=a,y=a"]);
    assert_eq!(o.stdout, "a^2\n");
    assert_eq!(go(&["eval", "--algebra", "R:3", "--formula", "x", "--assign", "x=q"]).code, EXIT_USAGE);
    let o = go(&["--json", "interpolate", "--algebras", "R:2,R:3", "--phi", "x /\\ y", "--psi", "x \\/ z", "--mode", "guarded"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(json(&o)["result"], "found");
    let o = go(&["--json", "interpolate", "--algebras", "R:2", "--phi", "x", "--psi", "y"]);
    assert_eq!(o.code, EXIT_FALSE);
    let o = go(&["--json", "interpolate", "--algebras", "R:2", "--phi", "x * y", "--psi", "x * y \\/ z", "--depth", "0"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(json(&o)["result"], "exhausted");
}

#[test]
fn proofs_from_the_command_line() {
    let o = go(&["--json", "prove", "--sequent", "x, x -> y => y", "--craig-left", "0"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(json(&o)["craig"]["delta"], "x");
    let d = scratch(
        "d.json",
        r#"[{"formula":"1","rule":"A12"},{"formula":"1 -> (x -> x)","rule":"A13"},{"formula":"x -> x","rule":"mp","refs":[1,2]}]"#,
    );
    let o = go(&["check-proof", "--file", d.to_str().unwrap(), "--system", "FLe"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let bad = scratch("bad.json", r#"[{"formula":"x -> y","rule":"A1"}]"#);
    let o = go(&["--json", "check-proof", "--file", bad.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_FALSE);
    assert_eq!(json(&o)["step"], 1);
    assert_eq!(json(&o)["reason"]["kind"], "no-matching-substitution");
    let ext = scratch("ext.json", r#"[{"formula":"x -> 1","rule":"I"}]"#);
    let o = go(&["check-proof", "--file", ext.to_str().unwrap(), "--system", "RLe", "--axiom", "I=a -> 1"]);
    assert_eq!(o.code, EXIT_OK);
}

#[test]
fn malformed_input_never_panics() {
    let garbage = scratch("garbage.json", "{ not json");
    for args in [
        vec!["check-class", "--algebra", garbage.to_str().unwrap()],
        vec!["check-class", "--algebra", "/nonexistent/file.json"],
        vec!["check-proof", "--file", garbage.to_str().unwrap()],
        vec!["prove", "--sequent", "x => => y"],
        vec!["prove", "--sequent", "!x => x"],
        vec!["prove", "--sequent", "x => x", "--bound", "0"],
        vec!["build", "--group", "0"],
        vec!["build", "--group", "3", "--sig", "nonsense"],
        vec!["--notation", "klingon", "parse", "x"],
        vec!["eval", "--algebra", "L:1", "--formula", "x"],
        vec!["catalog", "--spans"],
    ] {
        let o = go(&args);
        assert_eq!(o.code, EXIT_USAGE, "{args:?}: {}", o.stderr);
    }
    let o = go(&["--json", "build", "--group", "100"]);
    assert_eq!(o.code, EXIT_CAPACITY);
    assert_eq!(json(&o)["exit"], EXIT_CAPACITY);
}

#[test]
fn catalog_batch_is_deterministic_across_jobs() {
    let one = go(&["--json", "catalog", "--primes", "2", "--max-order", "7", "--spans"]);
    assert_eq!(one.code, EXIT_OK);
    let four = go(&["--json", "--jobs", "4", "catalog", "--primes", "2", "--max-order", "7", "--spans"]);
    let strip = |o: &Outcome| {
        let mut v = json(o);
        v.as_object_mut().unwrap().remove("meta");
        v
    };
    assert_eq!(strip(&one), strip(&four));
    assert_eq!(one.stdout, go(&["--json", "catalog", "--primes", "2", "--max-order", "7", "--spans"]).stdout);
    let o = go(&["--json", "catalog", "--max-order", "4"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(json(&o)["all_pass"], true);
}
