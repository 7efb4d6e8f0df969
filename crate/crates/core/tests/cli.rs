use bellpoly::cli;

fn call(args: &[&str]) -> (i32, String, String) {
    let args: Vec<String> = std::iter::once("bellpoly").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(&args, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(format!("bellpoly-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn decompose_empirical_table() {
    let (code, out, err) = call(&["decompose", &data("empirical_weak_violation.json")]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("p_PR = 0.0000237"), "{out}");
    assert!(out.lines().any(|l| l.trim_start().starts_with("D14") && l.contains("(743/10000000)")), "{out}");
    assert!(err.contains("rounded input"), "{err}");
}

#[test]
fn json_output_is_deterministic_and_parseable() {
    let file = data("empirical_weak_violation.json");
    let (c1, a, _) = call(&["--format", "json", "decompose", &file]);
    let (c2, b, _) = call(&["--format", "json", "decompose", &file]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["result"]["p_pr"]["exact"], "237/10000000");
    assert_eq!(v["result"]["pr_term"]["box"]["index"], 1);
}

#[test]
fn vertex_enumeration_matches_catalogs() {
    let (code, out, _) = call(&["vertices", "--n", "2", "--verify"]);
    assert_eq!(code, 0);
    assert!(out.contains("24 vertices; catalogs match"), "{out}");
    let (code, _, err) = call(&["vertices", "--n", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("slow"), "{err}");
}

#[test]
fn critical_efficiency_of_pr1() {
    let (code, out, _) = call(&["eta-critical", &data("pr1.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("0.666666667"), "{out}");
    assert!(out.contains("CHSH(2/3) = 2"), "{out}");
}

#[test]
fn one_sided_loss_keeps_rows_normalized() {
    let (code, out, _) = call(&["eta", "--value", "1", "--value-b", "1/2", &data("pr1.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("a1b1   0.25  0.25  0  0.5"), "{out}");
}

#[test]
fn chained_commands_on_sample() {
    let file = data("chained_n3.json");
    let (code, out, _) = call(&["tightness", &file]);
    assert_eq!(code, 0);
    assert!(out.contains("local weight 0.1 equals chained value 0.1"), "{out}");
    let (code, out, _) = call(&["chained-value", &file]);
    assert_eq!(code, 0);
    assert!(out.contains("0.1"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["validate", &data("pr1.json")]).0, 0);
    assert_eq!(call(&["validate", "/definitely/not/here.json"]).0, 2);
    assert_eq!(call(&["validate", &scratch("garbled.json", "{ not json")]).0, 2);
    assert_eq!(call(&["validate", &scratch("short.json", r#"{"n":2,"rows":[]}"#)]).0, 2);
    let signaling = r#"{"n":2,"rows":[
        {"setting":"ab","values":[1,0,0,0]},
        {"setting":"ab'","values":[0,0,0,1]},
        {"setting":"a'b","values":[0.5,0,0,0.5]},
        {"setting":"a'b'","values":[0.5,0,0,0.5]}]}"#;
    let (code, out, _) = call(&["validate", &scratch("signaling.json", signaling)]);
    assert_eq!(code, 1, "{out}");
    // local input has nothing to estimate
    assert_eq!(call(&["estimator", &data("pr_mixture.json")]).0, 1);
    assert_ne!(call(&["no-such-command"]).0, 0);
}
