use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clusterhom"))
        .args(args)
        .env_remove("CLUSTERHOM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn types_count_table() {
    let o = run(&["types-count", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1,1,2,6,22\n");
}

#[test]
fn types_count_uniform_verified() {
    let o = run(&["types-count", "--n", "4", "--k", "2", "--verify", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "weight,count\n1,1\n2,2\n3,10\n4,74\n");
}

#[test]
fn factorize_mixed_partition() {
    let o = run(&["factorize", "--partition", "1,5,7|2,4|3,8|6|9,10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let weights: Vec<u64> = v["factors"].as_array().unwrap().iter().map(|f| f["weight"].as_u64().unwrap()).collect();
    assert_eq!(weights, vec![4, 1]);
}

#[test]
fn stable_degree_zero() {
    let o = run(&["stable", "--k", "1", "--p", "1", "--max-degree", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["degrees"][0]["betti"], 1);
    assert_eq!(v["degrees"][0]["torsion"], serde_json::json!([]));
}

#[test]
fn stable_beyond_point_budget_is_partial() {
    let o = run(&["stable", "--k", "1", "--p", "1", "--max-degree", "3", "--max-points", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.starts_with("degree"));
    assert!(text.lines().count() >= 2);
}

#[test]
fn colored_homology_csv() {
    let o = run(&["colored-homology", "--alpha", "a:2", "--d", "2", "--parity", "a:1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "degree,cells,group,betti,torsion\n0,1,Z/2,0,2\n1,1,0,0,\n");
}

#[test]
fn colored_homology_json_input_matches_flags() {
    let input = r#"{"alpha":[{"colour":"x","count":2}],"d":3}"#;
    let a = run(&["colored-homology", "--input", input]);
    let b = run(&["colored-homology", "--alpha", "x:2", "--d", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn chi_of_a_configuration() {
    let config = r#"{"d":1,"clusters":[{"points":[["1/4"],["3/4"]],"label":1},{"points":[["1/2"]],"label":1}]}"#;
    let o = run(&["chi", "--config", config, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["chi"], "1,3|2");
    assert_eq!(v["faces"][1]["chi"], "1,2");
}

#[test]
fn bar_homology_matches_formula() {
    let o = run(&["bar-homology", "--labels", "1:2,2:1", "--n", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["homology"][1]["betti"], v["formula_degree_one_rank"]);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["factorize", "--partition", "1|1"]).status.code(), Some(1));
    assert_eq!(run(&["types-count", "--n", "3", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(run(&["colored-homology", "--input", "{not json"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bound_exceeded_exits_two() {
    assert_eq!(run(&["types-enum", "--n", "13"]).status.code(), Some(2));
}

#[test]
fn selftest_is_identical_across_thread_counts() {
    let outs: Vec<Output> = ["1", "4", "8"]
        .iter()
        .map(|t| run(&["selftest", "--seed", "7", "--threads", t]))
        .collect();
    for o in &outs {
        assert_eq!(o.status.code(), Some(0), "{}", stdout(o));
        assert_eq!(o.stdout, outs[0].stdout);
    }
}
