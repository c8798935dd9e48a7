use std::process::{Command, Output};

use serde_json::Value;
use weylcalc::functional_calculus::{labeled_jets, JetSeries, JetSeriesJson};
use weylcalc::graphs::{GraphJson, LabeledGraph};
use weylcalc::phase::{parse_symbol, HbarSeries, PolynomialJson, SeriesJson};
use weylcalc::star_products::StarConfig;
use weylcalc::{GaussianRational, Poly};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylcalc"))
        .args(args)
        .env_remove("WEYLCALC_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).expect("valid json")
}

fn series_round_trip(v: &Value) -> HbarSeries<Poly> {
    let wire: SeriesJson = serde_json::from_value(v.clone()).unwrap();
    let s = HbarSeries::<Poly>::from_json(&wire).unwrap();
    assert_eq!(serde_json::to_value(s.to_json()).unwrap(), *v);
    s
}

#[test]
fn zag_prints_sequence() {
    assert_eq!(stdout(&["zag", "--k", "5"]).trim(), "1 2 16 272 7936");
    assert_eq!(stdout(&["zag", "--k", "5", "--route", "bernoulli"]).trim(), "1 2 16 272 7936");
}

#[test]
fn graph_enumeration_counts_and_round_trips() {
    assert_eq!(stdout(&["graphs", "enum", "--edges", "4", "--reduced"]).lines().count(), 15);
    let rows = json(&["graphs", "enum", "--edges", "4", "--reduced", "--connected", "--format", "json"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    for r in rows {
        let wire: GraphJson = serde_json::from_value(r["graph"].clone()).unwrap();
        let g = LabeledGraph::from_json(&wire).unwrap();
        assert_eq!(serde_json::to_value(g.to_json()).unwrap(), r["graph"]);
    }
    let star = json(&["graphs", "invariants", "--graph", "1-2,1-3,1-4,1-5", "--format", "json"]);
    assert_eq!(star[0]["S"], 24);
    // canonical orientation points every arrow away from the center
    assert_eq!(star[0]["c"], 24);
}

#[test]
fn expand_square_equals_star() {
    let e = json(&["expand", "--order", "2", "--symbol", "x^2+p^2", "--function", "poly:0,0,1"]);
    let s = json(&["star", "--order", "2", "--left", "x^2+p^2", "--right", "x^2+p^2"]);
    assert_eq!(e, s);
    let series = series_round_trip(&e);
    assert_eq!(series.coeff(2), parse_symbol::<GaussianRational>("-1", Some(1)).unwrap());
}

#[test]
fn abstract_expansion_matches_library() {
    let v = json(&["expand", "--symbol", "x^3 + p^2", "--order", "4"]);
    let wire: JetSeriesJson = serde_json::from_value(v.clone()).unwrap();
    let jets = JetSeries::<GaussianRational>::from_json(&wire, 1).unwrap();
    assert_eq!(serde_json::to_value(jets.to_json()).unwrap(), v);
    let a = HbarSeries::constant(4, parse_symbol("x^3 + p^2", Some(1)).unwrap()).unwrap();
    assert_eq!(jets, labeled_jets(&a, &StarConfig::moyal(1, 4).unwrap()).unwrap());
}

#[test]
fn order_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_weylcalc"))
        .args(["star", "--left", "x", "--right", "p"])
        .env("WEYLCALC_ORDER", "1")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], 1);
}

#[test]
fn lambda_and_text_output() {
    let v = json(&["lambda", "--graph", "1->2,1->2", "--symbol", "x^2/2 + p^2/2"]);
    let wire: PolynomialJson = serde_json::from_value(v).unwrap();
    assert_eq!(Poly::from_json(&wire).unwrap(), parse_symbol("2", Some(1)).unwrap());
    let text = stdout(&["star", "--order", "2", "--left", "x", "--right", "p", "--format", "text"]);
    assert!(text.starts_with("hbar^0: "));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn other_json_outputs_parse() {
    for args in [
        vec!["expand", "--symbol", "x^2+p^2", "--function", "exp:1", "--order", "2"],
        vec!["expand", "--symbol", "x^2+p^2", "--function", "resolvent", "--order", "2"],
        vec!["quadratic", "--q", "1,0;0,1", "--order", "4"],
        vec!["quadratic", "--q", "1,0;0,1", "--time", "3"],
        vec!["bs", "--potential", "x^2/2", "--levels", "2", "--format", "json"],
        vec!["verify", "--check", "2", "--format", "json"],
    ] {
        let v = json(&args);
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
        if let Some(c) = v.get("cofactor") {
            series_round_trip(c);
        }
    }
}

#[test]
fn bs_csv_harmonic() {
    let text = stdout(&["bs", "--potential", "x^2/2", "--hbar", "0.5", "--levels", "3", "--compare-oracle"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,E_bs0,E_bs2,E_bs4,E_oracle,abs_err");
    for (k, line) in lines.enumerate() {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let want = 0.5 * (k as f64 + 0.5);
        for e in &cells[1..5] {
            assert!((e - want).abs() < 1e-7, "{line}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["zag", "--k", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["star", "--order", "9", "--left", "x", "--right", "p"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "--symbol", "x^^2"]).status.code(), Some(2));
    assert_eq!(run(&["bs", "--potential", "x^3", "--levels", "1"]).status.code(), Some(2));
    assert_eq!(run(&["bs", "--potential", "x^4", "--order", "3"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--check", "42"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    let ok = run(&["verify", "--check", "1", "--check", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("2 of 2 checks passed"));
}
