use std::process::Command;

use msdim::asymptotics::y1;
use msdim::{multiset_signature, Graph};
use msdim_cli::format::{
    read_campaign_csv, read_census_csv, read_curves_csv, read_expansion_csv, read_signature_csv,
};
use msdim_cli::{config_path, run_args, ExperimentConfig};

fn run(args: &[&str]) -> Vec<u8> {
    let mut full = vec!["msdim"];
    full.extend_from_slice(args);
    run_args(full).unwrap().into_result().unwrap()
}

fn text(args: &[&str]) -> String {
    String::from_utf8(run(args)).unwrap()
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_msdim"))
        .args(args)
        .output()
        .unwrap()
}

fn write_graph(dir: &tempfile::TempDir, name: &str, g: &Graph) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, g.to_edge_list_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn gen_extremes() {
    let full = text(&["gen", "--n", "5", "--p", "1"]);
    assert_eq!(full.lines().next(), Some("5 10"));
    assert_eq!(full.lines().count(), 11);
    assert_eq!(text(&["gen", "--n", "5", "--p", "0"]), "5 0\n");
}

#[test]
fn exact_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p4 = write_graph(&dir, "p4", &Graph::path(4));
    let v: serde_json::Value = serde_json::from_slice(&run(&["exact", "--graph", &p4])).unwrap();
    assert_eq!(v["beta"], 1);
    assert_eq!(v["beta_ms"], 1);
    let k4 = write_graph(&dir, "k4", &Graph::complete(4));
    let v: serde_json::Value = serde_json::from_slice(&run(&["exact", "--graph", &k4])).unwrap();
    assert_eq!(v["beta"], 3);
    assert_eq!(v["beta_ms_out"], 3);
    assert_eq!(v["beta_ms"], "inf");
    assert!(v["witnesses"]["beta_ms"].is_null());
}

#[test]
fn curves_contain_the_half_point() {
    let rows = read_curves_csv(run(&["curves", "--points", "100"]).as_slice()).unwrap();
    assert!(rows
        .iter()
        .any(|r| r.level() == 1.0 && r.x() == 0.5 && (r.y() - 0.75).abs() < 1e-9));
    assert!(rows
        .iter()
        .filter(|r| r.level() == 4.0)
        .all(|r| r.x() <= 0.125));
    for r in rows.iter().filter(|r| r.level() == 1.0) {
        assert!((r.y() - y1(r.x()).unwrap()).abs() < 1e-9);
    }

    let exact =
        read_curves_csv(run(&["curves", "--points", "100", "--rational"]).as_slice()).unwrap();
    assert!(exact
        .iter()
        .any(|r| r.x == "1/2" && r.y == "3/4" && r.level == "1"));
    assert!(exact
        .iter()
        .any(|r| r.x == "1/3" && r.y == "2/3" && r.level == "1"));
}

#[test]
fn localize_sweep_recovers_every_source() {
    let dir = tempfile::tempdir().unwrap();
    let p10 = write_graph(&dir, "p10", &Graph::path(10));
    let out = text(&["localize", "--graph", &p10]);
    let lines: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 10);
    for line in lines {
        assert_eq!(line["recovered"], serde_json::json!([line["source"]]));
    }
}

#[test]
fn campaign_with_no_trials_is_a_header() {
    let out = text(&[
        "campaign",
        "--experiment",
        "census",
        "--trials",
        "0",
        "--n",
        "50",
        "--x",
        "0.5",
    ]);
    assert_eq!(out, "trial,seed,n,x,experiment,success,value,extra\n");
}

#[test]
fn campaign_rows_round_trip() {
    let out = run(&[
        "campaign",
        "--experiment",
        "failure_rate",
        "--trials",
        "3",
        "--n",
        "60",
        "--x",
        "0.5",
        "--samples",
        "5",
    ]);
    let rows = read_campaign_csv(out.as_slice()).unwrap();
    assert_eq!(rows.len(), 3);
    for (t, row) in rows.iter().enumerate() {
        assert_eq!(row.trial, t as u64);
        assert_eq!(row.x, "0.5");
        assert!((0.0..=1.0).contains(&row.value));
    }
}

#[test]
fn census_and_expansion_round_trip() {
    let census =
        read_census_csv(run(&["census", "--n", "300", "--x", "0.4", "--seed", "5"]).as_slice())
            .unwrap();
    assert!(!census.is_empty());
    assert_eq!(census[0].level, 0);
    assert!(census.windows(2).all(|w| w[0].typical == w[1].typical));

    let rows = read_expansion_csv(
        run(&["expansion", "--n", "400", "--x", "0.5", "--samples", "20"]).as_slice(),
    )
    .unwrap();
    let level0 = rows
        .iter()
        .find(|r| r.level == 0 && r.set_size == 1)
        .unwrap();
    assert_eq!(level0.mean_ratio, 1.0);
    assert_eq!(level0.samples, 20);
}

#[test]
fn signature_dump_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let g = Graph::cycle(7);
    let path = write_graph(&dir, "c7", &g);
    let rows =
        read_signature_csv(run(&["signatures", "--graph", &path, "--sensors", "0,2"]).as_slice())
            .unwrap();
    assert_eq!(rows.len(), 7);
    for (v, counts) in rows {
        assert_eq!(
            counts,
            multiset_signature(&g, &[0, 2], v).unwrap().coordinates()
        );
    }
}

#[test]
fn out_writes_body_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = out.to_str().unwrap();
    let res = run_args([
        "msdim",
        "curves",
        "--points",
        "20",
        "--out",
        o,
        "--threads",
        "2",
    ])
    .unwrap();
    assert!(res.written);
    assert_eq!(std::fs::read(&out).unwrap(), res.body);
    let cfg = ExperimentConfig::load(&config_path(&out)).unwrap();
    assert_eq!(cfg.points, Some(20));
    assert_eq!(cfg.levels, Some(vec![1, 4]));
    assert_eq!(cfg.threads, None);
    assert_eq!(cfg.out, None);

    // the stored config replays to the same bytes
    let again = run_args([
        "msdim",
        "--config",
        config_path(&out).to_str().unwrap(),
        "curves",
    ])
    .unwrap();
    assert_eq!(again.body, res.body);
}

#[test]
fn randomized_replays_from_seed() {
    let args = [
        "randomized",
        "--n",
        "200",
        "--x",
        "0.5",
        "--seed",
        "11",
        "--format",
        "csv",
    ];
    let a = run_args(std::iter::once("msdim").chain(args)).unwrap();
    let b = run_args(std::iter::once("msdim").chain(args)).unwrap();
    assert_eq!(a.body, b.body);
    assert_eq!(a.config.r, b.config.r);
}

#[test]
fn exit_codes() {
    let ok = bin(&["gen", "--n", "4", "--p", "0.5"]);
    assert_eq!(ok.status.code(), Some(0));

    assert_eq!(
        bin(&["exact", "--n", "30", "--x", "0.5"]).status.code(),
        Some(3)
    );
    assert_eq!(bin(&["gen", "--n", "4"]).status.code(), Some(2));
    assert_eq!(bin(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        bin(&["exact", "--graph", "/nonexistent/graph.txt"])
            .status
            .code(),
        Some(5)
    );

    let dir = tempfile::tempdir().unwrap();
    let p4 = write_graph(&dir, "p4", &Graph::path(4));
    let not = bin(&["verify", "--graph", &p4, "--sensors", "0,3"]);
    assert_eq!(not.status.code(), Some(4));
    // the verdict is still printed
    let v: serde_json::Value = serde_json::from_slice(&not.stdout).unwrap();
    assert_eq!(v["resolving"], false);
    assert_eq!(
        bin(&["verify", "--graph", &p4, "--sensors", "0"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        bin(&["verify", "--graph", &p4, "--sensors", "0,9"])
            .status
            .code(),
        Some(2)
    );
}
