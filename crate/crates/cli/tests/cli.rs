use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gossip_cli::run::HEADER;

fn gossip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gossip")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), HEADER);
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn col(name: &str) -> usize {
    HEADER.iter().position(|h| *h == name).unwrap()
}

#[test]
fn superstep_sweep_on_random_graph() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    let out = dir.path().join("rows.csv");
    fs::write(&cfg, format!("# sweep\ngraph = er:128:0.05:1\nprotocol = superstep\nseeds = 0..30\noutput = {}\n", out.display()))
        .unwrap();
    let o = gossip(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("protocol,graph,n,m,seed,tau,epsilon,rounds,iterations,messages,completed,invariants_ok\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 30);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[col("protocol")], "superstep");
        assert_eq!(r[col("seed")], i.to_string());
        assert_eq!(r[col("n")], "128");
        assert_eq!(r[col("completed")], "true");
        assert_eq!(r[col("invariants_ok")], "true");
    }
}

#[test]
fn output_is_identical_across_invocations_and_thread_counts() {
    let args = |threads: &'static str| {
        vec![
            "run",
            "--graph",
            "dumbbell:5, er:40:0.2:3",
            "--protocol",
            "superstep,direct-exchange,baseline,rumor,sim-round-robin,sim-spanner-direct-exchange",
            "--algorithm",
            "bfs",
            "--seeds",
            "3,1,2",
            "--threads",
            threads,
        ]
    };
    let a = gossip(&args("1"));
    let b = gossip(&args("4"));
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let rows = rows(&stdout(&a));
    assert_eq!(rows.len(), 2 * 6 * 3);
    let order: Vec<(String, String, String)> =
        rows.iter().map(|r| (r[col("graph")].clone(), r[col("protocol")].clone(), r[col("seed")].clone())).collect();
    assert_eq!(order[0], ("dumbbell:5".into(), "superstep".into(), "1".into()));
    assert_eq!(order[2].2, "3");
    assert_eq!(order[3].1, "direct-exchange");
    assert_eq!(order[18].0, "er:40:0.2:3");
    assert!(rows.iter().all(|r| r[col("invariants_ok")] == "true" && r[col("completed")] == "true"));
}

#[test]
fn invalid_protocol_exits_with_two() {
    let o = gossip(&["run", "--graph", "path:5", "--protocol", "push-pull"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown protocol `push-pull`"));
    assert!(o.stdout.is_empty());
}

#[test]
fn config_diagnostics_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "graph = path:5\nprotocl = superstep\n").unwrap();
    let o = gossip(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2: unknown key `protocl`"), "{}", stderr(&o));

    fs::write(&cfg, "graph = path:5\nprotocol = direct-exchange\nepsilon = 1.5\n").unwrap();
    let o = gossip(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));

    let o = gossip(&["run", "--config", cfg.to_str().unwrap(), "--epsilon", "0.25"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(rows(&stdout(&o))[0][col("epsilon")], "0.25");

    let o = gossip(&["run", "--graph", "path:5", "--protocol", "superstep", "--speed", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_graph_file_is_a_load_error() {
    let o = gossip(&["run", "--graph-file", "/nonexistent/graph.txt", "--protocol", "superstep"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("/nonexistent/graph.txt"));
}

#[test]
fn baseline_grows_on_figure1() {
    let o = gossip(&["run", "--graph", "figure1:100:3,figure1:400:3", "--protocol", "baseline,superstep", "--seeds", "0..11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = rows(&stdout(&o));
    let median = |graph: &str, protocol: &str| {
        let mut r: Vec<usize> = rows
            .iter()
            .filter(|r| r[col("graph")] == graph && r[col("protocol")] == protocol)
            .map(|r| r[col("rounds")].parse().unwrap())
            .collect();
        r.sort_unstable();
        r[r.len() / 2]
    };
    let ratio = median("figure1:400:3", "baseline") as f64 / median("figure1:100:3", "baseline") as f64;
    assert!(ratio >= 3.0, "ratio {ratio}");
    assert!(rows.iter().filter(|r| r[col("protocol")] == "superstep").all(|r| r[col("completed")] == "true"));
}

#[test]
fn gen_then_spanner_from_trace_dump() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("d6.txt");
    let traces = dir.path().join("traces");
    let o = gossip(&["gen", "dumbbell:6", "-o", graph.to_str().unwrap()]);
    assert!(o.status.success());
    let o = gossip(&[
        "run",
        "--graph-file",
        graph.to_str().unwrap(),
        "--protocol",
        "superstep",
        "--seeds",
        "4",
        "--trace-dir",
        traces.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dumps: Vec<_> = fs::read_dir(&traces).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dumps.len(), 1);
    let rounds = &rows(&stdout(&o))[0][col("rounds")];

    let o = gossip(&["spanner", "--graph", "dumbbell:6", "--traces", dumps[0].to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains(&format!("# T={rounds}\n")));
    assert!(text.contains(&format!("# alpha={rounds}\n# beta=0\n")));
    let s = gossip_core::graph::parse_edge_list(&text).unwrap();
    assert_eq!(s.n(), 12);

    // A dump recorded on a different graph does not match.
    let o = gossip(&["spanner", "--graph", "path:12", "--traces", dumps[0].to_str().unwrap()]);
    assert!(!o.status.success());
}

fn write_corpus(dir: &Path) {
    let g = gossip(&["gen", "cycle:9"]);
    fs::write(dir.join("a_cycle.txt"), &g.stdout).unwrap();
    fs::write(dir.join("b_broken.txt"), "4 2\n0 1\n1 seven\n").unwrap();
}

#[test]
fn verify_reports_corrupted_corpus_file() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path());
    let o = gossip(&["verify", "--level", "quick", "--corpus", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL load"), "{out}");
    assert!(out.contains("b_broken.txt"));
    assert!(out.contains("PASS reversal"));
    assert!(out.contains("PASS superstep"));
    assert!(!stderr(&o).contains("panicked"));
}

#[test]
fn verify_quick_passes() {
    let o = gossip(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("5 passed, 0 failed\n"));
}
