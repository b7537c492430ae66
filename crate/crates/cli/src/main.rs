use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Command};
use gossip_cli::config::{ExperimentConfig, GraphSpec, Origin, RawConfig, KEYS};
use gossip_cli::run::{emit, run_experiment};
use gossip_cli::verify::{verify_suite, Level};
use gossip_cli::{spanner_from_dump, CliError};
use gossip_core::graph::{generate, write_edge_list, Family, Graph};

fn cli() -> Command {
    let run = KEYS.iter().fold(
        Command::new("run")
            .about("Run an experiment matrix and write CSV rows")
            .arg(Arg::new("config").long("config").value_name("FILE").help("key = value config file")),
        |cmd, key| cmd.arg(Arg::new(*key).long(*key).value_name("VALUE")),
    );
    Command::new("gossip")
        .about("GOSSIP/LOCAL simulator and protocol runner")
        .subcommand_required(true)
        .subcommand(run)
        .subcommand(
            Command::new("verify")
                .about("Run the invariant battery")
                .arg(Arg::new("level").long("level").default_value("quick").value_parser(["quick", "full"]))
                .arg(Arg::new("corpus").long("corpus").value_name("DIR").help("extra edge-list files to check")),
        )
        .subcommand(
            Command::new("gen")
                .about("Emit a generated graph as an edge list")
                .arg(Arg::new("family").required(true).help("e.g. er:128:0.05:1, dumbbell:6, figure1:100:3"))
                .arg(Arg::new("output").long("output").short('o').value_name("FILE")),
        )
        .subcommand(
            Command::new("spanner")
                .about("Extract and certify a spanner from a trace dump")
                .arg(Arg::new("graph").long("graph").value_name("FAMILY").conflicts_with("graph-file"))
                .arg(Arg::new("graph-file").long("graph-file").value_name("FILE"))
                .arg(Arg::new("traces").long("traces").value_name("FILE").required(true))
                .arg(Arg::new("output").long("output").short('o').value_name("FILE")),
        )
}

fn write_out(text: &str, path: Option<&String>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{p}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(m: &ArgMatches) -> Result<ExitCode, CliError> {
    let mut raw = match m.get_one::<String>("config") {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Io(format!("{p}: {e}")))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    for key in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            raw.set(key, v, Origin::Flag)?;
        }
    }
    let cfg = ExperimentConfig::from_raw(&raw)?;
    let summary = run_experiment(&cfg)?;
    for r in summary.rows.iter().filter(|r| r.note.is_some()) {
        eprintln!("{} {} seed {}: {}", r.protocol, r.graph, r.seed, r.note.as_deref().unwrap_or_default());
    }
    emit(&summary.rows, cfg.output.as_deref())?;
    let failures = summary.failures();
    if failures > 0 {
        eprintln!("{failures} run(s) violated an invariant");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_graph(m: &ArgMatches) -> Result<Graph, CliError> {
    let spec = match (m.get_one::<String>("graph"), m.get_one::<String>("graph-file")) {
        (Some(d), _) => GraphSpec::Family(d.parse().map_err(|e| CliError::Usage(format!("--graph: {e}")))?),
        (None, Some(p)) => GraphSpec::File(PathBuf::from(p)),
        (None, None) => return Err(CliError::Usage("one of --graph or --graph-file is required".into())),
    };
    spec.load().map_err(|e| CliError::Load(format!("{}: {e}", spec.label())))
}

fn dispatch(matches: &ArgMatches) -> Result<ExitCode, CliError> {
    match matches.subcommand() {
        Some(("run", m)) => run(m),
        Some(("verify", m)) => {
            let level: Level = m.get_one::<String>("level").expect("defaulted").parse().map_err(CliError::Usage)?;
            let report = verify_suite(level, m.get_one::<String>("corpus").map(Path::new));
            println!("{report}");
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Some(("gen", m)) => {
            let desc = m.get_one::<String>("family").expect("required");
            let family: Family = desc.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
            let g = generate(&family).map_err(|e| CliError::Usage(format!("{e}")))?;
            write_out(&write_edge_list(&g, &[family.to_string()]), m.get_one("output"))?;
            Ok(ExitCode::SUCCESS)
        }
        Some(("spanner", m)) => {
            let g = load_graph(m)?;
            let (s, text) = spanner_from_dump(&g, Path::new(m.get_one::<String>("traces").expect("required")))?;
            write_out(&text, m.get_one("output"))?;
            match s.certified_stretch {
                Some((a, b)) => {
                    eprintln!("certified ({a}, {b}) spanner, {} of {} edges, density {}", s.subgraph.m(), g.m(), s.density);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("spanner stretch could not be certified");
                    Ok(ExitCode::from(1))
                }
            }
        }
        _ => unreachable!("subcommand required"),
    }
}

fn main() -> ExitCode {
    match dispatch(&cli().get_matches()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
