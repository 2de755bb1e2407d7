use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use conics_core::census::{Census, CensusRun, Record};
use conics_core::io::{lattice_to_json, parse_lattice};
use conics_core::real::{has_u2_summand_genus, real_structures};
use conics_core::tables::{compare, record_cells, split_rigid, Cells, TableDiff, CODIM1_ROWS, CODIM2_ROWS, RIGID_LARGE, RIGID_OTHER};
use conics_core::{Error, FloatPolarized};

#[derive(Parser)]
#[command(name = "conics", about = "Lines and conics on polarized Kummer octics", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for output files; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Print the minimal lattice as JSON.
    Build,
    /// Fano graph of a lattice given as JSON.
    Fano { path: PathBuf },
    /// Classify strata up to the given codimension.
    Census {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        codim: u8,
    },
    /// Recompute all strata and compare with the reference tables.
    VerifyTables,
    /// Real structures on the rigid octics.
    Real,
    /// Depth of the polarization of a lattice given as JSON.
    Depth { path: PathBuf },
}

enum Failure {
    Mismatch(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: &Option<PathBuf>, name: &str, text: &str) -> Outcome {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn cmd_build(cli: &Cli) -> Outcome {
    let c = Census::new()?;
    let text = lattice_to_json(&c.lambda.lattice)? + "\n";
    emit(&cli.out, "minimal.json", &text)
}

fn cmd_fano(cli: &Cli, path: &Path) -> Outcome {
    let lattice = parse_lattice(&read(path)?)?;
    let pol = FloatPolarized::new(lattice)?;
    let g = pol.fano_graph()?;
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&g.to_json()).map_err(Error::from)? + "\n",
        Format::Dot => g.to_dot(),
        Format::Csv => {
            let conics = if g.n_reducible() > 0 {
                format!("{}+{}", g.n_reducible(), g.n_conics())
            } else {
                format!("0+{}", g.n_conics())
            };
            format!("{} lines, {} conics, depth {}\n", g.n_lines(), conics, pol.depth())
        }
    };
    emit(&cli.out, "fano.txt", &text)
}

fn cmd_depth(cli: &Cli, path: &Path) -> Outcome {
    let lattice = parse_lattice(&read(path)?)?;
    emit(&cli.out, "depth.txt", &format!("{}\n", lattice.depth()?))
}

fn rows_text(format: Format, records: &[Record]) -> Result<String, Error> {
    Ok(match format {
        Format::Json => {
            let rows: Vec<_> = records
                .iter()
                .map(|r| serde_json::json!({ "summary": r.summary(), "row": record_cells(r) }))
                .collect();
            serde_json::to_string_pretty(&rows)? + "\n"
        }
        Format::Csv => {
            let mut s = String::from(Cells::header());
            s.push('\n');
            for r in records {
                s.push_str(&record_cells(r).to_csv());
                s.push('\n');
            }
            s
        }
        Format::Dot => records.iter().map(|r| r.graph.to_dot()).collect(),
    })
}

fn cmd_census(cli: &Cli, codim: usize) -> Outcome {
    let c = Census::new()?;
    let run = c.run(codim)?;
    for k in 1..=codim {
        let text = rows_text(cli.format, run.level(k))?;
        let ext = match cli.format {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
        };
        emit(&cli.out, &format!("codim{k}.{ext}"), &text)?;
    }
    Ok(())
}

fn diffs(run: &CensusRun) -> Vec<TableDiff> {
    let cells = |rs: &[&Record]| rs.iter().map(|r| record_cells(r)).collect::<Vec<_>>();
    let l1: Vec<&Record> = run.level(1).iter().collect();
    let l2: Vec<&Record> = run.level(2).iter().collect();
    let (big, small) = split_rigid(run.level(3));
    vec![
        compare("codimension 1", CODIM1_ROWS, &cells(&l1)),
        compare("codimension 2", CODIM2_ROWS, &cells(&l2)),
        compare("rigid, more than 80 conics", RIGID_LARGE, &cells(&big)),
        compare("rigid, other", RIGID_OTHER, &cells(&small)),
    ]
}

fn cmd_verify_tables(cli: &Cli) -> Outcome {
    let c = Census::new()?;
    let run = c.run(3)?;
    let ds = diffs(&run);
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&ds).map_err(Error::from)? + "\n",
        _ => {
            let mut s = String::new();
            for d in &ds {
                let status = if d.is_match() { "ok" } else { "MISMATCH" };
                s += &format!("{}: {status} ({} reference rows, {} computed)\n", d.name, d.expected, d.computed);
                for m in &d.missing {
                    s += &format!("  - {}\n", m.to_csv());
                }
                for m in &d.extra {
                    s += &format!("  + {}\n", m.to_csv());
                }
                s += &format!("  skipped: {}\n", d.skipped.join(", "));
            }
            s
        }
    };
    emit(&cli.out, "verify.txt", &text)?;
    if ds.iter().all(|d| d.is_match()) {
        Ok(())
    } else {
        Err(Failure::Mismatch("tables differ".into()))
    }
}

fn cmd_real(cli: &Cli) -> Outcome {
    let c = Census::new()?;
    let run = c.run(3)?;
    let mut rows = Vec::new();
    for r in run.level(3) {
        for rep in real_structures(r)? {
            rows.push((record_cells(r), rep));
        }
    }
    let best = rows.iter().map(|(_, r)| r.max_real_conics).max().unwrap_or(0);
    let maxr1 = run
        .level(2)
        .iter()
        .filter(|r| has_u2_summand_genus(r, 40))
        .map(|r| r.conics() + r.reducible())
        .max();
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "records": rows.iter().map(|(c, r)| serde_json::json!({"row": c, "real": r})).collect::<Vec<_>>(),
            "max_real_conics": best,
            "u2_plus_40_max_conics": maxr1,
        }))
        .map_err(Error::from)?
            + "\n",
        _ => {
            let mut s = String::from("clusters;conics;T;involutions;realized;max_real_conics;max_real_lines\n");
            for (c, r) in &rows {
                s += &format!(
                    "{};{};{};{};{};{};{}\n",
                    c.clusters, c.conics, r.transcendental, r.involutions, r.realized, r.max_real_conics, r.max_real_lines
                );
            }
            s += &format!("maximum real conics (rigid): {best}\n");
            s += &format!("conics with T in the genus of U(2)+[40]: {}\n", maxr1.map_or("-".into(), |m| m.to_string()));
            s
        }
    };
    emit(&cli.out, "real.txt", &text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match &cli.command {
        Command::Build => cmd_build(&cli),
        Command::Fano { path } => cmd_fano(&cli, path),
        Command::Census { codim } => cmd_census(&cli, *codim as usize),
        Command::VerifyTables => cmd_verify_tables(&cli),
        Command::Real => cmd_real(&cli),
        Command::Depth { path } => cmd_depth(&cli, path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Input(_) | Error::Json(_) | Error::Io(_) | Error::NotGeometric(_) => ExitCode::from(2),
                Error::Invariant(_) => ExitCode::from(3),
            }
        }
    }
}
