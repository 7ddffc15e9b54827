use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bfasp::frontend;
use bfasp::gen::{self, GenError};
use bfasp::groundfmt;
use bfasp::pipeline::{self, Mode, PipelineError};
use bfasp_core::analysis::{array_label, build_dep_graph, check_validity};
use bfasp_core::oracle::{self, OracleError, DEFAULT_CAP};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bfasp", version, about = "Ground bound founded answer set programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    BottomUp,
    Magic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exhaustive => Mode::Exhaustive,
            ModeArg::BottomUp => Mode::BottomUp,
            ModeArg::Magic => Mode::Magic,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Ground a model with data into the ground-program format.
    Ground {
        #[arg(long, value_enum, default_value = "magic")]
        mode: ModeArg,
        model: PathBuf,
        /// JSON data file; may be omitted for models without parameters.
        data: Option<PathBuf>,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print counts and phase timings to standard error.
        #[arg(long)]
        stats: bool,
    },
    /// Parse, bind and print the dependency report.
    Check { model: PathBuf, data: Option<PathBuf> },
    /// Enumerate stable solutions of a small ground program.
    SolveOracle {
        ground: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Report one optimal solution instead of all of them.
        #[arg(long)]
        minimize: bool,
    },
    /// Write a random benchmark instance as model.bfasp and data.json.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    Roadcon {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 2)]
        demands: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    Utilpol {
        #[arg(long)]
        citizens: usize,
        #[arg(long)]
        policies: usize,
        #[arg(long)]
        relevant_citizens: usize,
        #[arg(long)]
        relevant_policies: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    Companycon {
        #[arg(long)]
        companies: usize,
        #[arg(long)]
        relevant: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Pipeline(e) => e.exit_code() as u8,
            CliError::Gen(_) => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    Ok(fs::read_to_string(path)?)
}

fn read_data(path: &Option<PathBuf>) -> Result<String, PipelineError> {
    path.as_deref().map_or(Ok(String::new()), read)
}

fn write_out(output: &Option<PathBuf>, text: &str) -> Result<(), PipelineError> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn ground(mode: Mode, model: &Path, data: &Option<PathBuf>, output: &Option<PathBuf>, stats: bool) -> Result<(), PipelineError> {
    let c = pipeline::run(&read(model)?, &read_data(data)?, mode)?;
    let g = &c.result.program;
    if mode == Mode::Magic && g.rules.is_empty() && g.constraints.is_empty() {
        eprintln!("warning: no query and no unstratified component, nothing was grounded");
    }
    write_out(output, &groundfmt::emit(g))?;
    if stats {
        eprint!("{}", c.stats);
    }
    Ok(())
}

fn check(model: &Path, data: &Option<PathBuf>) -> Result<(), PipelineError> {
    let p = frontend::load(&read(model)?, &read_data(data)?)?;
    let g = build_dep_graph(&p);
    for (i, scc) in g.sccs.iter().enumerate() {
        let names: Vec<String> = scc.iter().map(|&a| array_label(&p, a)).collect();
        let f = &g.flags[i];
        let mut tags = Vec::new();
        if f.recursive {
            tags.push("recursive");
        }
        if f.has_decreasing_edge {
            tags.push("unstratified");
        }
        if f.has_nonmonotonic_edge {
            tags.push("non-monotonic");
        }
        println!("scc {i}: {} [{}]", names.join(", "), tags.join(" "));
    }
    check_validity(&p, &g)?;
    println!("valid: {} arrays, {} rules, {} constraints", p.arrays.len(), p.rules.len(), p.constraints.len());
    Ok(())
}

fn line(g: &bfasp_core::ground::GroundProgram, theta: &[bfasp_core::Value]) -> String {
    oracle::named(g, theta).iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn solve(path: &Path, cap: u64, minimize: bool) -> Result<(), PipelineError> {
    let g = groundfmt::parse(&read(path)?)?;
    if minimize {
        match oracle::optimize(&g, cap) {
            Ok((theta, cost)) => {
                println!("OPTIMUM {cost}");
                println!("{}", line(&g, &theta));
            }
            Err(OracleError::Infeasible) => println!("UNSATISFIABLE"),
            Err(e) => return Err(e.into()),
        }
    } else {
        let all = oracle::enumerate_stable(&g, cap)?;
        if all.is_empty() {
            println!("UNSATISFIABLE");
        } else {
            println!("SOLUTIONS {}", all.len());
            for theta in &all {
                println!("{}", line(&g, theta));
            }
        }
    }
    Ok(())
}

fn write_instance(dir: &Path, model: &str, data: &str) -> Result<(), PipelineError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("model.bfasp"), model)?;
    fs::write(dir.join("data.json"), data)?;
    Ok(())
}

fn generate(f: &Family) -> Result<(), CliError> {
    let (model, data, dir) = match f {
        Family::Roadcon { nodes, edges, demands, seed, output } => {
            let i = gen::roadcon(*nodes, *edges, *demands, *seed)?;
            (i.model, i.data, output)
        }
        Family::Utilpol { citizens, policies, relevant_citizens, relevant_policies, seed, output } => {
            let i = gen::utilpol(*citizens, *policies, *relevant_citizens, *relevant_policies, *seed)?;
            (i.model, i.data, output)
        }
        Family::Companycon { companies, relevant, seed, output } => {
            let i = gen::companycon(*companies, *relevant, *seed)?;
            (i.model, i.data, output)
        }
    };
    Ok(write_instance(dir, &model, &data)?)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Ground { mode, model, data, output, stats } => ground(mode.into(), &model, &data, &output, stats)?,
        Cmd::Check { model, data } => check(&model, &data)?,
        Cmd::SolveOracle { ground, cap, minimize } => solve(&ground, cap, minimize)?,
        Cmd::Gen { family } => generate(&family)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
