//! The `blastlab` command line: argument parsing, config resolution and the
//! subcommands, each usable as a library function.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

use args::{Cli, Command};
use config::load_section;
use error::{CliError, CliResult};

/// Runs a parsed command line, printing what it wrote.
pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(CliError::internal)?;
    }
    let file = cli.config.as_deref();
    let root: &Path = &cli.out;
    match cli.command {
        Command::GenLevels(a) => {
            let mut c = load_section(file, "gen-levels")?;
            a.apply(&mut c);
            println!("{}", commands::gen_levels(root, &c)?.display());
        }
        Command::Train(a) => {
            let mut c = load_section(file, "train")?;
            let progress = a.progress;
            a.apply(&mut c);
            println!("{}", commands::train(root, &c, progress)?.display());
        }
        Command::Eval(a) => {
            let mut c = load_section(file, "eval")?;
            a.apply(&mut c);
            println!("{}", commands::eval(root, &c)?.display());
        }
        Command::SimulatePlayers(a) => {
            let mut c = load_section(file, "simulate-players")?;
            a.apply(&mut c);
            println!("{}", commands::simulate_players(root, &c)?.display());
        }
        Command::Correlate(a) => {
            let mut c = load_section(file, "correlate")?;
            a.apply(&mut c);
            let rep = commands::correlate(root, &c)?;
            print!("{}", blastlab::eval::summary_text(&rep));
        }
        Command::Report(a) => {
            let mut c = load_section(file, "report")?;
            a.apply(&mut c);
            for (agent, rep) in commands::report(root, &c)? {
                match rep.best_x() {
                    Some((x, rho)) => println!("{agent}: best x = {x} (rho = {rho:+.4})"),
                    None => println!("{agent}: best x undefined"),
                }
            }
        }
        Command::Bench(a) => {
            let r = commands::bench(a.width, a.height, a.seconds, a.seed)?;
            println!(
                "apply_move {}x{}: {} moves in {:.3}s = {:.0} moves/s",
                r.width, r.height, r.moves, r.seconds, r.moves_per_second
            );
            if let Some(min) = a.min_rate {
                if r.moves_per_second < min {
                    return Err(CliError::internal(format!(
                        "below the required {min:.0} moves/s"
                    )));
                }
            }
        }
        Command::Pipeline(a) => {
            let mut c = load_section(file, "pipeline")?;
            a.apply(&mut c);
            let s = commands::pipeline(root, &c, a.progress)?;
            for (agent, rep) in &s.sweeps {
                match rep.best_x() {
                    Some((x, rho)) => println!("{agent}: best x = {x} (rho = {rho:+.4})"),
                    None => println!("{agent}: best x undefined"),
                }
            }
        }
    }
    Ok(())
}
