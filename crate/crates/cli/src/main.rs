use std::process::ExitCode;

use clap::Parser;

mod args;
mod output;
mod run;

use args::{Cli, Command};
use output::{Failure, Manifest, CONFIG_ERROR};
use run::Ctx;

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<(), Failure> {
    match cmd {
        Command::Oracle(a) => run::oracle(a, ctx),
        Command::SolveLinear(a) => run::solve_linear(a, ctx),
        Command::Solve(a) => run::solve(a, ctx),
        Command::Diagnose(a) => run::diagnose(a, ctx),
        Command::Identity(a) => run::identity(a, ctx),
        Command::Sweep(a) => run::sweep(a, ctx),
        Command::FitBoundary(a) => run::fit_boundary(a, ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(CONFIG_ERROR);
    }
    let mut config = serde_json::to_value(&cli.command).expect("serializable config");
    if let Some(obj) = config.as_object_mut() {
        obj.insert("threads".into(), cli.threads.into());
    }
    let mut ctx = Ctx::new(cli.out.clone(), Manifest::new(cli.command.name(), config));
    let outcome = dispatch(&cli.command, &mut ctx);
    if let Err(f) = &outcome {
        eprintln!("error: {}", f.message);
        if f.code == CONFIG_ERROR && !ctx.has_dir() {
            return ExitCode::from(f.code);
        }
        ctx.m.failed = true;
        ctx.m.error = Some(f.message.clone());
        ctx.m.verdict = "failed".into();
    }
    if let Err(f) = ctx.write_manifest() {
        eprintln!("error: writing manifest: {}", f.message);
        return ExitCode::from(f.code);
    }
    match outcome {
        Ok(()) => {
            println!("{}: {} ({})", cli.command.name(), ctx.m.verdict, cli.out.display());
            ExitCode::SUCCESS
        }
        Err(f) => ExitCode::from(f.code),
    }
}
