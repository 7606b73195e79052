mod args;
mod commands;
mod error;
mod output;
mod scan;

use clap::Parser;

use args::{Cli, Command};
use commands::Ctx;
use error::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Internal(format!("cannot configure worker pool: {e}")))?;
    }
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Bounds(a) => commands::bounds(&ctx, a),
        Command::Search(a) => commands::search(&ctx, a),
        Command::Mnsd(a) => commands::mnsd(&ctx, a),
        Command::Filter(a) => commands::filter(&ctx, a),
        Command::Scan(a) => scan::scan(&ctx, a),
        Command::Count(a) => commands::count(&ctx, a),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("modcat: {e}");
        std::process::exit(e.exit_code());
    }
}
