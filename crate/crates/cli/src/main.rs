use std::io;
use std::process::ExitCode;

use clap::Parser;
use nsse_cli::{init_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads(std::env::var("NSSE_THREADS").ok().as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let code = run(cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code)
}
