use clap::Parser;
use steady_glimm::cli::{execute, Cli, OUT_ENV};

fn main() {
    let cli = Cli::parse();
    let env = std::env::var(OUT_ENV).ok();
    std::process::exit(execute(&cli, env.as_deref()));
}
