use clap::Parser;
use nestprox_cli::{execute, Cli};

fn main() {
    std::process::exit(execute(Cli::parse()));
}
