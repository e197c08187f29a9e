use clap::Parser;
use entangled_control::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
