use clap::Parser;
use squeezed_compton::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
