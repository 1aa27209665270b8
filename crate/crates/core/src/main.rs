use clap::Parser;
use crosstalk::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(cli::run(&cli));
}
