use clap::Parser;

use cavmag::cli::{init_logging, run, Cli};

fn main() {
    let cli = Cli::parse();
    init_logging(cli.common.verbose);
    std::process::exit(run(&cli) as i32);
}
