use clap::Parser;

use amar_cli::app::{run, Cli};
use amar_cli::exit;

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit::code_for(&err));
    }
}
