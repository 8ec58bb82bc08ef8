use clap::Parser;
use grsk_lab::{run, Cli};

fn main() {
    let code = run(Cli::parse(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
