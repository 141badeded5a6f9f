use clap::Parser;
use lc_jacobi::cli::{configure_threads, run, RunConfig};

fn main() {
    let cfg = RunConfig::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
    std::process::exit(run(&cfg));
}
