use clap::Parser;

use weyl_arc_sim::cli::{main_with, Args};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    std::process::exit(main_with(Args::parse()));
}
