use std::process::ExitCode;

use clap::Parser;
use slipstokes::cli::{main_with_args, Args};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    main_with_args(Args::parse())
}
