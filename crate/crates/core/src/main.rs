use clap::Parser;
use offload_weaver::cli::{execute, Cli, WORKDIR_ENV};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let env_workdir = std::env::var_os(WORKDIR_ENV).map(Into::into);
    let status = execute(
        cli,
        env_workdir,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(status.code());
}
