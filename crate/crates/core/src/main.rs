use clap::Parser;

fn main() {
    let cli = topoforge::cli::Cli::parse();
    let code = topoforge::cli::dispatch(cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
