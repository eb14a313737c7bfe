use clap::Parser;

fn main() {
    let cli = secjoin::cli::Cli::parse();
    if let Err(e) = secjoin::cli::run(cli) {
        eprintln!("secjoin: {e}");
        std::process::exit(e.exit_code());
    }
}
