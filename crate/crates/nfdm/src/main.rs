use clap::Parser;

fn main() {
    let cli = nfdm::cli::Cli::parse();
    if let Err(e) = nfdm::cli::execute(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
