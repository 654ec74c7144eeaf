use clap::Parser;

fn main() {
    let cli = cifc_cli::Cli::parse();
    if let Err(e) = cifc_cli::run(cli) {
        eprintln!("cifc: {e}");
        std::process::exit(e.exit_code());
    }
}
