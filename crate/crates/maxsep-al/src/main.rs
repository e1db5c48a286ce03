use clap::Parser;

fn main() {
    let cli = maxsep_al::cli::Cli::parse();
    if let Err(e) = maxsep_al::cli::execute(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
