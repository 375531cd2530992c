use clap::Parser;

fn main() {
    let cli = thoma::cli::Cli::parse();
    std::process::exit(thoma::cli::run(cli));
}
