use clap::Parser;

fn main() {
    let cli = cyclogaudin::cli::Cli::parse();
    std::process::exit(cyclogaudin::cli::run(cli));
}
