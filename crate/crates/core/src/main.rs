use clap::Parser;

fn main() {
    std::process::exit(qmbmw::cli::execute(qmbmw::cli::Cli::parse()));
}
