use convex_order::cli;

fn main() {
    std::process::exit(cli::run(std::env::args()).code());
}
