fn main() {
    std::process::exit(dilemma::cli::run_cli(std::env::args_os()));
}
