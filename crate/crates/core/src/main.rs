fn main() {
    std::process::exit(blaschke_lab::cli::run(std::env::args_os()));
}
