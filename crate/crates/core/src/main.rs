fn main() {
    std::process::exit(groundstate::cli::run(std::env::args_os()));
}
