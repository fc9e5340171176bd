fn main() {
    std::process::exit(tricycle::cli::run(std::env::args_os()));
}
