fn main() {
    std::process::exit(folforge::cli::run(std::env::args_os().collect()))
}
