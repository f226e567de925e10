fn main() {
    std::process::exit(febe::cli::run(std::env::args_os()));
}
