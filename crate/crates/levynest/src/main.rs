fn main() {
    std::process::exit(levynest::cli::run(std::env::args_os()));
}
