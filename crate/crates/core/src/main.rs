fn main() {
    std::process::exit(cowvox::cli::run(std::env::args_os()));
}
