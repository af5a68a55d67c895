fn main() {
    std::process::exit(coldopt::cli::run(std::env::args_os()));
}
