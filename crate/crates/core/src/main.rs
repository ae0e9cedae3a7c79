fn main() {
    std::process::exit(isoembed::cli::run(std::env::args_os()));
}
