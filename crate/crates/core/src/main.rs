fn main() {
    std::process::exit(hamsuper::cli::run(std::env::args_os()));
}
