fn main() {
    std::process::exit(tpossp::cli::run(std::env::args_os()));
}
