fn main() {
    std::process::exit(markovian::cli::run(std::env::args_os()));
}
