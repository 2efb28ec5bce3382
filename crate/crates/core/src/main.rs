fn main() {
    std::process::exit(hamloop::cli::run(std::env::args_os()));
}
