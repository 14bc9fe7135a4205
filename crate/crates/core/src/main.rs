fn main() {
    std::process::exit(bevsim::cli::main_with_args(std::env::args_os()));
}
