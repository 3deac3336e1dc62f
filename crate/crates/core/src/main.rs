fn main() {
    std::process::exit(lipcone::cli::main_with_args(std::env::args_os()));
}
