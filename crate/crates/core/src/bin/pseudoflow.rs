fn main() {
    std::process::exit(pseudoflow::cli::main_with_args(std::env::args_os()));
}
