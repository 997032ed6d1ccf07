fn main() {
    std::process::exit(oligo::cli::main_with_args(std::env::args_os()));
}
