fn main() {
    std::process::exit(coincidence::cli::main_with_args(std::env::args_os()));
}
