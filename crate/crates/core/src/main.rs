fn main() {
    std::process::exit(dirac21::cli::main_with_args(std::env::args_os()));
}
