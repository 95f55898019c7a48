fn main() {
    std::process::exit(tessella::cli::main_with_args(std::env::args_os()));
}
