fn main() {
    std::process::exit(flatreeb_cli::main_with_args(std::env::args_os()));
}
