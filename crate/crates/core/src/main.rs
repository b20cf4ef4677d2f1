fn main() {
    std::process::exit(qrho::cli::main_with_args(std::env::args_os()));
}
