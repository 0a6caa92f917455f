fn main() {
    std::process::exit(diamond_qfc::cli::main_with_args(std::env::args_os()));
}
