fn main() {
    std::process::exit(msde::cli::main_with_args(std::env::args_os()));
}
