fn main() {
    std::process::exit(sgmimo::cli::main_with_args(std::env::args_os()));
}
