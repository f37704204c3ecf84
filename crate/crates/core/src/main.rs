fn main() {
    std::process::exit(copula_oed::cli::main_with_args(std::env::args_os()));
}
