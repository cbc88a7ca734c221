fn main() {
    std::process::exit(lbm_quartic::cli::main_with_args(std::env::args_os()));
}
