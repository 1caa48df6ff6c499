fn main() {
    std::process::exit(bhrep::cli::main_with_args(std::env::args_os()));
}
