fn main() {
    std::process::exit(d2dcache::cli::main_with_args(std::env::args_os()));
}
