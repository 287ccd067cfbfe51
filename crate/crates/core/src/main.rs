fn main() {
    std::process::exit(bwtlcp::cli::main_with_args(std::env::args_os()));
}
