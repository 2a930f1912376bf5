fn main() {
    std::process::exit(dagw::cli::main_with_args(std::env::args_os()));
}
