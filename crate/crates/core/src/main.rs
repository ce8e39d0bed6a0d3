fn main() {
    std::process::exit(coopsynt::cli::main_with_args(std::env::args_os()));
}
