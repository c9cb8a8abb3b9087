fn main() {
    std::process::exit(toral_lab::cli::main_with_args(std::env::args_os()));
}
