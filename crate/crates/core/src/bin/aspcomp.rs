fn main() {
    std::process::exit(aspcomp::cli::main_with_args(std::env::args_os()));
}
