fn main() {
    std::process::exit(sphere_feynman::cli::main_with_args(std::env::args_os()));
}
