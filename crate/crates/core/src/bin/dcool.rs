fn main() {
    std::process::exit(dissipative_cooling::cli::main_with_args(std::env::args_os()));
}
