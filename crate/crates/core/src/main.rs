fn main() {
    std::process::exit(morphid::cli::main_with(std::env::args_os()));
}
