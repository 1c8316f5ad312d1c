fn main() {
    std::process::exit(tamarkin_core::cli::run(std::env::args_os()));
}
