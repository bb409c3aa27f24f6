fn main() {
    std::process::exit(defquad_core::cli::run(std::env::args_os()));
}
