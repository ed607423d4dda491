fn main() {
    std::process::exit(ort_cli::run(std::env::args_os()));
}
