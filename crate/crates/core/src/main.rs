fn main() {
    std::process::exit(barylab::cli::run(std::env::args_os()));
}
