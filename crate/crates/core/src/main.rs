fn main() {
    std::process::exit(specjac::cli::run(std::env::args_os()));
}
