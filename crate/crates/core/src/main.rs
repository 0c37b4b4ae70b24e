fn main() {
    std::process::exit(calat::cli::run(std::env::args_os()));
}
