fn main() {
    std::process::exit(semistart::cli::run(std::env::args_os()));
}
