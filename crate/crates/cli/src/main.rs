fn main() {
    std::process::exit(nonclassical_cli::run(std::env::args_os()));
}
