fn main() {
    std::process::exit(xxchain::cli::main());
}
