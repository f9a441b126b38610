fn main() {
    std::process::exit(xtylaw::cli::run());
}
