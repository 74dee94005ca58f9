fn main() {
    std::process::exit(momentlines::cli::run());
}
