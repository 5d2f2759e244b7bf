fn main() {
    std::process::exit(qbc::cli::run());
}
