fn main() {
    std::process::exit(blockenc::cli::run());
}
