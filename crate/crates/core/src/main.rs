fn main() {
    std::process::exit(ab_contrast::cli::main());
}
