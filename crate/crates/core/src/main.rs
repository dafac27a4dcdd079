fn main() {
    std::process::exit(sompkit::harness::cli::main_with_env());
}
