fn main() {
    std::process::exit(pass_isac::cli::main());
}
