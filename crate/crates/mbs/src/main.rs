fn main() {
    std::process::exit(mbs::cli::run());
}
