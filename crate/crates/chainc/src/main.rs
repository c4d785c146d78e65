fn main() {
    std::process::exit(chainc::cli::main_entry());
}
