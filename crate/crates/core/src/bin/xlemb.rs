fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(xlemb::cli::run_cli(&argv));
}
