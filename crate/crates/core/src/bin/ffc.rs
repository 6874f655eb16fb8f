fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(ffc_core::cli::run(&args));
}
