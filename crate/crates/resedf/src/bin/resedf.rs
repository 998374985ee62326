fn main() {
    let code = resedf::cli::run(std::env::args().skip(1));
    std::process::exit(code);
}
