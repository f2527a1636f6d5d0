fn main() {
    std::process::exit(negmono::cli::run(std::env::args_os()));
}
