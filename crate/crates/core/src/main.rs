fn main() {
    std::process::exit(rffp::cli::run(std::env::args_os()));
}
