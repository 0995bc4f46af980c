fn main() {
    std::process::exit(symdp::cli::run(std::env::args_os()));
}
