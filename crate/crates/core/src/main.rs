fn main() {
    std::process::exit(qrobot::cli::run(std::env::args_os().skip(1)));
}
