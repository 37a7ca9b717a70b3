fn main() {
    std::process::exit(vortexsim::cli::run(std::env::args_os()));
}
