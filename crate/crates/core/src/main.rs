fn main() {
    std::process::exit(rabi_sym::cli::run(std::env::args_os()));
}
