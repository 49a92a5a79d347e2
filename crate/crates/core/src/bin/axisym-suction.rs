fn main() {
    std::process::exit(axisym_suction::cli::run(std::env::args_os()));
}
