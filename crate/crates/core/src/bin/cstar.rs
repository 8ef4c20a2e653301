fn main() {
    std::process::exit(cstar_inductive::cli::run(std::env::args_os()));
}
