fn main() {
    std::process::exit(sra_diag::cli::run(std::env::args_os()));
}
