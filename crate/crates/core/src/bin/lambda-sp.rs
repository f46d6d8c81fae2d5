fn main() {
    std::process::exit(lambda_sp::cli::main_exit());
}
