fn main() {
    std::process::exit(pmcone::cli::main_from_env());
}
