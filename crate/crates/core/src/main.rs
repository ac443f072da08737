fn main() {
    std::process::exit(ggr::cli::main_from_env());
}
