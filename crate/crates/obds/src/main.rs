fn main() {
    std::process::exit(obds::cli::run_from_env());
}
