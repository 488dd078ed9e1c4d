fn main() {
    std::process::exit(affect_drift::cli::main_entry());
}
