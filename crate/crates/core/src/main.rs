fn main() {
    std::process::exit(scri_charges::cli::run(std::env::args_os()));
}
