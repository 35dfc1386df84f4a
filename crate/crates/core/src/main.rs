fn main() {
    std::process::exit(segscore::cli::run(std::env::args_os()));
}
