fn main() {
    std::process::exit(latentsim_cli::run(std::env::args_os()));
}
