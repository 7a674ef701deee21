fn main() {
    std::process::exit(mge_ant::cli::run(std::env::args_os()));
}
