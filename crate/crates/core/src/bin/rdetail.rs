fn main() {
    std::process::exit(rdetail::cli::dispatch(std::env::args_os()));
}
