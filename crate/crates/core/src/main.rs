fn main() {
    std::process::exit(motionzip::cli::run(std::env::args_os()));
}
