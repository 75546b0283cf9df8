fn main() -> std::process::ExitCode {
    autodrive::cli::run(std::env::args_os())
}
