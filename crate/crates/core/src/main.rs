fn main() -> std::process::ExitCode {
    xorcount::cli::main_from_env()
}
