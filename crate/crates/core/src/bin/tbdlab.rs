fn main() -> std::process::ExitCode {
    tbdlab::cli::main_with_args(std::env::args_os())
}
