fn main() -> std::process::ExitCode {
    pairsec_cli::main_with_args(std::env::args_os())
}
