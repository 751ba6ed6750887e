fn main() -> std::process::ExitCode {
    rqnn::cli::main()
}
