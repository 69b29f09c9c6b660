fn main() -> std::process::ExitCode {
    aglm::cli::main()
}
