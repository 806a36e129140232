fn main() -> std::process::ExitCode {
    menon::cli::main()
}
