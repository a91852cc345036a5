fn main() -> std::process::ExitCode {
    sensekit::cli::main()
}
