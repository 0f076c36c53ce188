fn main() -> std::process::ExitCode {
    srcsel::cli::main()
}
