fn main() -> std::process::ExitCode {
    rcga::cli::main()
}
