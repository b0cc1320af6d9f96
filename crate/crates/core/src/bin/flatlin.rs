fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (code, out) = flatlin::cli::run_command(&argv);
    print!("{out}");
    std::process::exit(code);
}
