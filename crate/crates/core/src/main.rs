fn main() {
    let code = mahonia::cli::run(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
        &mut std::io::stdin(),
    );
    std::process::exit(code);
}
