use clap::Parser;

fn main() {
    let cli = lrs::cli::Cli::parse();
    let code = lrs::cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
