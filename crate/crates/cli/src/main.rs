use clap::Parser;

fn main() {
    let cli = pbundle_cli::Cli::parse();
    let stdout = std::io::stdout();
    let code = pbundle_cli::run(&cli, &mut stdout.lock());
    std::process::exit(code);
}
