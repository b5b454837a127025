use clap::Parser;
use sgpoly_cli::config::Cli;

fn main() {
    let cli = Cli::parse();
    let code = match sgpoly_cli::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
