use std::io::{IsTerminal, Read, Write};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mut input = String::new();
    if args.iter().skip(1).any(|a| a == "-") && !std::io::stdin().is_terminal() {
        if let Err(e) = std::io::stdin().read_to_string(&mut input) {
            eprintln!("error: cannot read standard input: {e}");
            std::process::exit(2);
        }
    }
    let out = pdgcat_cli::run_command(&args, &input);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
