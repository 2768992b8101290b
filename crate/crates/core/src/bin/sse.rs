use std::io::{IsTerminal, Read, Write};
use std::process::ExitCode;

use clap::Parser;
use sse_core::cli::{Cli, error_report, run};

fn read_input(cli: &Cli) -> sse_core::Result<String> {
    if let Some(p) = &cli.input {
        return Ok(std::fs::read_to_string(p)?);
    }
    let optional = cli.command.input_optional();
    if optional && std::io::stdin().is_terminal() {
        return Ok("{}".to_string());
    }
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s)?;
    if optional && s.trim().is_empty() {
        s = "{}".to_string();
    }
    Ok(s)
}

fn write_report(cli: &Cli, text: &str) -> sse_core::Result<()> {
    match &cli.output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = read_input(&cli).and_then(|input| run(&cli, &input));
    match result {
        Ok(out) => {
            let mut text = serde_json::to_string_pretty(&out.report).expect("reports serialize");
            text.push('\n');
            if let Err(e) = write_report(&cli, &text) {
                eprintln!("{}", error_report(cli.command, &e));
                return ExitCode::from(2);
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{}", error_report(cli.command, &e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
