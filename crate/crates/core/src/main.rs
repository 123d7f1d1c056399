use std::process::ExitCode;

use spacs::runner::cli::{cli_parse, CliError, Command, EXIT_RUNTIME, EXIT_USAGE};
use spacs::runner::{reanalyze, run_experiment, sweep_campaign, ReportFormat, RunReport};

fn print_report(report: &RunReport, format: ReportFormat) {
    match format {
        ReportFormat::Text => print!("{}", report.to_text()),
        ReportFormat::Json => match serde_json::to_string_pretty(report) {
            Ok(s) => println!("{s}"),
            Err(e) => eprintln!("error: {e}"),
        },
    }
}

fn main() -> ExitCode {
    let command = match cli_parse(std::env::args_os()) {
        Ok(c) => c,
        Err(CliError::Display(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", msg.trim_end());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let outcome = match command {
        Command::Run(config) => run_experiment(&config).map(|r| print_report(&r, config.format)),
        Command::Reanalyze(dir) => reanalyze(&dir).map(|r| print_report(&r, ReportFormat::Text)),
        Command::Campaign(config, ranges) => sweep_campaign(&config, &ranges).map(|runs| {
            for run in &runs {
                match &run.outcome {
                    Ok(r) => println!(
                        "run {:03} seed {}: min W {:.4}, fidelity {:.4}",
                        run.index, run.seed, r.wigner_min, r.fidelity_ideal_spacs
                    ),
                    Err(msg) => println!("run {:03} seed {}: FAILED {msg}", run.index, run.seed),
                }
            }
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME as u8)
        }
    }
}
