use std::process::ExitCode;

use clap::{Parser, Subcommand};

use protomon::harness::{
    default_spec_text, run_scenario, scenario_by_name, HttpMonitor, LocalMonitor, MonitorEndpoint,
    SCENARIO_NAMES,
};
use protomon::monitor::{MonitorState, Verdict};
use protomon::pattern::is_relevant;
use protomon::service;
use protomon::syntax::Spec;
use protomon::trace;

#[derive(Parser)]
#[command(
    name = "protomon",
    about = "Protocol monitoring for agent conversations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the monitoring REST service until interrupted.
    Serve {
        /// Address to listen on.
        #[arg(long, default_value = service::DEFAULT_LISTEN)]
        listen: String,
    },
    /// Check a recorded trace against a protocol, one verdict per event.
    Check {
        /// Protocol file (.rml).
        #[arg(long)]
        spec: String,
        /// Trace file, one event as JSON per line.
        #[arg(long)]
        trace: String,
        /// Only print the final summary line.
        #[arg(long)]
        quiet: bool,
        /// On a violation, list the event types that were admissible.
        #[arg(long)]
        explain: bool,
    },
    /// Replay a scripted multi-agent scenario against a monitor.
    Sim {
        /// One of the built-in scenarios.
        #[arg(long)]
        scenario: String,
        /// Protocol file; defaults to the one the scenario was written for.
        #[arg(long)]
        spec: Option<String>,
        /// Base URL of a running service; defaults to an embedded monitor.
        #[arg(long)]
        endpoint: Option<String>,
        /// Record the forwarded events to this file, one JSON per line.
        #[arg(long)]
        record: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Serve { listen } => match service::run_forever(&listen) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: cannot serve on {listen}: {err}");
                ExitCode::from(2)
            }
        },
        Command::Check {
            spec,
            trace,
            quiet,
            explain,
        } => check(&spec, &trace, quiet, explain),
        Command::Sim {
            scenario,
            spec,
            endpoint,
            record,
        } => sim(
            &scenario,
            spec.as_deref(),
            endpoint.as_deref(),
            record.as_deref(),
        ),
    }
}

fn load_spec(path: &str) -> Result<Spec, String> {
    let text = std::fs::read_to_string(path).map_err(|err| format!("cannot read {path}: {err}"))?;
    Spec::compile(&text).map_err(|err| format!("{path}: {err}"))
}

fn check(spec_path: &str, trace_path: &str, quiet: bool, explain: bool) -> ExitCode {
    let spec = match load_spec(spec_path) {
        Ok(spec) => spec,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let events = match trace::read_trace_file(std::path::Path::new(trace_path)) {
        Ok(events) => events,
        Err(err) => {
            eprintln!("error: {trace_path}: {err}");
            return ExitCode::from(2);
        }
    };
    let mut state = MonitorState::new(&spec);
    let mut first_violation: Option<u64> = None;
    let mut expected_at_violation = None;
    for event in &events {
        let before = state.clone();
        let verdict = state.step(&spec, event);
        let index = state.events_consumed();
        if verdict.is_violation() && first_violation.is_none() {
            first_violation = Some(index);
            if explain {
                expected_at_violation = Some(before.expected_event_types(&spec));
            }
        }
        if !quiet {
            let tag = if is_relevant(&spec.decls, event) {
                "relevant"
            } else {
                "skipped"
            };
            println!("#{index}\t{tag}\t{verdict}");
        }
    }
    let final_verdict = if state.is_latched() {
        Verdict::Violation
    } else {
        state.current_verdict(&spec)
    };
    if let Some(index) = first_violation {
        if !quiet {
            println!("first violation at event {index}");
        }
        if let Some(expected) = expected_at_violation {
            if expected.is_empty() {
                println!("no event type could have continued the protocol");
            } else {
                let names: Vec<&str> = expected.iter().map(String::as_str).collect();
                println!("expected one of: {}", names.join(", "));
            }
        }
    }
    println!("RESULT {final_verdict} after {} events", events.len());
    if first_violation.is_some() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn sim(
    scenario_name: &str,
    spec_path: Option<&str>,
    endpoint_url: Option<&str>,
    record_path: Option<&str>,
) -> ExitCode {
    let Some(scenario) = scenario_by_name(scenario_name) else {
        eprintln!(
            "error: unknown scenario `{scenario_name}`; choose one of: {}",
            SCENARIO_NAMES.join(", ")
        );
        return ExitCode::from(2);
    };
    let spec_text = match spec_path {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(err) => {
                eprintln!("error: cannot read {path}: {err}");
                return ExitCode::from(2);
            }
        },
        None => default_spec_text(scenario_name)
            .expect("every built-in scenario has a bundled protocol")
            .to_owned(),
    };
    let spec = match Spec::compile(&spec_text) {
        Ok(spec) => spec,
        Err(err) => {
            eprintln!("error: {}: {err}", spec_path.unwrap_or("bundled protocol"));
            return ExitCode::from(2);
        }
    };
    let mut local;
    let mut http;
    let endpoint: &mut dyn MonitorEndpoint = match endpoint_url {
        Some(url) => match HttpMonitor::create(url, &spec_text) {
            Ok(client) => {
                http = client;
                &mut http
            }
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
        },
        None => {
            local = LocalMonitor::new(spec.clone());
            &mut local
        }
    };
    let outcome = match run_scenario(&scenario, &spec, endpoint) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    print!("{}", outcome.format_transcript());
    for (index, agents) in &outcome.warnings {
        println!("violation at event {index}; warned {}", agents.join(", "));
    }
    if let Some(path) = record_path {
        if let Err(err) = trace::write_trace_file(std::path::Path::new(path), &outcome.events) {
            eprintln!("error: cannot write {path}: {err}");
            return ExitCode::from(2);
        }
    }
    ExitCode::SUCCESS
}
