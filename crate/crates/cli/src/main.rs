//! `swsforge`: generate SAWSDL interfaces and BPEL orchestrations from a
//! service model, import SAWSDL back, and simulate generated processes.
//!
//! Exit status: 0 on success, 1 for domain errors (violations, unknown or
//! non-composite services, faulted runs), 2 for input errors (unreadable
//! or malformed files, missing stubs).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swsforge_core::behavior::parse_behavior;
use swsforge_core::bpel::{emit_process_artifacts, parse_bpel, BpelError};
use swsforge_core::pim::{
    parse_model_with, serialize_model, validate, ModelError, ParseOptions, ServiceKind, ServiceModel,
};
use swsforge_core::sawsdl::{canonicalize, emit_sawsdl, parse_sawsdl, SawsdlError};
use swsforge_core::sim::{parse_message, parse_stubs, simulate_with, SimError, SimOptions, TraceEvent};
use swsforge_core::transform::{pim_to_psm, psm_to_pim, TransformError};

#[derive(Parser)]
#[command(name = "swsforge", version, about = "Model-driven SAWSDL and BPEL generation")]
struct Cli {
    /// Reject unknown keys in model documents instead of ignoring them.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model document and print its violations, one per line.
    Validate { model: PathBuf },
    /// Generate artifacts into an output directory.
    #[command(subcommand)]
    Gen(Gen),
    /// Convert a SAWSDL description to a model document on standard output.
    Import { sawsdl: PathBuf },
    /// Run a BPEL process against service stubs; prints the trace as NDJSON.
    Simulate {
        bpel: PathBuf,
        stubs: PathBuf,
        /// JSON object received by the process.
        input: PathBuf,
        /// Total loop iterations allowed before the run is stopped.
        #[arg(long, default_value_t = SimOptions::default().loop_limit)]
        loop_limit: u64,
    },
    /// Generate SAWSDL for a service, import it back and compare.
    Roundtrip { model: PathBuf, service: String },
}

#[derive(Subcommand)]
enum Gen {
    /// Write `<Service>.wsdl`.
    Sawsdl {
        model: PathBuf,
        service: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Write `<Composite>.wsdl`, `<Composite>-Process.wsdl` and `<Composite>.bpel`.
    Bpel {
        model: PathBuf,
        behavior: PathBuf,
        composite: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

/// Why a command stopped; the variant fixes the exit status.
enum Failure {
    Domain(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let options = ParseOptions { strict: cli.strict };
    let result = match cli.command {
        Command::Validate { model } => cmd_validate(&model, options),
        Command::Gen(Gen::Sawsdl { model, service, out }) => cmd_gen_sawsdl(&model, &service, &out, options),
        Command::Gen(Gen::Bpel {
            model,
            behavior,
            composite,
            out,
        }) => cmd_gen_bpel(&model, &behavior, &composite, &out, options),
        Command::Import { sawsdl } => cmd_import(&sawsdl),
        Command::Simulate {
            bpel,
            stubs,
            input,
            loop_limit,
        } => cmd_simulate(&bpel, &stubs, &input, loop_limit),
        Command::Roundtrip { model, service } => cmd_roundtrip(&model, &service, options),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Domain(msg) | Failure::Input(msg)) = &f;
            eprintln!("error: {}", msg.trim_end());
            ExitCode::from(f.code())
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn print(text: &str) -> Outcome {
    io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Input(format!("cannot write output: {e}")))
}

fn model_error(path: &Path, e: ModelError) -> Failure {
    match e {
        ModelError::Syntax { .. } | ModelError::UnresolvedReference { .. } | ModelError::DuplicateName { .. } => {
            Failure::Input(format!("{}: {e}", path.display()))
        }
        other => Failure::Domain(other.to_string()),
    }
}

fn load_model(path: &Path, options: ParseOptions) -> Result<ServiceModel, Failure> {
    parse_model_with(&read(path)?, options).map_err(|e| model_error(path, e))
}

fn transform_error(e: TransformError) -> Failure {
    Failure::Domain(e.to_string())
}

fn sawsdl_error(path: &Path, e: SawsdlError) -> Failure {
    match e {
        SawsdlError::UnsupportedFeature(_) | SawsdlError::InvariantViolation(_) => Failure::Domain(e.to_string()),
        SawsdlError::XmlSyntax { .. } | SawsdlError::MissingNamespace(_) | SawsdlError::Malformed(_) => {
            Failure::Input(format!("{}: {e}", path.display()))
        }
    }
}

fn cmd_validate(model: &Path, options: ParseOptions) -> Outcome {
    let m = load_model(model, options)?;
    let report = validate(&m);
    print(&report.to_string())?;
    if report.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain(format!("{} violation(s)", report.len())))
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Failure> {
    let io = |p: &Path, e: io::Error| Failure::Input(format!("cannot write {}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| io(&path, e))?;
    Ok(path)
}

fn cmd_gen_sawsdl(model: &Path, service: &str, out: &Path, options: ParseOptions) -> Outcome {
    let m = load_model(model, options)?;
    let (desc, _) = pim_to_psm(&m, service).map_err(transform_error)?;
    let text = emit_sawsdl(&desc).map_err(|e| Failure::Domain(e.to_string()))?;
    let path = write_file(out, &format!("{service}.wsdl"), &text)?;
    print(&format!("{}\n", path.display()))
}

fn cmd_gen_bpel(model: &Path, behavior: &Path, composite: &str, out: &Path, options: ParseOptions) -> Outcome {
    let m = load_model(model, options)?;
    // every behavior document error is a malformed input
    let b = parse_behavior(&read(behavior)?).map_err(|e| Failure::Input(format!("{}: {e}", behavior.display())))?;
    let written = emit_process_artifacts(&m, &b, composite, out).map_err(|e| match e {
        BpelError::Io { .. } => Failure::Input(e.to_string()),
        other => Failure::Domain(other.to_string()),
    })?;
    let manifest: String = written.iter().map(|p| format!("{}\n", p.display())).collect();
    print(&manifest)
}

fn cmd_import(sawsdl: &Path) -> Outcome {
    let desc = parse_sawsdl(&read(sawsdl)?).map_err(|e| sawsdl_error(sawsdl, e))?;
    let m = psm_to_pim(&desc).map_err(transform_error)?;
    let text = serialize_model(&m).map_err(|e| Failure::Domain(e.to_string()))?;
    print(&format!("{text}\n"))
}

fn sim_input(path: &Path, e: SimError) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn cmd_simulate(bpel: &Path, stubs: &Path, input: &Path, loop_limit: u64) -> Outcome {
    let doc = parse_bpel(&read(bpel)?).map_err(|e| Failure::Input(format!("{}: {e}", bpel.display())))?;
    let registry = parse_stubs(&read(stubs)?).map_err(|e| sim_input(stubs, e))?;
    let initial = parse_message(&read(input)?).map_err(|e| sim_input(input, e))?;
    let trace = simulate_with(&doc, &registry, &initial, &SimOptions { loop_limit }).map_err(|e| match e {
        SimError::MissingStub { .. } | SimError::InvalidStubs(_) | SimError::Syntax { .. } => {
            Failure::Input(e.to_string())
        }
        other => Failure::Domain(other.to_string()),
    })?;
    print(&trace.to_ndjson())?;
    match trace.events.last() {
        Some(TraceEvent::Faulted { name }) => Err(Failure::Domain(format!("process faulted: {name}"))),
        _ => Ok(()),
    }
}

fn cmd_roundtrip(model: &Path, service: &str, options: ParseOptions) -> Outcome {
    let m = load_model(model, options)?;
    let (desc, _) = pim_to_psm(&m, service).map_err(transform_error)?;
    let text = emit_sawsdl(&desc).map_err(|e| Failure::Domain(e.to_string()))?;
    let parsed = parse_sawsdl(text.as_bytes()).map_err(|e| Failure::Domain(e.to_string()))?;
    let imported = psm_to_pim(&parsed).map_err(transform_error)?;
    let mut expected = m.restrict_to(service).map_err(|e| Failure::Domain(e.to_string()))?;
    // SAWSDL carries a composite's own interface only; its composition
    // lives in the BPEL artifacts
    let composite = expected.services[0].kind == ServiceKind::Composite;
    if composite {
        let s = &mut expected.services[0];
        s.kind = ServiceKind::Atomic;
        s.components.clear();
        s.behavior = None;
    }
    if imported != expected {
        let show = |x: &ServiceModel| serialize_model(x).unwrap_or_else(|e| e.to_string());
        return Err(Failure::Domain(format!(
            "imported model differs\n--- expected\n{}\n--- imported\n{}",
            show(&expected),
            show(&imported)
        )));
    }
    let (again, _) = pim_to_psm(&imported, service).map_err(transform_error)?;
    if canonicalize(&again) != canonicalize(&desc) {
        return Err(Failure::Domain("regenerated SAWSDL differs".into()));
    }
    let scope = if composite { " (interface only)" } else { "" };
    print(&format!("{service}: ok{scope}\n"))
}
