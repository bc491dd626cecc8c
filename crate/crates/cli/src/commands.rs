use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use qss_core::adversary::{cheat_tradeoff_sweep, SweepConfig};
use qss_core::protocol::{
    calibrated_phases, render_truth_table, run_protocol, write_summary_json, write_transcript_jsonl,
    AttackMode, Ordering, ProtocolConfig, SecurityReport,
};
use qss_core::witness::{build_witness_with, calibrate_phase_with, Decision, Normalization, Variant, WitnessEstimate};

use crate::config::{resolve_output, OrderingArg, OutputFormat, RunOptions};

pub const EXIT_USAGE: std::process::ExitCode = std::process::ExitCode::FAILURE;

pub fn exit_code(decision: &Decision) -> std::process::ExitCode {
    match decision {
        Decision::Accept | Decision::Unchecked => std::process::ExitCode::SUCCESS,
        Decision::Abort { .. } => std::process::ExitCode::from(2),
        Decision::Inconclusive { .. } => std::process::ExitCode::from(3),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let p = resolve_output(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            Box::new(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn estimate(e: &Option<WitnessEstimate>) -> String {
    e.as_ref().map_or_else(|| "-".into(), |e| format!("{:.4} ± {:.4}", e.value, e.standard_error))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}

pub fn run(config: Option<&Path>, flags: &RunOptions) -> Result<std::process::ExitCode> {
    let options = match config {
        Some(path) => RunOptions::from_file(path)?.overlay(flags),
        None => flags.clone(),
    };
    let cfg = options.protocol_config()?;
    let transcript = run_protocol(&cfg)?;
    let mut out = open_output(options.output.as_deref())?;
    match options.format.unwrap_or_default() {
        OutputFormat::Summary => write_summary_json(&transcript.report, &mut out)?,
        OutputFormat::Transcript => write_transcript_jsonl(&transcript, &mut out)?,
    }
    out.flush()?;
    let r = &transcript.report;
    eprintln!(
        "decision {}; I1 {}; I2 {}; qber {}; key {} bits",
        r.decision.label(),
        estimate(&r.i1),
        estimate(&r.i2),
        opt(r.qber),
        r.key_length
    );
    Ok(exit_code(&r.decision))
}

pub fn truth_table() -> Result<std::process::ExitCode> {
    print!("{}", render_truth_table(&qss_core::protocol::truth_table()?));
    Ok(std::process::ExitCode::SUCCESS)
}

pub fn witness_table(n: usize, variant: &str, normalization: Normalization) -> Result<std::process::ExitCode> {
    let variant: Variant = variant.parse()?;
    let spec = build_witness_with(n, variant, normalization)?;
    let cal = calibrate_phase_with(n, variant, normalization)?;
    print!("{}", spec.to_table());
    println!("# terms {}", spec.terms().len());
    println!("# calibrated phase {:.6}", cal.chosen_phase);
    println!("# ghz value {}", cal.value);
    Ok(std::process::ExitCode::SUCCESS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoMode {
    /// Attack on the two-basis protocol with no witness test.
    Original,
    /// Attack on the protocol with two preparations and the witness test.
    Modified,
    /// The modified protocol without an attack.
    Control,
}

pub fn demo_config(mode: DemoMode, n: usize, rounds: u64, seed: u64, ordering: Ordering) -> ProtocolConfig {
    let base = ProtocolConfig { n_parties: n, num_rounds: rounds, seed, ordering, ..Default::default() };
    match mode {
        DemoMode::Original => ProtocolConfig {
            p_psi: 1.0,
            witness_check: false,
            attack: AttackMode::InterceptEntangle,
            ..base
        },
        DemoMode::Modified => ProtocolConfig { attack: AttackMode::InterceptEntangle, ..base },
        DemoMode::Control => base,
    }
}

fn demo_row(mode: DemoMode, r: &SecurityReport) -> String {
    format!(
        "{:<9} {:<13} {:>7} {:>9} {:>17} {:>17} {:>8}",
        format!("{mode:?}").to_lowercase(),
        r.decision.label(),
        opt(r.qber),
        opt(r.adversary_accuracy),
        estimate(&r.i1),
        estimate(&r.i2),
        r.key_length
    )
}

pub fn attack_demo(
    mode: Option<DemoMode>,
    n: usize,
    rounds: u64,
    seed: u64,
    ordering: OrderingArg,
) -> Result<std::process::ExitCode> {
    let ordering = match ordering {
        OrderingArg::Naive => Ordering::Naive,
        OrderingArg::Reversed => Ordering::Reversed,
    };
    let modes = match mode {
        Some(m) => vec![m],
        None => vec![DemoMode::Original, DemoMode::Modified, DemoMode::Control],
    };
    println!(
        "{:<9} {:<13} {:>7} {:>9} {:>17} {:>17} {:>8}",
        "mode", "decision", "qber", "accuracy", "I1", "I2", "key"
    );
    let mut analysis = None;
    for m in modes {
        let r = run_protocol(&demo_config(m, n, rounds, seed, ordering))?.report;
        println!("{}", demo_row(m, &r));
        if m == DemoMode::Modified {
            analysis = r.attack_analysis;
        }
    }
    if let Some(a) = analysis {
        println!();
        println!("exact witnesses on the attacked state: I1 {:.4}, I2 {:.4}", a.mixture_i1, a.mixture_i2);
        println!(
            "expected announced values: I1|psi {:.4}, I2|phi {:.4}, pooled {:.4}, {:.4}",
            a.announced_i1_psi, a.announced_i2_phi, a.announced_i1_pooled, a.announced_i2_pooled
        );
    }
    Ok(std::process::ExitCode::SUCCESS)
}

pub fn sweep(
    n: usize,
    samples: usize,
    p_psi: f64,
    seed: u64,
    refine: bool,
    normalization: Normalization,
    output: Option<&Path>,
) -> Result<std::process::ExitCode> {
    let (phases, _) = calibrated_phases(n, normalization)?;
    let cfg = SweepConfig { n_parties: n, samples, p_psi, seed, refine, normalization };
    let result = cheat_tradeoff_sweep(&cfg, phases, Default::default())?;
    if let Some(path) = output {
        let mut out = open_output(Some(path))?;
        out.write_all(result.to_table().as_bytes())?;
        out.flush()?;
    }
    let best = result.best();
    let gains = result.i1_improvements().count();
    let traded = result.i1_improvements().filter(|p| p.i2 < result.identity.i2).count();
    println!("points {}", result.points.len());
    println!("identity I1 {:.6} I2 {:.6}", result.identity.i1, result.identity.i2);
    println!("best min(I1, I2) {:.6e} at I1 {:.6e} I2 {:.6e}", best.min_value(), best.i1, best.i2);
    println!("points raising I1 {gains}, of which lowering I2 {traded}");
    Ok(std::process::ExitCode::SUCCESS)
}
