use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use revsec_cli::bench::{run_bench, rows_to_csv, rows_to_json, BenchOptions, ScrambleKind, SynthMode};
use revsec_cli::pla::{pla_parse, pla_write};
use revsec_cli::real::{real_parse, real_write};
use revsec_core::analyze::{attack_bdd, count_embeddings_blackbox, score_attack};
use revsec_core::bits::Bits;
use revsec_core::circuit::ReversibleCircuit;
use revsec_core::embed::{embed, scramble_inputs, scramble_outputs, AncillaValue, EmbedOptions};
use revsec_core::function::BooleanFunction;
use revsec_core::synth_bdd::{synthesize_bdd, SynthesisOptions, SynthesisRecord, TemplateCatalog};
use revsec_core::synth_func::synthesize_permutation;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Reversible-logic synthesis, embedding-count analysis, and
/// reverse-engineering attacks.
#[derive(Parser)]
#[command(name = "revsec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bdd,
    Func,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScrambleArg {
    Inputs,
    Outputs,
}

#[derive(Clone, Copy, ValueEnum)]
enum AncillaArg {
    Zero,
    One,
    Seeded,
}

impl From<AncillaArg> for AncillaValue {
    fn from(a: AncillaArg) -> Self {
        match a {
            AncillaArg::Zero => AncillaValue::Zero,
            AncillaArg::One => AncillaValue::One,
            AncillaArg::Seeded => AncillaValue::Seeded,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a .real circuit on an input vector.
    Sim {
        circuit: PathBuf,
        /// Input bits, most significant line first (matches the x_n..x_1
        /// labeling of circuit diagrams).
        input: String,
        /// Run the cascade right to left instead.
        #[arg(long)]
        inverse: bool,
    },
    /// Gate count and quantum cost of a .real circuit.
    Cost { circuit: PathBuf },
    /// BDD-based structural synthesis of a PLA function.
    SynthBdd {
        function: PathBuf,
        /// Output .real path (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Ground-truth sidecar path (defaults to <output>.record.json).
        #[arg(long)]
        record: Option<PathBuf>,
        /// Allow complemented co-factor realizations (seeded).
        #[arg(long)]
        complement_mode: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dump the function's BDD as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Embed a PLA function into a reversible permutation (JSON out).
    Embed {
        function: PathBuf,
        #[arg(long, value_enum, default_value = "zero")]
        ancilla_value: AncillaArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Functional synthesis: embed, then transformation-based gate extraction.
    SynthFunc {
        function: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "zero")]
        ancilla_value: AncillaArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Black-box analysis: leaked outputs, supports, embedding count.
    Analyze {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Synthesis-aware template attack on a .real circuit.
    Attack {
        circuit: PathBuf,
        /// Match against the complement-mode catalog.
        #[arg(long)]
        complement_mode: bool,
        /// Score against a synthesis record sidecar.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Add extra hidden ancillary inputs or garbage outputs to a PLA.
    Scramble {
        function: PathBuf,
        #[arg(long, conflicts_with = "extra_outputs")]
        extra_inputs: Option<u32>,
        #[arg(long)]
        extra_outputs: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output PLA path (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to record the hidden constants / added columns.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
    },
    /// Sweep a directory of PLAs through the scramble schedule.
    Bench {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "bdd")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "inputs")]
        scramble: ScrambleArg,
        /// Comma-separated extra-line ratios.
        #[arg(long, default_value = "0,0.1,0.2,0.5,1.0")]
        schedule: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        complement_mode: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum CliError {
    /// Bad input: unreadable files, parse errors, invalid arguments.
    Input(anyhow::Error),
    /// A violated internal invariant.
    Internal(anyhow::Error),
}

fn input(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(e.into())
}

fn internal(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Internal(e.into())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_circuit(path: &Path) -> Result<ReversibleCircuit, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Input)?;
    real_parse(&text).map_err(input)
}

fn read_function(path: &Path) -> Result<BooleanFunction, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Input)?;
    pla_parse(&text).map_err(input)
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(CliError::Internal),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sim {
            circuit,
            input: bits,
            inverse,
        } => {
            let circuit = read_circuit(&circuit)?;
            let vector: Bits = bits.parse().map_err(input)?;
            let out = if inverse {
                circuit.simulate_inverse(vector)
            } else {
                circuit.simulate(vector)
            }
            .map_err(input)?;
            println!("{out}");
            Ok(())
        }
        Command::Cost { circuit } => {
            let circuit = read_circuit(&circuit)?;
            println!("gates {}", circuit.gates().len());
            println!("quantum-cost {}", circuit.quantum_cost());
            Ok(())
        }
        Command::SynthBdd {
            function,
            output,
            record,
            complement_mode,
            seed,
            dot,
        } => {
            let f = read_function(&function)?;
            if let Some(dot_path) = dot {
                let bdd = revsec_core::bdd::Bdd::build(&f, None).map_err(input)?;
                emit(Some(&dot_path), &bdd.to_dot())?;
            }
            let options = SynthesisOptions {
                order: None,
                complement_mode,
                seed,
            };
            let (circuit, rec) = synthesize_bdd(&f, &options).map_err(input)?;
            let record_path = record.or_else(|| {
                output
                    .as_ref()
                    .map(|o| o.with_extension("record.json"))
            });
            if let Some(p) = record_path {
                let json = serde_json::to_string_pretty(&rec).map_err(internal)?;
                emit(Some(&p), &json)?;
            }
            emit(output.as_deref(), &real_write(&circuit))
        }
        Command::Embed {
            function,
            ancilla_value,
            seed,
            output,
        } => {
            let f = read_function(&function)?;
            let spec = embed(
                &f,
                &EmbedOptions {
                    ancilla_value: ancilla_value.into(),
                    seed,
                    ..Default::default()
                },
            );
            #[derive(Serialize)]
            struct EmbedDump<'a> {
                width: u32,
                ancillas: u32,
                garbage: u32,
                image: &'a [u64],
                annotations: &'a [revsec_core::circuit::LineAnnotation],
            }
            let dump = EmbedDump {
                width: spec.width(),
                ancillas: spec.num_ancillas(),
                garbage: spec.num_garbage(),
                image: spec.permutation.image(),
                annotations: &spec.annotations,
            };
            let json = serde_json::to_string_pretty(&dump).map_err(internal)?;
            emit(output.as_deref(), &(json + "\n"))
        }
        Command::SynthFunc {
            function,
            output,
            ancilla_value,
            seed,
        } => {
            let f = read_function(&function)?;
            let spec = embed(
                &f,
                &EmbedOptions {
                    ancilla_value: ancilla_value.into(),
                    seed,
                    ..Default::default()
                },
            );
            let bare = synthesize_permutation(&spec.permutation).map_err(internal)?;
            let circuit = ReversibleCircuit::with_annotations(
                bare.width(),
                bare.gates().to_vec(),
                spec.annotations,
            )
            .map_err(internal)?;
            emit(output.as_deref(), &real_write(&circuit))
        }
        Command::Analyze {
            circuit,
            format,
            output,
        } => {
            let circuit = read_circuit(&circuit)?;
            let report = count_embeddings_blackbox(&circuit).map_err(input)?;
            let content = match format {
                FormatArg::Json => {
                    #[derive(Serialize)]
                    struct Dump<'a> {
                        width: u32,
                        gates: usize,
                        quantum_cost: u64,
                        #[serde(flatten)]
                        report: &'a revsec_core::analyze::BlackboxReport,
                    }
                    serde_json::to_string_pretty(&Dump {
                        width: circuit.width(),
                        gates: circuit.gates().len(),
                        quantum_cost: circuit.quantum_cost(),
                        report: &report,
                    })
                    .map_err(internal)?
                        + "\n"
                }
                FormatArg::Csv => {
                    let union: std::collections::BTreeSet<u32> =
                        report.profile.supports.iter().flatten().copied().collect();
                    format!(
                        "width,gates,quantum_cost,leaked_outputs,remaining_outputs,union_support,embed_blackbox\n{},{},{},{},{},{},{}\n",
                        circuit.width(),
                        circuit.gates().len(),
                        circuit.quantum_cost(),
                        report.leaked_garbage.len(),
                        report.profile.outputs.len(),
                        union.len(),
                        report.embeddings.value,
                    )
                }
            };
            emit(output.as_deref(), &content)
        }
        Command::Attack {
            circuit,
            complement_mode,
            ground_truth,
            format,
            output,
        } => {
            let circuit = read_circuit(&circuit)?;
            let catalog = TemplateCatalog::shannon(complement_mode);
            let report = attack_bdd(&circuit, &catalog);
            let scorecard = match ground_truth {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(CliError::Input)?;
                    let record: SynthesisRecord =
                        serde_json::from_str(&text).map_err(input)?;
                    Some(score_attack(&report, &record).map_err(input)?)
                }
                None => None,
            };
            let content = match format {
                FormatArg::Json => {
                    #[derive(Serialize)]
                    struct Dump<'a> {
                        report: &'a revsec_core::analyze::AttackReport,
                        scorecard: &'a Option<revsec_core::analyze::Scorecard>,
                    }
                    serde_json::to_string_pretty(&Dump {
                        report: &report,
                        scorecard: &scorecard,
                    })
                    .map_err(internal)?
                        + "\n"
                }
                FormatArg::Csv => {
                    let mut header = "width,gates,leaked_outputs,candidate_ancillas,recovered,unresolved,definite,potential,embed_with_info".to_string();
                    let mut row = format!(
                        "{},{},{},{},{},{},{},{},{}",
                        report.width,
                        report.gate_count,
                        report.leaked_garbage.len(),
                        report.candidate_ancillas.len(),
                        report.recovered_ancillas.len(),
                        report.unresolved_ancillas.len(),
                        report.definite_primary_outputs.len(),
                        report.potential_primary_outputs.len(),
                        report.embeddings.value,
                    );
                    if let Some(score) = &scorecard {
                        header.push_str(",pct_ancillas_recovered,wrong_values,primary_outputs_covered,partition_agreement,pct_garbage_leaked");
                        row.push_str(&format!(
                            ",{},{},{},{},{}",
                            score.pct_ancillas_recovered,
                            score.wrong_values,
                            score.primary_outputs_covered,
                            score.partition_agreement,
                            score.pct_garbage_leaked,
                        ));
                    }
                    format!("{header}\n{row}\n")
                }
            };
            emit(output.as_deref(), &content)
        }
        Command::Scramble {
            function,
            extra_inputs,
            extra_outputs,
            seed,
            output,
            ground_truth,
        } => {
            let f = read_function(&function)?;
            #[derive(Serialize)]
            struct Truth {
                kind: &'static str,
                count: u32,
                seed: u64,
                #[serde(skip_serializing_if = "Option::is_none")]
                hidden_inputs: Option<Vec<bool>>,
                #[serde(skip_serializing_if = "Option::is_none")]
                added_outputs: Option<Vec<u32>>,
            }
            let (scrambled, truth) = match (extra_inputs, extra_outputs) {
                (Some(count), None) => {
                    let s = scramble_inputs(&f, count, seed).map_err(input)?;
                    let truth = Truth {
                        kind: "inputs",
                        count,
                        seed,
                        hidden_inputs: Some(s.hidden_values),
                        added_outputs: None,
                    };
                    (s.function, truth)
                }
                (None, Some(count)) => {
                    let s = scramble_outputs(&f, count, seed).map_err(input)?;
                    let truth = Truth {
                        kind: "outputs",
                        count,
                        seed,
                        hidden_inputs: None,
                        added_outputs: Some(s.added_outputs),
                    };
                    (s.function, truth)
                }
                _ => {
                    return Err(input(anyhow!(
                        "exactly one of --extra-inputs and --extra-outputs is required"
                    )))
                }
            };
            if let Some(path) = ground_truth {
                let json = serde_json::to_string_pretty(&truth).map_err(internal)?;
                emit(Some(&path), &(json + "\n"))?;
            }
            emit(output.as_deref(), &pla_write(&scrambled))
        }
        Command::Bench {
            dir,
            mode,
            scramble,
            schedule,
            seed,
            complement_mode,
            format,
            output,
        } => {
            let schedule: Vec<f64> = schedule
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| input(anyhow!("bad schedule: {e}")))?;
            let options = BenchOptions {
                mode: match mode {
                    ModeArg::Bdd => SynthMode::Bdd,
                    ModeArg::Func => SynthMode::Func,
                },
                scramble: match scramble {
                    ScrambleArg::Inputs => ScrambleKind::Inputs,
                    ScrambleArg::Outputs => ScrambleKind::Outputs,
                },
                schedule,
                seed,
                complement_mode,
            };
            let report = run_bench(&dir, &options).map_err(input)?;
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            let content = match format {
                FormatArg::Csv => rows_to_csv(&report.rows),
                FormatArg::Json => rows_to_json(&report.rows) + "\n",
            };
            emit(output.as_deref(), &content)
        }
    }
}
