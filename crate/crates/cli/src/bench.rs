//! Benchmark sweep: for every PLA in a directory and every point of the
//! scramble schedule, synthesize, run both attacks, and emit one row.
//! The whole run is a pure function of (directory contents, options, seed);
//! rows are ordered by file name, then schedule position.

use crate::pla::{pla_parse, PlaError};
use revsec_core::analyze::{attack_bdd, count_embeddings_blackbox, score_attack};
use revsec_core::circuit::ReversibleCircuit;
use revsec_core::embed::{embed, scramble_inputs, scramble_outputs, EmbedOptions};
use revsec_core::function::BooleanFunction;
use revsec_core::synth_bdd::{synthesize_bdd, SynthesisOptions, TemplateCatalog};
use revsec_core::synth_func::synthesize_permutation;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    Bdd,
    Func,
}

impl SynthMode {
    fn label(self) -> &'static str {
        match self {
            SynthMode::Bdd => "bdd",
            SynthMode::Func => "func",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScrambleKind {
    Inputs,
    Outputs,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub mode: SynthMode,
    pub scramble: ScrambleKind,
    /// Extra-line ratios; the paper's sweep is 0, 0.1, 0.2, 0.5, 1.0 of the
    /// base circuit width.
    pub schedule: Vec<f64>,
    pub seed: u64,
    pub complement_mode: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            mode: SynthMode::Bdd,
            scramble: ScrambleKind::Inputs,
            schedule: vec![0.0, 0.1, 0.2, 0.5, 1.0],
            seed: 0,
            complement_mode: false,
        }
    }
}

/// One benchmark measurement. Embedding counts are decimal strings of
/// arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub benchmark: String,
    pub mode: String,
    pub ratio: f64,
    pub extra: u32,
    pub n: u32,
    pub garbage: u32,
    pub ancilla: u32,
    pub quantum_cost: u64,
    pub pct_garbage_leaked: f64,
    pub embed_blackbox: String,
    pub pct_ancilla_recovered: f64,
    pub embed_with_info: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Unreadable or unprocessable files, skipped with a note.
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Extra-line count for a schedule ratio: round-half-up of `ratio * n`,
/// with a floor of 1 for nonzero ratios.
pub fn extra_count(ratio: f64, n: u32) -> u32 {
    if ratio <= 0.0 {
        0
    } else {
        ((ratio * n as f64 + 0.5).floor() as u32).max(1)
    }
}

fn mix_seed(seed: u64, file_idx: u64, point_idx: u64) -> u64 {
    let mut z = seed
        ^ file_idx.wrapping_mul(0x9e3779b97f4a7c15)
        ^ point_idx.wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

pub fn run_bench(dir: &Path, options: &BenchOptions) -> Result<BenchReport, BenchError> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|source| BenchError::Io {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "pla"))
        .collect();
    files.sort();

    let mut report = BenchReport::default();
    for (file_idx, path) in files.iter().enumerate() {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let function = match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(
            |text| pla_parse(&text).map_err(|e: PlaError| e.to_string()),
        ) {
            Ok(f) => f,
            Err(e) => {
                report
                    .warnings
                    .push(format!("skipped {}: {e}", path.display()));
                continue;
            }
        };
        // The schedule scales with the width of the unscrambled circuit.
        let base_seed = mix_seed(options.seed, file_idx as u64, 0);
        let base_width = match synthesize_point(&function, options.mode, options, base_seed) {
            Ok(p) => p.circuit.width(),
            Err(e) => {
                report
                    .warnings
                    .push(format!("skipped {}: {e}", path.display()));
                continue;
            }
        };
        // Variants are nested: each schedule point extends the previous
        // one with the additional scramble lines, so a point's hidden
        // state is a superset of its predecessor's.
        let mut current = function.clone();
        let mut current_extra = 0u32;
        for (point_idx, &ratio) in options.schedule.iter().enumerate() {
            let seed = mix_seed(options.seed, file_idx as u64, point_idx as u64);
            let extra = extra_count(ratio, base_width);
            if extra < current_extra {
                current = function.clone();
                current_extra = 0;
            }
            if extra > current_extra {
                let grow = extra - current_extra;
                let result = match options.scramble {
                    ScrambleKind::Inputs => {
                        scramble_inputs(&current, grow, seed).map(|s| s.function)
                    }
                    ScrambleKind::Outputs => {
                        scramble_outputs(&current, grow, seed).map(|s| s.function)
                    }
                };
                match result {
                    Ok(f) => {
                        current = f;
                        current_extra = extra;
                    }
                    Err(e) => {
                        report.warnings.push(format!("skipped {name}@{ratio}: {e}"));
                        continue;
                    }
                }
            }
            let outcome = synthesize_point(&current, options.mode, options, seed)
                .and_then(|point| {
                    point
                        .into_row(&name, options, ratio, extra)
                        .map_err(|e| e.to_string())
                });
            match outcome {
                Ok(row) => report.rows.push(row),
                Err(e) => {
                    report.warnings.push(format!("skipped {name}@{ratio}: {e}"));
                }
            }
        }
    }
    Ok(report)
}

struct BenchPoint {
    circuit: ReversibleCircuit,
    /// (pct ancilla recovered, with-info embedding count): present only for
    /// the structural mode, where the template attack applies.
    structural_attack: Option<(f64, revsec_core::num_bigint::BigUint)>,
}

fn synthesize_point(
    function: &BooleanFunction,
    mode: SynthMode,
    options: &BenchOptions,
    seed: u64,
) -> Result<BenchPoint, String> {
    match mode {
        SynthMode::Bdd => {
            let synth_options = SynthesisOptions {
                order: None,
                complement_mode: options.complement_mode,
                seed,
            };
            let (circuit, record) =
                synthesize_bdd(function, &synth_options).map_err(|e| e.to_string())?;
            let catalog = TemplateCatalog::shannon(options.complement_mode);
            let attack = attack_bdd(&circuit, &catalog);
            let score = score_attack(&attack, &record).map_err(|e| e.to_string())?;
            Ok(BenchPoint {
                circuit,
                structural_attack: Some((
                    score.pct_ancillas_recovered,
                    attack.embeddings.value,
                )),
            })
        }
        SynthMode::Func => {
            let spec = embed(
                function,
                &EmbedOptions {
                    seed,
                    ..Default::default()
                },
            );
            let circuit =
                synthesize_permutation(&spec.permutation).map_err(|e| e.to_string())?;
            let circuit = ReversibleCircuit::with_annotations(
                circuit.width(),
                circuit.gates().to_vec(),
                spec.annotations,
            )
            .map_err(|e| e.to_string())?;
            Ok(BenchPoint {
                circuit,
                structural_attack: None,
            })
        }
    }
}

impl BenchPoint {
    fn into_row(
        self,
        name: &str,
        options: &BenchOptions,
        ratio: f64,
        extra: u32,
    ) -> Result<BenchRow, String> {
        let annotations = self.circuit.annotations().expect("bench circuits carry ground truth");
        let garbage = annotations.iter().filter(|a| a.is_garbage()).count() as u32;
        let ancilla = annotations.iter().filter(|a| a.is_ancillary()).count() as u32;
        let blackbox = count_embeddings_blackbox(&self.circuit).map_err(|e| e.to_string())?;
        let pct_garbage_leaked = if garbage == 0 {
            100.0
        } else {
            let found = annotations
                .iter()
                .enumerate()
                .filter(|(l, a)| a.is_garbage() && blackbox.leaked_garbage.contains(&(*l as u32)))
                .count();
            100.0 * found as f64 / garbage as f64
        };
        // Knowing the functional synthesis scheme does not shrink the
        // candidate set, so the with-info count falls back to the
        // black-box count and nothing is recovered.
        let (pct_ancilla_recovered, embed_with_info) = match self.structural_attack {
            Some((pct, count)) => (pct, count),
            None => (0.0, blackbox.embeddings.value.clone()),
        };
        Ok(BenchRow {
            benchmark: name.to_string(),
            mode: options.mode.label().to_string(),
            ratio,
            extra,
            n: self.circuit.width(),
            garbage,
            ancilla,
            quantum_cost: self.circuit.quantum_cost(),
            pct_garbage_leaked: round1(pct_garbage_leaked),
            embed_blackbox: blackbox.embeddings.value.to_string(),
            pct_ancilla_recovered: round1(pct_ancilla_recovered),
            embed_with_info: embed_with_info.to_string(),
        })
    }
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("csv serialization of plain fields");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

pub fn rows_to_json(rows: &[BenchRow]) -> String {
    serde_json::to_string_pretty(rows).expect("json serialization of plain fields")
}
