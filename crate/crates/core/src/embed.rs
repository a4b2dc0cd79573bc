//! Embedding non-reversible functions into reversible permutations, and
//! the input/output scrambling countermeasure.
//!
//! A function whose most repeated output pattern occurs `m` times needs at
//! least `ceil(log2 m)` garbage outputs to become reversible; the embedding
//! pads the width accordingly, pins the ancilla inputs to constants, and
//! fills every don't-care to a bijection.

use crate::bits::Bits;
use crate::circuit::{InputRole, LineAnnotation, OutputRole};
use crate::function::{BooleanFunction, FunctionError};
use crate::synth_func::{PermError, Permutation};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbedError {
    #[error("scramble count must be at least 1")]
    ZeroCount,
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Permutation(#[from] PermError),
}

/// Value assigned to the ancilla inputs of an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AncillaValue {
    #[default]
    Zero,
    One,
    /// Each ancilla bit drawn from the seeded stream.
    Seeded,
}

/// How unconstrained outputs are filled. FirstFree assigns each one the
/// smallest unused codeword, processing rows in input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DontCarePolicy {
    #[default]
    FirstFree,
}

#[derive(Debug, Clone, Default)]
pub struct EmbedOptions {
    pub ancilla_value: AncillaValue,
    pub dont_care_policy: DontCarePolicy,
    pub seed: u64,
}

/// A reversible completion of a non-reversible function: the permutation
/// plus the line roles that recover the source function.
#[derive(Debug, Clone)]
pub struct ReversibleSpec {
    pub permutation: Permutation,
    pub annotations: Vec<LineAnnotation>,
}

impl ReversibleSpec {
    pub fn width(&self) -> u32 {
        self.permutation.width()
    }

    pub fn num_ancillas(&self) -> u32 {
        self.annotations.iter().filter(|a| a.is_ancillary()).count() as u32
    }

    pub fn num_garbage(&self) -> u32 {
        self.annotations.iter().filter(|a| a.is_garbage()).count() as u32
    }

    /// Evaluates the embedded function: primary inputs from `input`,
    /// ancillas at their constants, primary outputs projected in line order.
    pub fn restrict(&self, input: Bits) -> Bits {
        let mut v = 0u64;
        let mut next = 0u32;
        for (line, ann) in self.annotations.iter().enumerate() {
            let bit = match ann.input {
                InputRole::Primary(_) => {
                    let b = input.bit(next);
                    next += 1;
                    b
                }
                InputRole::Ancillary(c) => c,
            };
            if bit {
                v |= 1 << line;
            }
        }
        let out = self.permutation.apply(v);
        let mut result = Vec::new();
        for (line, ann) in self.annotations.iter().enumerate() {
            if matches!(ann.output, OutputRole::Primary(_)) {
                result.push(out >> line & 1 == 1);
            }
        }
        Bits::from_bools(&result)
    }
}

/// Minimum number of garbage outputs: `ceil(log2 m)` for the maximum
/// output-pattern multiplicity `m` (0 for a bijectively-specified table).
pub fn min_garbage(function: &BooleanFunction) -> u32 {
    let m = function.pattern_stats().max_multiplicity;
    m.next_power_of_two().trailing_zeros()
}

/// Embeds `function` into a reversible permutation.
///
/// Width is `max(num_inputs, num_outputs + min_garbage)`; the extra input
/// lines become constant ancillas and the extra output lines garbage.
/// Functional rows (ancillas at their constants) map to codewords whose
/// primary projection is the function value; every other choice follows the
/// don't-care policy.
pub fn embed(function: &BooleanFunction, options: &EmbedOptions) -> ReversibleSpec {
    let n_in = function.num_inputs();
    let n_out = function.num_outputs();
    let g = min_garbage(function);
    let width = n_in.max(n_out + g);
    let num_anc = width - n_in;
    let num_garb = width - n_out;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let anc_bits: u64 = match options.ancilla_value {
        AncillaValue::Zero => 0,
        AncillaValue::One => {
            if num_anc == 0 {
                0
            } else {
                (1u64 << num_anc) - 1
            }
        }
        AncillaValue::Seeded => {
            if num_anc == 0 {
                0
            } else {
                rng.next_u64() & ((1u64 << num_anc) - 1)
            }
        }
    };

    let size = 1usize << width;
    let mut image = vec![0u64; size];
    let mut used = vec![false; size];
    let mut next_free = 0usize;

    // Constrained rows first (in input order), so the garbage completions
    // a repeated pattern needs are never consumed by don't-care rows; then
    // the don't-cares take the smallest unused codewords.
    let DontCarePolicy::FirstFree = options.dont_care_policy;
    for x in 0..1u64 << n_in {
        let v = x | anc_bits << n_in;
        let y = function
            .evaluate(Bits::new(x, n_in))
            .expect("x fits the function width")
            .value();
        let w = (0..1u64 << num_garb)
            .map(|garb| y | garb << n_out)
            .find(|&w| !used[w as usize])
            .expect("2^garbage codewords exceed the pattern multiplicity");
        used[w as usize] = true;
        image[v as usize] = w;
    }
    for v in 0..size as u64 {
        if v >> n_in == anc_bits {
            continue;
        }
        while used[next_free] {
            next_free += 1;
        }
        used[next_free] = true;
        image[v as usize] = next_free as u64;
    }

    let annotations = (0..width)
        .map(|line| LineAnnotation {
            input: if line < n_in {
                InputRole::Primary(function.input_names()[line as usize].clone())
            } else {
                InputRole::Ancillary(anc_bits >> (line - n_in) & 1 == 1)
            },
            output: if line < n_out {
                OutputRole::Primary(function.output_names()[line as usize].clone())
            } else {
                OutputRole::Garbage
            },
        })
        .collect();

    ReversibleSpec {
        permutation: Permutation::new(width, image)
            .expect("first-free fill always completes a bijection"),
        annotations,
    }
}

/// A scrambled function plus the ground truth an attacker is denied.
#[derive(Debug, Clone)]
pub struct ScrambledInputs {
    pub function: BooleanFunction,
    /// Constant each extra input must take to recover the original.
    pub hidden_values: Vec<bool>,
}

/// Adds `count` extra inputs that behave as hidden ancillas: at the seeded
/// constants the function is unchanged, while any other assignment
/// perturbs every output (a parity of a seeded input subset), so the new
/// inputs genuinely drive every output.
pub fn scramble_inputs(
    function: &BooleanFunction,
    count: u32,
    seed: u64,
) -> Result<ScrambledInputs, EmbedError> {
    if count == 0 {
        return Err(EmbedError::ZeroCount);
    }
    let n = function.num_inputs();
    let m = function.num_outputs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden: Vec<bool> = (0..count).map(|_| rng.next_u32() & 1 == 1).collect();
    let hidden_bits: u64 = hidden
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as u64) << i);
    let masks: Vec<u64> = (0..m)
        .map(|_| loop {
            let s = rng.next_u64() & ((1u64 << n) - 1);
            if s != 0 {
                break s;
            }
        })
        .collect();

    let mut input_names = function.input_names().to_vec();
    for i in 0..count {
        input_names.push(unique_name(&input_names, function.output_names(), "e", i));
    }

    let rows = Bits::all(n + count)
        .map(|v| {
            let x = v.value() & ((1u64 << n) - 1);
            let e = v.value() >> n;
            let base = function.rows()[x as usize];
            if e == hidden_bits {
                base
            } else {
                let mut out = base;
                for (o, &mask) in masks.iter().enumerate() {
                    if (x & mask).count_ones() & 1 == 1 {
                        out = out.flipped(o as u32);
                    }
                }
                out
            }
        })
        .collect();
    let function = BooleanFunction::new(input_names, function.output_names().to_vec(), rows)?;
    Ok(ScrambledInputs {
        function,
        hidden_values: hidden,
    })
}

/// A function with extra garbage-to-be outputs appended.
#[derive(Debug, Clone)]
pub struct ScrambledOutputs {
    pub function: BooleanFunction,
    /// Output indices of the added columns.
    pub added_outputs: Vec<u32>,
}

/// Appends `count` extra outputs, each a seeded non-constant column
/// distinct from every other output column.
pub fn scramble_outputs(
    function: &BooleanFunction,
    count: u32,
    seed: u64,
) -> Result<ScrambledOutputs, EmbedError> {
    if count == 0 {
        return Err(EmbedError::ZeroCount);
    }
    let n = function.num_inputs();
    let m = function.num_outputs();
    let rows = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut columns: Vec<Vec<bool>> = (0..m).map(|o| function.output_column(o)).collect();
    for _ in 0..count {
        let fresh = loop {
            let col: Vec<bool> = (0..rows).map(|_| rng.next_u32() & 1 == 1).collect();
            let constant = col.iter().all(|&b| b) || col.iter().all(|&b| !b);
            if !constant && !columns.contains(&col) {
                break col;
            }
        };
        columns.push(fresh);
    }

    let mut output_names = function.output_names().to_vec();
    for i in 0..count {
        output_names.push(unique_name(function.input_names(), &output_names, "g", i));
    }
    let new_rows = (0..rows)
        .map(|r| Bits::from_bools(&columns.iter().map(|c| c[r]).collect::<Vec<bool>>()))
        .collect();
    let function = BooleanFunction::new(function.input_names().to_vec(), output_names, new_rows)?;
    Ok(ScrambledOutputs {
        function,
        added_outputs: (m..m + count).collect(),
    })
}

fn unique_name(inputs: &[String], outputs: &[String], prefix: &str, i: u32) -> String {
    let mut name = format!("{prefix}{}", i + 1);
    while inputs.contains(&name) || outputs.contains(&name) {
        name.insert(0, '_');
    }
    name
}
