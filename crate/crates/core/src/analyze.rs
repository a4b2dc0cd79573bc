//! The number-of-embeddings security metric and the two reverse-engineering
//! attacks.
//!
//! Black-box view (no knowledge of the synthesis scheme): after discarding
//! outputs leaked by direct input/output connections, every remaining
//! output `y_i` admits `e(k_i) = sum_j C(k_i, j) * 2^j = 3^k_i` candidate
//! embedded functions, where `k_i` counts the inputs driving `y_i` but no
//! earlier output; the total is `(2^r - 1) * prod e(k_i)` over the `r`
//! remaining outputs.
//!
//! Synthesis-aware view: a circuit produced by the BDD flow is partitioned
//! greedily (leftmost-longest) into catalog template matches; unique gate
//! patterns pin their ancilla constants, ambiguity-group patterns leave a
//! factor of the group size, and the surviving choice of primary outputs
//! contributes `2^q`.

use crate::circuit::{Polarity, ReversibleCircuit, ToffoliGate};
use crate::synth_bdd::{
    Role, SynthesisRecord, Template, TemplateCatalog, TemplateGate, TemplateId,
};
use num_bigint::BigUint;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzeError {
    #[error("line {line} out of range for width {width}")]
    LineOutOfRange { line: u32, width: u32 },
    #[error("degenerate circuit: every output is a leaked passthrough")]
    DegenerateCircuit,
    #[error("report and record describe different circuits ({0})")]
    RecordMismatch(String),
}

/// Lines never targeted by any gate; their outputs equal their inputs, so
/// an attacker classifies them as leaked garbage immediately.
pub fn passthrough_lines(circuit: &ReversibleCircuit) -> BTreeSet<u32> {
    let mut targeted = vec![false; circuit.width() as usize];
    for gate in circuit.gates() {
        targeted[gate.target() as usize] = true;
    }
    (0..circuit.width())
        .filter(|&l| !targeted[l as usize])
        .collect()
}

/// Backward cone of influence of an output line: scan gates last to first,
/// absorbing the controls of every gate whose target is already in the cone.
pub fn output_cone(
    circuit: &ReversibleCircuit,
    line: u32,
) -> Result<BTreeSet<u32>, AnalyzeError> {
    if line >= circuit.width() {
        return Err(AnalyzeError::LineOutOfRange {
            line,
            width: circuit.width(),
        });
    }
    let mut cone = BTreeSet::from([line]);
    for gate in circuit.gates().iter().rev() {
        if cone.contains(&gate.target()) {
            cone.extend(gate.controls().iter().map(|c| c.line));
        }
    }
    Ok(cone)
}

/// Per-output structural support under a fixed ascending output order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportProfile {
    /// Output lines the metric ranges over, ascending.
    pub outputs: Vec<u32>,
    /// Cone of influence per output.
    pub supports: Vec<BTreeSet<u32>>,
    /// Support sizes `m_i`.
    pub m_list: Vec<u32>,
    /// Novel-input counts `k_i`.
    pub k_list: Vec<u32>,
}

/// An arbitrary-precision embedding count together with its factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingCount {
    pub value: BigUint,
    /// The output-combination factor (`2^r - 1` or `2^q`).
    pub output_factor: BigUint,
    /// Remaining factors (`e(k_i)` terms, or ambiguity sizes).
    pub component_factors: Vec<BigUint>,
}

impl Serialize for EmbeddingCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EmbeddingCount", 3)?;
        s.serialize_field("value", &self.value.to_string())?;
        s.serialize_field("output_factor", &self.output_factor.to_string())?;
        s.serialize_field(
            "component_factors",
            &self
                .component_factors
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<String>>(),
        )?;
        s.end()
    }
}

/// Candidate embedded functions at one output driven by `k` novel inputs:
/// `e(k) = sum_{j=0..k} C(k,j) * 2^j`, which collapses to `3^k`.
pub fn embeddings_per_output(k: u32) -> BigUint {
    BigUint::from(3u32).pow(k)
}

/// `EMB = (2^r - 1) * prod e(k_i)` over `r` outputs.
pub fn blackbox_count_from_ks(r: u32, ks: &[u32]) -> EmbeddingCount {
    let output_factor = (BigUint::from(1u32) << r) - 1u32;
    let component_factors: Vec<BigUint> =
        ks.iter().map(|&k| embeddings_per_output(k)).collect();
    let value = component_factors
        .iter()
        .fold(output_factor.clone(), |acc, f| acc * f);
    EmbeddingCount {
        value,
        output_factor,
        component_factors,
    }
}

/// Findings of the synthesis-agnostic analysis.
#[derive(Debug, Clone, Serialize)]
pub struct BlackboxReport {
    pub leaked_garbage: BTreeSet<u32>,
    pub profile: SupportProfile,
    pub embeddings: EmbeddingCount,
}

/// The black-box metric for a circuit. Leaked passthrough outputs are
/// removed first; `k_i` is taken in ascending line order over the rest.
pub fn count_embeddings_blackbox(
    circuit: &ReversibleCircuit,
) -> Result<BlackboxReport, AnalyzeError> {
    let leaked = passthrough_lines(circuit);
    let outputs: Vec<u32> = (0..circuit.width()).filter(|l| !leaked.contains(l)).collect();
    if outputs.is_empty() {
        return Err(AnalyzeError::DegenerateCircuit);
    }
    let mut union: BTreeSet<u32> = BTreeSet::new();
    let mut supports = Vec::with_capacity(outputs.len());
    let mut m_list = Vec::with_capacity(outputs.len());
    let mut k_list = Vec::with_capacity(outputs.len());
    for &line in &outputs {
        let cone = output_cone(circuit, line)?;
        m_list.push(cone.len() as u32);
        k_list.push(cone.difference(&union).count() as u32);
        union.extend(cone.iter().copied());
        supports.push(cone);
    }
    let embeddings = blackbox_count_from_ks(outputs.len() as u32, &k_list);
    Ok(BlackboxReport {
        leaked_garbage: leaked,
        profile: SupportProfile {
            outputs,
            supports,
            m_list,
            k_list,
        },
        embeddings,
    })
}

/// One span of the attack's greedy partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackPartition {
    pub start: usize,
    pub end: usize,
    /// Matched template, or `None` for an unmatched span.
    pub matched: Option<TemplateId>,
    /// Result line of the matched template.
    pub result_line: Option<u32>,
}

/// Findings of the synthesis-aware attack.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub width: u32,
    pub gate_count: usize,
    pub leaked_garbage: BTreeSet<u32>,
    /// Leaked lines read on the input side: assumed primary inputs.
    pub assumed_primary_inputs: BTreeSet<u32>,
    pub candidate_ancillas: BTreeSet<u32>,
    pub recovered_ancillas: BTreeMap<u32, bool>,
    /// Unresolved ancilla lines with their candidate-value factors.
    pub unresolved_ancillas: BTreeMap<u32, u32>,
    pub definite_primary_outputs: BTreeSet<u32>,
    pub potential_primary_outputs: BTreeSet<u32>,
    pub partitions: Vec<AttackPartition>,
    pub embeddings: EmbeddingCount,
    /// Leaked fraction of the true garbage outputs, when the circuit
    /// carries designer annotations.
    pub pct_garbage_leaked: Option<f64>,
}

struct LineFacts {
    passthrough: Vec<bool>,
    first_target: Vec<Option<usize>>,
}

impl LineFacts {
    fn new(circuit: &ReversibleCircuit) -> Self {
        let mut passthrough = vec![true; circuit.width() as usize];
        let mut first_target = vec![None; circuit.width() as usize];
        for (i, gate) in circuit.gates().iter().enumerate() {
            let t = gate.target() as usize;
            passthrough[t] = false;
            first_target[t].get_or_insert(i);
        }
        LineFacts {
            passthrough,
            first_target,
        }
    }
}

fn split_template_gate(tg: &TemplateGate) -> (Polarity, Option<(Role, Polarity)>) {
    let mut select = None;
    let mut child = None;
    for &(role, pol) in &tg.controls {
        match role {
            Role::Select => select = Some(pol),
            other => child = Some((other, pol)),
        }
    }
    (
        select.expect("every template gate has a select control"),
        child,
    )
}

/// Tries to match `template` at `gates[start..]`. The select role must land
/// on a passthrough line (BDD variables are never targeted) except for
/// VariableCopy, which also copies shared internal values. A child control
/// may appear with flipped polarity only on a targeted line: that is what
/// complement-mode compensation produces.
fn try_match(
    template: &Template,
    gates: &[ToffoliGate],
    start: usize,
    facts: &LineFacts,
) -> Option<u32> {
    let len = template.gates.len();
    if len == 0 || start + len > gates.len() {
        return None;
    }
    let span = &gates[start..start + len];
    let result = span[0].target();
    if span.iter().any(|g| g.target() != result) {
        return None;
    }
    // The result line must be fresh: this span defines it first.
    if facts.first_target[result as usize] != Some(start) {
        return None;
    }
    let parts: Vec<(Polarity, Option<(Role, Polarity)>)> =
        template.gates.iter().map(split_template_gate).collect();
    for (gate, (_, child)) in span.iter().zip(&parts) {
        if gate.controls().len() != 1 + child.is_some() as usize {
            return None;
        }
    }

    'candidate: for c0 in span[0].controls() {
        if c0.polarity != parts[0].0 {
            continue;
        }
        let select = c0.line;
        if template.id != TemplateId::VariableCopy && !facts.passthrough[select as usize] {
            continue;
        }
        let mut child_lines = Vec::new();
        for (gate, (select_pol, child)) in span.iter().zip(&parts) {
            let Some(sc) = gate.controls().iter().find(|c| c.line == select) else {
                continue 'candidate;
            };
            if sc.polarity != *select_pol {
                continue 'candidate;
            }
            match child {
                None => {}
                Some((_, want_pol)) => {
                    let Some(cc) = gate.controls().iter().find(|c| c.line != select) else {
                        continue 'candidate;
                    };
                    let flipped_on_ancilla =
                        cc.polarity != *want_pol && !facts.passthrough[cc.line as usize];
                    if cc.polarity != *want_pol && !flipped_on_ancilla {
                        continue 'candidate;
                    }
                    child_lines.push(cc.line);
                }
            }
        }
        if child_lines.len() == 2 && child_lines[0] == child_lines[1] {
            continue 'candidate;
        }
        return Some(result);
    }
    None
}

fn never_controlled_after_last_def(circuit: &ReversibleCircuit, line: u32) -> bool {
    let last = circuit.gates().iter().rposition(|g| g.target() == line);
    let from = last.map_or(0, |i| i + 1);
    circuit.gates()[from..]
        .iter()
        .all(|g| g.controls().iter().all(|c| c.line != line))
}

/// Runs the synthesis-aware attack against a circuit assumed to come from
/// the BDD flow whose look-up table is `catalog`.
pub fn attack_bdd(circuit: &ReversibleCircuit, catalog: &TemplateCatalog) -> AttackReport {
    let facts = LineFacts::new(circuit);
    let leaked: BTreeSet<u32> = passthrough_lines(circuit);
    let candidate_ancillas: BTreeSet<u32> = (0..circuit.width())
        .filter(|l| !leaked.contains(l))
        .collect();

    let gates = circuit.gates();
    let mut partitions: Vec<AttackPartition> = Vec::new();
    let mut unmatched_start: Option<usize> = None;
    let mut i = 0usize;
    while i < gates.len() {
        let mut hit: Option<(&Template, u32)> = None;
        for len in [2usize, 1] {
            for template in catalog.templates().iter().filter(|t| t.gates.len() == len) {
                if let Some(result) = try_match(template, gates, i, &facts) {
                    hit = Some((template, result));
                    break;
                }
            }
            if hit.is_some() {
                break;
            }
        }
        match hit {
            Some((template, result)) => {
                if let Some(start) = unmatched_start.take() {
                    partitions.push(AttackPartition {
                        start,
                        end: i,
                        matched: None,
                        result_line: None,
                    });
                }
                partitions.push(AttackPartition {
                    start: i,
                    end: i + template.gates.len(),
                    matched: Some(template.id),
                    result_line: Some(result),
                });
                i += template.gates.len();
            }
            None => {
                unmatched_start.get_or_insert(i);
                i += 1;
            }
        }
    }
    if let Some(start) = unmatched_start {
        partitions.push(AttackPartition {
            start,
            end: gates.len(),
            matched: None,
            result_line: None,
        });
    }

    let mut recovered_ancillas = BTreeMap::new();
    let mut unresolved_ancillas = BTreeMap::new();
    for p in &partitions {
        match p.matched {
            Some(id) => {
                let template = catalog.get(id).expect("matched template is in the catalog");
                let size = catalog.group_size(template);
                let line = p.result_line.expect("matched spans carry a result line");
                if size > 1 {
                    unresolved_ancillas.insert(line, size as u32);
                } else {
                    recovered_ancillas
                        .insert(line, template.ancilla_init.unwrap_or(false));
                }
            }
            None => {
                // Every line first defined inside the unmatched span stays
                // an unknown bit.
                for (idx, gate) in gates[p.start..p.end].iter().enumerate() {
                    if facts.first_target[gate.target() as usize] == Some(p.start + idx) {
                        unresolved_ancillas.entry(gate.target()).or_insert(2);
                    }
                }
            }
        }
    }

    // The final sub-circuit's target, never used as a control afterwards,
    // is the attacker's claimed primary output; every other non-garbage
    // output only remains a candidate.
    let definite_primary_outputs: BTreeSet<u32> = partitions
        .last()
        .map(|p| {
            gates[p.start..p.end]
                .iter()
                .map(|g| g.target())
                .filter(|&l| never_controlled_after_last_def(circuit, l))
                .collect()
        })
        .unwrap_or_default();
    let potential_primary_outputs: BTreeSet<u32> = candidate_ancillas
        .iter()
        .copied()
        .filter(|l| !definite_primary_outputs.contains(l))
        .collect();

    let q = potential_primary_outputs.len() as u32;
    let output_factor = BigUint::from(1u32) << q;
    let component_factors: Vec<BigUint> = unresolved_ancillas
        .values()
        .map(|&s| BigUint::from(s))
        .collect();
    let value = component_factors
        .iter()
        .fold(output_factor.clone(), |acc, f| acc * f);

    let pct_garbage_leaked = circuit.annotations().map(|ann| {
        let garbage: Vec<u32> = ann
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_garbage())
            .map(|(l, _)| l as u32)
            .collect();
        if garbage.is_empty() {
            100.0
        } else {
            let found = garbage.iter().filter(|l| leaked.contains(l)).count();
            100.0 * found as f64 / garbage.len() as f64
        }
    });

    AttackReport {
        width: circuit.width(),
        gate_count: gates.len(),
        leaked_garbage: leaked.clone(),
        assumed_primary_inputs: leaked,
        candidate_ancillas,
        recovered_ancillas,
        unresolved_ancillas,
        definite_primary_outputs,
        potential_primary_outputs,
        partitions,
        embeddings: EmbeddingCount {
            value,
            output_factor,
            component_factors,
        },
        pct_garbage_leaked,
    }
}

/// Attack findings measured against the designer's ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scorecard {
    /// Percent of true ancillas whose value was recovered correctly.
    pub pct_ancillas_recovered: f64,
    /// Recovered values contradicting the ground truth (should be zero).
    pub wrong_values: u32,
    /// Whether every true primary output is in definite or potential.
    pub primary_outputs_covered: bool,
    /// Percent of recorded gate spans reproduced exactly by the partition.
    pub partition_agreement: f64,
    /// Percent of true garbage outputs leaked by passthrough.
    pub pct_garbage_leaked: f64,
}

pub fn score_attack(
    report: &AttackReport,
    record: &SynthesisRecord,
) -> Result<Scorecard, AnalyzeError> {
    if report.width != record.width || report.gate_count != record.gate_count {
        return Err(AnalyzeError::RecordMismatch(format!(
            "report {}x{} vs record {}x{}",
            report.width, report.gate_count, record.width, record.gate_count
        )));
    }
    let truth = record.ancilla_values();
    let mut correct = 0u32;
    let mut wrong = 0u32;
    for (line, value) in &truth {
        match report.recovered_ancillas.get(line) {
            Some(v) if v == value => correct += 1,
            Some(_) => wrong += 1,
            None => {}
        }
    }
    let pct_ancillas_recovered = if truth.is_empty() {
        100.0
    } else {
        100.0 * correct as f64 / truth.len() as f64
    };

    let primary_outputs_covered = record.primary_output_lines().iter().all(|l| {
        report.definite_primary_outputs.contains(l)
            || report.potential_primary_outputs.contains(l)
    });

    let spans: Vec<(usize, usize)> = record
        .partitions
        .iter()
        .filter(|p| p.end > p.start)
        .map(|p| (p.start, p.end))
        .collect();
    let agree = spans
        .iter()
        .filter(|(s, e)| {
            report
                .partitions
                .iter()
                .any(|ap| ap.matched.is_some() && ap.start == *s && ap.end == *e)
        })
        .count();
    let partition_agreement = if spans.is_empty() {
        100.0
    } else {
        100.0 * agree as f64 / spans.len() as f64
    };

    let garbage: Vec<u32> = record
        .annotations
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_garbage())
        .map(|(l, _)| l as u32)
        .collect();
    let pct_garbage_leaked = if garbage.is_empty() {
        100.0
    } else {
        let found = garbage
            .iter()
            .filter(|l| report.leaked_garbage.contains(l))
            .count();
        100.0 * found as f64 / garbage.len() as f64
    };

    Ok(Scorecard {
        pct_ancillas_recovered,
        wrong_values: wrong,
        primary_outputs_covered,
        partition_agreement,
        pct_garbage_leaked,
    })
}
