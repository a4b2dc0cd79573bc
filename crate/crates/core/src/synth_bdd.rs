//! Structural synthesis: each BDD node is substituted with a reversible
//! sub-circuit drawn from a template catalog, depth-first, children before
//! parents. The result line of every template is a fresh ancilla, so
//! primary-input lines are never gate targets and child values survive for
//! shared use. A [`SynthesisRecord`] captures the designer's ground truth
//! (line roles, ancilla constants, per-node gate spans) for attack scoring.

use crate::bdd::{Bdd, BddError, NodeRef, ShapeKind};
use crate::bits::Bits;
use crate::circuit::{
    CircuitError, Control, InputRole, LineAnnotation, OutputRole, Polarity, ReversibleCircuit,
    ToffoliGate,
};
use crate::function::BooleanFunction;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

/// Line roles a template's gates are written over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Select,
    Low,
    High,
}

/// One gate of a template; the target is always the result line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateGate {
    pub controls: Vec<(Role, Polarity)>,
}

impl TemplateGate {
    fn new(controls: &[(Role, Polarity)]) -> Self {
        TemplateGate {
            controls: controls.to_vec(),
        }
    }
}

/// Identifiers for the built-in Shannon templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemplateId {
    General,
    HighZero,
    HighOne,
    LowZero,
    LowZeroComplement,
    LowOne,
    LowOneComplement,
    Variable,
    VariableCopy,
    NegatedVariable,
}

impl std::fmt::Display for TemplateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TemplateId::General => "general",
            TemplateId::HighZero => "high-zero",
            TemplateId::HighOne => "high-one",
            TemplateId::LowZero => "low-zero",
            TemplateId::LowZeroComplement => "low-zero-complement",
            TemplateId::LowOne => "low-one",
            TemplateId::LowOneComplement => "low-one-complement",
            TemplateId::Variable => "variable",
            TemplateId::VariableCopy => "variable-copy",
            TemplateId::NegatedVariable => "negated-variable",
        };
        f.write_str(s)
    }
}

/// A node-shape -> gate-pattern record. `ancilla_init` is the constant the
/// fresh result line starts at; `None` means the template reuses the select
/// line and emits no gates. Templates sharing an `ambiguity_group` have
/// identical gate patterns but distinct ancilla constants, so an attacker
/// matching the pattern cannot resolve the constant.
#[derive(Debug, Clone)]
pub struct Template {
    pub id: TemplateId,
    pub shape: ShapeKind,
    pub gates: Vec<TemplateGate>,
    pub ancilla_init: Option<bool>,
    pub semantics: fn(bool, bool, bool) -> bool,
    pub semantics_text: &'static str,
    pub ambiguity_group: Option<&'static str>,
}

/// Simulates a template's gate pattern over one assignment of its role
/// lines; returns the value left on the result line.
pub fn simulate_template(template: &Template, select: bool, low: bool, high: bool) -> bool {
    let init = match template.ancilla_init {
        None => return select,
        Some(init) => init,
    };
    let mut state = Bits::from_bools(&[select, low, high, init]);
    for tg in &template.gates {
        let controls = tg.controls.iter().map(|&(role, polarity)| Control {
            line: role_line(role),
            polarity,
        });
        let gate = ToffoliGate::new(controls, RESULT_LINE).expect("template gate is valid");
        state = gate.apply(state).expect("template state is wide enough");
    }
    state.bit(RESULT_LINE)
}

const RESULT_LINE: u32 = 3;

fn role_line(role: Role) -> u32 {
    match role {
        Role::Select => 0,
        Role::Low => 1,
        Role::High => 2,
    }
}

/// Problem found by [`TemplateCatalog::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogDiagnostic {
    pub template: TemplateId,
    pub message: String,
}

/// Ordered list of templates; order is the tie-break for attack matching.
#[derive(Debug, Clone)]
pub struct TemplateCatalog {
    templates: Vec<Template>,
}

impl TemplateCatalog {
    /// The built-in Shannon catalog without complement realizations; every
    /// gate pattern in it is unique.
    pub fn default_catalog() -> Self {
        Self::shannon(false)
    }

    /// The Shannon catalog. With `complement_mode` the LowZero and LowOne
    /// patterns gain init-1 siblings realizing the complemented co-factor,
    /// grouped with their init-0 originals.
    pub fn shannon(complement_mode: bool) -> Self {
        use Polarity::{Negative, Positive};
        use Role::{High, Low, Select};

        let mut templates = vec![
            Template {
                id: TemplateId::General,
                shape: ShapeKind::General,
                gates: vec![
                    TemplateGate::new(&[(Select, Positive), (High, Positive)]),
                    TemplateGate::new(&[(Select, Negative), (Low, Positive)]),
                ],
                ancilla_init: Some(false),
                semantics: |x, l, h| if x { h } else { l },
                semantics_text: "x ? high : low",
                ambiguity_group: None,
            },
            Template {
                id: TemplateId::HighZero,
                shape: ShapeKind::HighZero,
                gates: vec![TemplateGate::new(&[(Select, Negative), (Low, Positive)])],
                ancilla_init: Some(false),
                semantics: |x, l, _| !x && l,
                semantics_text: "!x & low",
                ambiguity_group: None,
            },
            Template {
                id: TemplateId::HighOne,
                shape: ShapeKind::HighOne,
                gates: vec![
                    TemplateGate::new(&[(Select, Positive)]),
                    TemplateGate::new(&[(Select, Negative), (Low, Positive)]),
                ],
                ancilla_init: Some(false),
                semantics: |x, l, _| x || l,
                semantics_text: "x | low",
                ambiguity_group: None,
            },
            Template {
                id: TemplateId::LowZero,
                shape: ShapeKind::LowZero,
                gates: vec![TemplateGate::new(&[(Select, Positive), (High, Positive)])],
                ancilla_init: Some(false),
                semantics: |x, _, h| x && h,
                semantics_text: "x & high",
                ambiguity_group: complement_mode.then_some("low-zero"),
            },
        ];
        if complement_mode {
            templates.push(Template {
                id: TemplateId::LowZeroComplement,
                shape: ShapeKind::LowZero,
                gates: vec![TemplateGate::new(&[(Select, Positive), (High, Positive)])],
                ancilla_init: Some(true),
                semantics: |x, _, h| !(x && h),
                semantics_text: "!(x & high)",
                ambiguity_group: Some("low-zero"),
            });
        }
        templates.push(Template {
            id: TemplateId::LowOne,
            shape: ShapeKind::LowOne,
            gates: vec![
                TemplateGate::new(&[(Select, Negative)]),
                TemplateGate::new(&[(Select, Positive), (High, Positive)]),
            ],
            ancilla_init: Some(false),
            semantics: |x, _, h| !x || h,
            semantics_text: "!x | high",
            ambiguity_group: complement_mode.then_some("low-one"),
        });
        if complement_mode {
            templates.push(Template {
                id: TemplateId::LowOneComplement,
                shape: ShapeKind::LowOne,
                gates: vec![
                    TemplateGate::new(&[(Select, Negative)]),
                    TemplateGate::new(&[(Select, Positive), (High, Positive)]),
                ],
                ancilla_init: Some(true),
                semantics: |x, _, h| x && !h,
                semantics_text: "x & !high",
                ambiguity_group: Some("low-one"),
            });
        }
        templates.extend([
            Template {
                id: TemplateId::Variable,
                shape: ShapeKind::Variable,
                gates: vec![],
                ancilla_init: None,
                semantics: |x, _, _| x,
                semantics_text: "x",
                ambiguity_group: None,
            },
            Template {
                id: TemplateId::VariableCopy,
                shape: ShapeKind::Variable,
                gates: vec![TemplateGate::new(&[(Role::Select, Positive)])],
                ancilla_init: Some(false),
                semantics: |x, _, _| x,
                semantics_text: "x",
                ambiguity_group: None,
            },
            Template {
                id: TemplateId::NegatedVariable,
                shape: ShapeKind::NegatedVariable,
                gates: vec![TemplateGate::new(&[(Role::Select, Negative)])],
                ancilla_init: Some(false),
                semantics: |x, _, _| !x,
                semantics_text: "!x",
                ambiguity_group: None,
            },
        ]);
        TemplateCatalog { templates }
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn get(&self, id: TemplateId) -> Option<&Template> {
        self.templates.iter().find(|t| t.id == id)
    }

    /// Number of templates sharing `template`'s gate pattern (1 = unique).
    pub fn group_size(&self, template: &Template) -> usize {
        match template.ambiguity_group {
            None => 1,
            Some(g) => self
                .templates
                .iter()
                .filter(|t| t.ambiguity_group == Some(g))
                .count(),
        }
    }

    /// Names of the ambiguity groups present.
    pub fn ambiguity_groups(&self) -> Vec<&'static str> {
        let mut groups: Vec<&'static str> =
            self.templates.iter().filter_map(|t| t.ambiguity_group).collect();
        groups.sort_unstable();
        groups.dedup();
        groups
    }

    /// The init-0 template for a node shape.
    pub fn base_template(&self, shape: ShapeKind) -> &Template {
        self.templates
            .iter()
            .find(|t| t.shape == shape && t.ancilla_init != Some(true) && t.id != TemplateId::VariableCopy)
            .expect("catalog covers every producible shape")
    }

    /// The init-1 sibling of a shape's base template, if the catalog has one.
    pub fn complement_sibling(&self, shape: ShapeKind) -> Option<&Template> {
        self.templates
            .iter()
            .find(|t| t.shape == shape && t.ancilla_init == Some(true))
    }

    /// Exhaustively simulates every template against its declared semantics
    /// and checks ambiguity-group consistency.
    pub fn validate(&self) -> Vec<CatalogDiagnostic> {
        let mut out = Vec::new();
        for t in &self.templates {
            for assignment in 0..8u32 {
                let (x, l, h) = (assignment & 1 == 1, assignment & 2 == 2, assignment & 4 == 4);
                let got = simulate_template(t, x, l, h);
                let want = (t.semantics)(x, l, h);
                if got != want {
                    out.push(CatalogDiagnostic {
                        template: t.id,
                        message: format!(
                            "semantics mismatch at (x={}, low={}, high={}): got {got}, declared {want}",
                            x as u8, l as u8, h as u8
                        ),
                    });
                }
            }
        }
        // Ambiguity groups: identical patterns, distinct constants.
        for (i, a) in self.templates.iter().enumerate() {
            for b in &self.templates[i + 1..] {
                let same_pattern = !a.gates.is_empty() && normalized(a) == normalized(b);
                let same_group =
                    a.ambiguity_group.is_some() && a.ambiguity_group == b.ambiguity_group;
                if same_pattern && !same_group {
                    out.push(CatalogDiagnostic {
                        template: b.id,
                        message: format!("shares a gate pattern with {} but not an ambiguity group", a.id),
                    });
                }
                if same_group {
                    if a.gates != b.gates {
                        out.push(CatalogDiagnostic {
                            template: b.id,
                            message: format!("in group with {} but patterns differ", a.id),
                        });
                    }
                    if a.ancilla_init == b.ancilla_init {
                        out.push(CatalogDiagnostic {
                            template: b.id,
                            message: format!("in group with {} but ancilla constants equal", a.id),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Gate pattern with Low/High collapsed: what an attacker can observe.
fn normalized(t: &Template) -> Vec<Vec<(bool, Polarity)>> {
    t.gates
        .iter()
        .map(|g| {
            let mut ctl: Vec<(bool, Polarity)> = g
                .controls
                .iter()
                .map(|&(role, pol)| (role == Role::Select, pol))
                .collect();
            ctl.sort_by_key(|&(is_sel, pol)| (!is_sel, pol == Polarity::Negative));
            ctl
        })
        .collect()
}

/// Options for [`synthesize_bdd`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SynthesisOptions {
    pub order: Option<Vec<u32>>,
    pub complement_mode: bool,
    pub seed: u64,
}

/// One node's gate span. Zero-length spans mark gateless templates
/// (Variable reuse); `complemented` records an init-1 realization whose
/// parents compensated by swapping control polarity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedPartition {
    pub start: usize,
    pub end: usize,
    pub template: TemplateId,
    pub result_line: u32,
    pub complemented: bool,
}

/// Designer-side ground truth for a synthesized circuit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisRecord {
    pub width: u32,
    pub gate_count: usize,
    pub annotations: Vec<LineAnnotation>,
    pub partitions: Vec<RecordedPartition>,
    pub options: SynthesisOptions,
}

impl SynthesisRecord {
    /// True ancilla lines with their constants.
    pub fn ancilla_values(&self) -> Vec<(u32, bool)> {
        self.annotations
            .iter()
            .enumerate()
            .filter_map(|(line, a)| match a.input {
                InputRole::Ancillary(v) => Some((line as u32, v)),
                InputRole::Primary(_) => None,
            })
            .collect()
    }

    /// Lines annotated as primary outputs.
    pub fn primary_output_lines(&self) -> Vec<u32> {
        self.annotations
            .iter()
            .enumerate()
            .filter_map(|(line, a)| match a.output {
                OutputRole::Primary(_) => Some(line as u32),
                OutputRole::Garbage => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Synthesizes a reversible circuit for `function` by traversing its BDD
/// depth-first (post-order, low before high) and instantiating the matching
/// template per node. In complement mode, eligible non-root nodes flip a
/// seeded coin between their ambiguity-group siblings; the parent
/// compensates by swapping the polarity of its control on that child line,
/// so the declared outputs still realize the function exactly.
pub fn synthesize_bdd(
    function: &BooleanFunction,
    options: &SynthesisOptions,
) -> Result<(ReversibleCircuit, SynthesisRecord), SynthError> {
    let bdd = Bdd::build(function, options.order.as_deref())?;
    let catalog = TemplateCatalog::shannon(options.complement_mode);
    let n_in = function.num_inputs();

    let root_ids: HashSet<u32> = bdd
        .roots()
        .iter()
        .filter_map(|r| match r {
            NodeRef::Node(id) => Some(*id),
            _ => None,
        })
        .collect();
    let mut root_mult: HashMap<u32, u32> = HashMap::new();
    for r in bdd.roots() {
        if let NodeRef::Node(id) = r {
            *root_mult.entry(*id).or_insert(0) += 1;
        }
    }

    let mut synth = Synthesizer {
        bdd: &bdd,
        catalog: &catalog,
        rng: ChaCha8Rng::seed_from_u64(options.seed),
        complement_mode: options.complement_mode,
        root_ids,
        n_in,
        gates: Vec::new(),
        partitions: Vec::new(),
        ancilla_inits: Vec::new(),
        results: HashMap::new(),
        visited: HashSet::new(),
    };
    for root in bdd.roots().to_vec() {
        if let NodeRef::Node(id) = root {
            synth.visit(id)?;
        }
    }

    // Assign each output a line, copying shared root values to fresh
    // ancillas so no primary-output line is ever a later control.
    let mut claimed: HashMap<u32, usize> = HashMap::new();
    let mut output_lines = Vec::with_capacity(bdd.roots().len());
    for (out_idx, root) in bdd.roots().to_vec().into_iter().enumerate() {
        let line = match root {
            NodeRef::Zero => synth.alloc(false),
            NodeRef::One => synth.alloc(true),
            NodeRef::Node(id) => {
                let (line, complemented) = synth.results[&id];
                debug_assert!(!complemented, "root realizations are never complemented");
                let node = *bdd.node(id)?;
                let variable_reuse_blocked = bdd.classify_node(root)?.kind()
                    == ShapeKind::Variable
                    && bdd.var_node_count(node.var) > 1;
                let needs_copy = bdd.parent_count(id) > 0
                    || root_mult[&id] > 1
                    || variable_reuse_blocked
                    || claimed.contains_key(&line);
                if needs_copy {
                    let copy = synth.alloc(false);
                    let start = synth.gates.len();
                    synth
                        .gates
                        .push(ToffoliGate::new([Control::positive(line)], copy)?);
                    synth.partitions.push(RecordedPartition {
                        start,
                        end: start + 1,
                        template: TemplateId::VariableCopy,
                        result_line: copy,
                        complemented: false,
                    });
                    copy
                } else {
                    line
                }
            }
        };
        claimed.insert(line, out_idx);
        output_lines.push(line);
    }

    let width = n_in + synth.ancilla_inits.len() as u32;
    let annotations: Vec<LineAnnotation> = (0..width)
        .map(|line| {
            let input = if line < n_in {
                InputRole::Primary(function.input_names()[line as usize].clone())
            } else {
                InputRole::Ancillary(synth.ancilla_inits[(line - n_in) as usize])
            };
            let output = match claimed.get(&line) {
                Some(&out_idx) => {
                    OutputRole::Primary(function.output_names()[out_idx].clone())
                }
                None => OutputRole::Garbage,
            };
            LineAnnotation { input, output }
        })
        .collect();

    let gate_count = synth.gates.len();
    let circuit = ReversibleCircuit::with_annotations(width, synth.gates, annotations.clone())?;
    let record = SynthesisRecord {
        width,
        gate_count,
        annotations,
        partitions: synth.partitions,
        options: options.clone(),
    };
    Ok((circuit, record))
}

struct Synthesizer<'a> {
    bdd: &'a Bdd,
    catalog: &'a TemplateCatalog,
    rng: ChaCha8Rng,
    complement_mode: bool,
    root_ids: HashSet<u32>,
    n_in: u32,
    gates: Vec<ToffoliGate>,
    partitions: Vec<RecordedPartition>,
    ancilla_inits: Vec<bool>,
    /// Node id -> (line carrying its value, complemented?).
    results: HashMap<u32, (u32, bool)>,
    visited: HashSet<u32>,
}

impl Synthesizer<'_> {
    fn alloc(&mut self, init: bool) -> u32 {
        let line = self.n_in + self.ancilla_inits.len() as u32;
        self.ancilla_inits.push(init);
        line
    }

    fn child_control(&self, child: NodeRef, polarity: Polarity) -> Control {
        let NodeRef::Node(id) = child else {
            unreachable!("templates never place controls on terminal children")
        };
        let (line, complemented) = self.results[&id];
        let polarity = if complemented {
            match polarity {
                Polarity::Positive => Polarity::Negative,
                Polarity::Negative => Polarity::Positive,
            }
        } else {
            polarity
        };
        Control { line, polarity }
    }

    fn visit(&mut self, id: u32) -> Result<(), SynthError> {
        if !self.visited.insert(id) {
            return Ok(());
        }
        let node = *self.bdd.node(id)?;
        for child in [node.low, node.high] {
            if let NodeRef::Node(c) = child {
                self.visit(c)?;
            }
        }
        let shape = self.bdd.classify_node(NodeRef::Node(id))?;
        let kind = shape.kind();

        if kind == ShapeKind::Variable {
            // The select line already carries the value; nothing to emit.
            let cursor = self.gates.len();
            self.partitions.push(RecordedPartition {
                start: cursor,
                end: cursor,
                template: TemplateId::Variable,
                result_line: node.var,
                complemented: false,
            });
            self.results.insert(id, (node.var, false));
            return Ok(());
        }

        let mut template = self.catalog.base_template(kind);
        let mut complemented = false;
        let eligible = self.complement_mode
            && matches!(kind, ShapeKind::LowZero | ShapeKind::LowOne)
            && !self.root_ids.contains(&id);
        if eligible && self.rng.next_u32() & 1 == 1 {
            template = self
                .catalog
                .complement_sibling(kind)
                .expect("complement catalog has the sibling");
            complemented = true;
        }

        let result = self.alloc(template.ancilla_init.expect("gate templates have a constant"));
        let start = self.gates.len();
        for tg in &template.gates {
            let controls: Vec<Control> = tg
                .controls
                .iter()
                .map(|&(role, pol)| match role {
                    Role::Select => Control {
                        line: node.var,
                        polarity: pol,
                    },
                    Role::Low => self.child_control(node.low, pol),
                    Role::High => self.child_control(node.high, pol),
                })
                .collect();
            self.gates.push(ToffoliGate::new(controls, result)?);
        }
        self.partitions.push(RecordedPartition {
            start,
            end: self.gates.len(),
            template: template.id,
            result_line: result,
            complemented,
        });
        self.results.insert(id, (result, complemented));
        Ok(())
    }
}

/// Simulates `circuit` with ancillas pinned to their recorded constants and
/// projects the recorded primary outputs; the result should equal the
/// source function. Used as the correctness oracle throughout the tests.
pub fn realized_function(
    circuit: &ReversibleCircuit,
    record: &SynthesisRecord,
    input: Bits,
) -> Result<Bits, CircuitError> {
    let mut state = Bits::zero(circuit.width());
    let mut next_primary = 0u32;
    for (line, ann) in record.annotations.iter().enumerate() {
        match ann.input {
            InputRole::Primary(_) => {
                state = state.with_bit(line as u32, input.bit(next_primary));
                next_primary += 1;
            }
            InputRole::Ancillary(v) => {
                state = state.with_bit(line as u32, v);
            }
        }
    }
    let out = circuit.simulate(state)?;
    let primaries = record.primary_output_lines();
    let mut result = Bits::zero(primaries.len() as u32);
    for (i, line) in primaries.iter().enumerate() {
        result = result.with_bit(i as u32, out.bit(*line));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{four_term_example, BooleanFunction};

    fn and2() -> BooleanFunction {
        BooleanFunction::from_fn(2, 1, |v| Bits::new((v.bit(0) && v.bit(1)) as u64, 1))
    }

    /// The recorded primary outputs must reproduce the function for every
    /// assignment, with recorded ancilla constants applied.
    fn assert_realizes(f: &BooleanFunction, options: &SynthesisOptions) {
        let (circuit, record) = synthesize_bdd(f, options).unwrap();
        for v in Bits::all(f.num_inputs()) {
            let got = realized_function(&circuit, &record, v).unwrap();
            // Output order: primary_output_lines is ascending by line, which
            // may permute the declared outputs; map through annotations.
            let lines = record.primary_output_lines();
            let expect = f.evaluate(v).unwrap();
            for (i, line) in lines.iter().enumerate() {
                let name = match &record.annotations[*line as usize].output {
                    OutputRole::Primary(n) => n.clone(),
                    OutputRole::Garbage => unreachable!(),
                };
                let out_idx = f
                    .output_names()
                    .iter()
                    .position(|n| *n == name)
                    .unwrap() as u32;
                assert_eq!(
                    got.bit(i as u32),
                    expect.bit(out_idx),
                    "function {name} differs at input {v}"
                );
            }
        }
        assert_structural_properties(&circuit, &record);
    }

    fn assert_structural_properties(circuit: &ReversibleCircuit, record: &SynthesisRecord) {
        // Property 1: primary-input lines are never gate targets.
        for (line, ann) in record.annotations.iter().enumerate() {
            if matches!(ann.input, InputRole::Primary(_)) {
                assert!(
                    circuit.gates().iter().all(|g| g.target() != line as u32),
                    "primary input line {line} is a gate target"
                );
            }
        }
        // Property 2: after its last defining gate, a primary-output line
        // never appears as a control.
        for line in record.primary_output_lines() {
            let last_def = circuit
                .gates()
                .iter()
                .rposition(|g| g.target() == line);
            let from = last_def.map_or(0, |i| i + 1);
            for g in &circuit.gates()[from..] {
                assert!(
                    g.controls().iter().all(|c| c.line != line),
                    "primary output line {line} controls a later gate"
                );
            }
        }
        // Partitions are disjoint, ordered, and cover all gates.
        let mut cursor = 0usize;
        for p in &record.partitions {
            assert!(p.start >= cursor && p.end >= p.start);
            // Gap-free over the gate list (empty spans sit at the cursor).
            assert!(p.start == cursor || p.start == p.end);
            cursor = cursor.max(p.end);
        }
        assert_eq!(cursor, record.gate_count);
    }

    #[test]
    fn default_catalog_validates() {
        assert!(TemplateCatalog::default_catalog().validate().is_empty());
        assert!(TemplateCatalog::shannon(true).validate().is_empty());
    }

    #[test]
    fn complement_catalog_has_ambiguity_groups() {
        assert!(TemplateCatalog::default_catalog().ambiguity_groups().is_empty());
        let groups = TemplateCatalog::shannon(true).ambiguity_groups();
        assert_eq!(groups, vec!["low-one", "low-zero"]);
        let cat = TemplateCatalog::shannon(true);
        let lz = cat.get(TemplateId::LowZero).unwrap();
        assert_eq!(cat.group_size(lz), 2);
    }

    #[test]
    fn template_simulation_examples() {
        let cat = TemplateCatalog::shannon(true);
        // Multiplexer selects the high input.
        let general = cat.get(TemplateId::General).unwrap();
        assert!(simulate_template(general, true, false, true));

        // LowZero at (x, h) = (1, 1) is 1; its complement sibling is 0.
        let lz = cat.get(TemplateId::LowZero).unwrap();
        let lzc = cat.get(TemplateId::LowZeroComplement).unwrap();
        assert!(simulate_template(lz, true, false, true));
        assert!(!simulate_template(lzc, true, false, true));
    }

    #[test]
    fn validate_flags_wrong_semantics() {
        let mut cat = TemplateCatalog::default_catalog();
        cat.templates[0].semantics = |_, _, _| false; // break General
        let diags = cat.validate();
        assert!(diags.iter().any(|d| d.template == TemplateId::General
            && d.message.contains("semantics mismatch")));
    }

    #[test]
    fn validate_flags_duplicate_pattern_without_group() {
        let mut cat = TemplateCatalog::default_catalog();
        let mut dup = cat.get(TemplateId::LowZero).unwrap().clone();
        dup.id = TemplateId::LowZeroComplement;
        dup.ancilla_init = Some(true);
        dup.semantics = |x, _, h| !(x && h);
        dup.ambiguity_group = None;
        cat.templates.push(dup);
        let diags = cat.validate();
        assert!(diags
            .iter()
            .any(|d| d.message.contains("not an ambiguity group")));
    }

    #[test]
    fn and_gate_synthesis() {
        let (circuit, record) = synthesize_bdd(&and2(), &SynthesisOptions::default()).unwrap();
        assert_eq!(circuit.width(), 3);
        assert_eq!(circuit.gates().len(), 1);
        let gate = &circuit.gates()[0];
        assert_eq!(gate.target(), 2);
        assert_eq!(gate.controls().len(), 2);
        assert!(matches!(
            record.annotations[2].output,
            OutputRole::Primary(_)
        ));
        assert_realizes(&and2(), &SynthesisOptions::default());
    }

    #[test]
    fn projection_passes_through() {
        let f = BooleanFunction::from_fn(1, 1, |v| v);
        let (circuit, record) = synthesize_bdd(&f, &SynthesisOptions::default()).unwrap();
        assert_eq!(circuit.gates().len(), 0);
        assert_eq!(circuit.width(), 1);
        assert_eq!(record.primary_output_lines(), vec![0]);
    }

    #[test]
    fn four_term_example_synthesis() {
        let f = four_term_example();
        assert_realizes(&f, &SynthesisOptions::default());
        let (circuit, record) = synthesize_bdd(&f, &SynthesisOptions::default()).unwrap();
        // 7 internal nodes, one of them a Variable passthrough: 6 ancillas.
        assert_eq!(circuit.width(), 10);
        assert_eq!(record.partitions.len(), 7);
        assert_eq!(
            record.partitions.iter().filter(|p| p.start == p.end).count(),
            1
        );
    }

    #[test]
    fn complement_mode_still_realizes_the_function() {
        let f = four_term_example();
        for seed in 0..16 {
            let options = SynthesisOptions {
                complement_mode: true,
                seed,
                ..Default::default()
            };
            assert_realizes(&f, &options);
        }
    }

    #[test]
    fn complement_mode_off_is_shape_determined() {
        let f = four_term_example();
        let (_, record) = synthesize_bdd(&f, &SynthesisOptions::default()).unwrap();
        let cat = TemplateCatalog::default_catalog();
        for p in &record.partitions {
            if p.template == TemplateId::VariableCopy {
                continue;
            }
            let t = cat.get(p.template).unwrap();
            assert_eq!(cat.base_template(t.shape).id, p.template);
            assert!(!p.complemented);
        }
    }

    #[test]
    fn multi_output_shared_roots_are_copied() {
        // Second output equals a co-factor of the first (x2 & x3), which
        // makes its root a shared internal node of output 0's DAG.
        let f = BooleanFunction::from_fn(3, 2, |v| {
            let f0 = (v.bit(0) && v.bit(1)) || (!v.bit(0) && v.bit(1) && v.bit(2));
            let f1 = v.bit(1) && v.bit(2);
            Bits::from_bools(&[f0, f1])
        });
        assert_realizes(&f, &SynthesisOptions::default());
    }

    #[test]
    fn duplicate_outputs_get_distinct_lines() {
        let f = BooleanFunction::from_fn(2, 2, |v| {
            let b = v.bit(0) ^ v.bit(1);
            Bits::from_bools(&[b, b])
        });
        let (_, record) = synthesize_bdd(&f, &SynthesisOptions::default()).unwrap();
        let lines = record.primary_output_lines();
        assert_eq!(lines.len(), 2);
        assert_realizes(&f, &SynthesisOptions::default());
    }

    #[test]
    fn replaying_spans_rederives_template_patterns() {
        let f = four_term_example();
        let (circuit, record) = synthesize_bdd(&f, &SynthesisOptions::default()).unwrap();
        let cat = TemplateCatalog::default_catalog();
        for p in &record.partitions {
            if p.start == p.end {
                continue;
            }
            let recorded = cat.get(p.template).unwrap();
            let span = &circuit.gates()[p.start..p.end];
            assert_eq!(span.len(), recorded.gates.len());
            for (concrete, tg) in span.iter().zip(&recorded.gates) {
                assert_eq!(concrete.controls().len(), tg.controls.len());
                assert_eq!(concrete.target(), p.result_line);
            }
        }
    }
}
