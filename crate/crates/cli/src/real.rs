//! The `.real` netlist dialect for reversible circuits.
//!
//! Grammar (one directive per line, `#` starts a comment line):
//!
//! ```text
//! .version 2.0
//! .numvars <n>
//! .variables <name> * n
//! .inputs    <name-or-constant> * n      (optional)
//! .outputs   <name> * n                  (optional)
//! .constants <n chars of 0|1|->          (optional; '-' = primary input)
//! .garbage   <n chars of 1|->            (optional; '1' = garbage output)
//! .begin
//! t<k> c1 .. c(k-1) target               (k names; '-' prefix = negative control)
//! .end
//! ```
//!
//! Annotations are attached when `.constants` or `.garbage` is present.
//! The writer is canonical: fixed directive order, single spaces, controls
//! sorted by line, newline-terminated, so write -> parse -> write is
//! byte-stable.

use revsec_core::circuit::{
    CircuitError, Control, InputRole, LineAnnotation, OutputRole, Polarity, ReversibleCircuit,
    ToffoliGate,
};
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum RealError {
    #[error("line {line}: unknown directive {directive:?}")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown variable {name:?}")]
    UnknownVariable { line: usize, name: String },
    #[error("line {line}: gate token {token:?} is not t<k> with k matching the name count")]
    BadGateToken { line: usize, token: String },
    #[error("missing .end for the gate block opened at line {begin_line}")]
    MissingEnd { begin_line: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Parses the dialect into a circuit; annotations are attached when the
/// file declares `.constants` or `.garbage`.
pub fn real_parse(text: &str) -> Result<ReversibleCircuit, RealError> {
    let mut numvars: Option<u32> = None;
    let mut variables: Vec<String> = Vec::new();
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut constants: Option<Vec<char>> = None;
    let mut garbage: Option<Vec<char>> = None;
    let mut gates: Vec<ToffoliGate> = Vec::new();
    let mut var_index: HashMap<String, u32> = HashMap::new();
    let mut begin_line: Option<usize> = None;
    let mut ended = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if ended {
            return Err(RealError::Malformed {
                line: lineno,
                message: "content after .end".into(),
            });
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();

        if begin_line.is_some() && head != ".end" {
            // Gate line.
            let k: usize = head
                .strip_prefix('t')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| RealError::BadGateToken {
                    line: lineno,
                    token: head.to_string(),
                })?;
            if rest.len() != k || k == 0 {
                return Err(RealError::BadGateToken {
                    line: lineno,
                    token: head.to_string(),
                });
            }
            let resolve = |name: &str| {
                var_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| RealError::UnknownVariable {
                        line: lineno,
                        name: name.to_string(),
                    })
            };
            let mut controls = Vec::with_capacity(k - 1);
            for token in &rest[..k - 1] {
                let (polarity, name) = match token.strip_prefix('-') {
                    Some(name) => (Polarity::Negative, name),
                    None => (Polarity::Positive, *token),
                };
                controls.push(Control {
                    line: resolve(name)?,
                    polarity,
                });
            }
            let target = resolve(rest[k - 1])?;
            gates.push(ToffoliGate::new(controls, target)?);
            continue;
        }

        match head {
            ".version" => {}
            ".numvars" => {
                let n = rest
                    .first()
                    .and_then(|s| s.parse::<u32>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| RealError::Malformed {
                        line: lineno,
                        message: ".numvars needs a positive integer".into(),
                    })?;
                numvars = Some(n);
            }
            ".variables" | ".inputs" | ".outputs" => {
                let n = numvars.ok_or_else(|| RealError::Malformed {
                    line: lineno,
                    message: format!("{head} before .numvars"),
                })? as usize;
                if rest.len() != n {
                    return Err(RealError::Malformed {
                        line: lineno,
                        message: format!("{head} lists {} names, expected {n}", rest.len()),
                    });
                }
                let names: Vec<String> = rest.iter().map(|s| s.to_string()).collect();
                match head {
                    ".variables" => {
                        for (i, name) in names.iter().enumerate() {
                            if var_index.insert(name.clone(), i as u32).is_some() {
                                return Err(RealError::Malformed {
                                    line: lineno,
                                    message: format!("duplicate variable {name:?}"),
                                });
                            }
                        }
                        variables = names;
                    }
                    ".inputs" => inputs = Some(names),
                    _ => outputs = Some(names),
                }
            }
            ".constants" | ".garbage" => {
                let n = numvars.ok_or_else(|| RealError::Malformed {
                    line: lineno,
                    message: format!("{head} before .numvars"),
                })? as usize;
                let spec = rest.concat();
                let chars: Vec<char> = spec.chars().collect();
                let allowed: &[char] = if head == ".constants" {
                    &['0', '1', '-']
                } else {
                    &['1', '-']
                };
                if chars.len() != n || chars.iter().any(|c| !allowed.contains(c)) {
                    return Err(RealError::Malformed {
                        line: lineno,
                        message: format!("{head} needs {n} characters drawn from {allowed:?}"),
                    });
                }
                if head == ".constants" {
                    constants = Some(chars);
                } else {
                    garbage = Some(chars);
                }
            }
            ".begin" => {
                if variables.is_empty() {
                    return Err(RealError::Malformed {
                        line: lineno,
                        message: ".begin before .variables".into(),
                    });
                }
                begin_line = Some(lineno);
            }
            ".end" => {
                if begin_line.is_none() {
                    return Err(RealError::Malformed {
                        line: lineno,
                        message: ".end without .begin".into(),
                    });
                }
                ended = true;
            }
            other => {
                return Err(RealError::UnknownDirective {
                    line: lineno,
                    directive: other.to_string(),
                })
            }
        }
    }

    match begin_line {
        Some(begin) if !ended => return Err(RealError::MissingEnd { begin_line: begin }),
        None => {
            return Err(RealError::Malformed {
                line: text.lines().count().max(1),
                message: "no .begin/.end gate block".into(),
            })
        }
        _ => {}
    }
    let width = numvars.expect(".begin requires .variables which requires .numvars");

    if constants.is_none() && garbage.is_none() {
        return Ok(ReversibleCircuit::new(width, gates)?);
    }
    let n = width as usize;
    let constants = constants.unwrap_or_else(|| vec!['-'; n]);
    let garbage = garbage.unwrap_or_else(|| vec!['-'; n]);
    let input_names = inputs.unwrap_or_else(|| variables.clone());
    let output_names = outputs.unwrap_or_else(|| variables.clone());
    let annotations = (0..n)
        .map(|i| LineAnnotation {
            input: match constants[i] {
                '0' => InputRole::Ancillary(false),
                '1' => InputRole::Ancillary(true),
                _ => InputRole::Primary(input_names[i].clone()),
            },
            output: if garbage[i] == '1' {
                OutputRole::Garbage
            } else {
                OutputRole::Primary(output_names[i].clone())
            },
        })
        .collect();
    Ok(ReversibleCircuit::with_annotations(width, gates, annotations)?)
}

/// Canonical serialization; `real_parse(real_write(c))` is structurally `c`.
pub fn real_write(circuit: &ReversibleCircuit) -> String {
    let n = circuit.width() as usize;
    let ann = circuit.annotations();

    // Line names: primary-input names where present, fresh w<i> otherwise.
    let mut taken: Vec<String> = Vec::new();
    if let Some(ann) = ann {
        for a in ann {
            if let InputRole::Primary(name) = &a.input {
                taken.push(name.clone());
            }
            if let OutputRole::Primary(name) = &a.output {
                taken.push(name.clone());
            }
        }
    }
    let mut variables: Vec<String> = Vec::with_capacity(n);
    for i in 0..n {
        let name = match ann.and_then(|a| match &a[i].input {
            InputRole::Primary(name) => Some(name.clone()),
            InputRole::Ancillary(_) => None,
        }) {
            Some(name) => name,
            None => {
                let mut candidate = format!("w{}", i + 1);
                while taken.contains(&candidate) {
                    candidate.insert(0, '_');
                }
                taken.push(candidate.clone());
                candidate
            }
        };
        variables.push(name);
    }

    let mut s = String::new();
    let _ = writeln!(s, ".version 2.0");
    let _ = writeln!(s, ".numvars {}", circuit.width());
    let _ = writeln!(s, ".variables {}", variables.join(" "));
    if let Some(ann) = ann {
        let inputs: Vec<String> = (0..n)
            .map(|i| match &ann[i].input {
                InputRole::Primary(name) => name.clone(),
                InputRole::Ancillary(v) => if *v { "1" } else { "0" }.to_string(),
            })
            .collect();
        let mut garbage_counter = 0u32;
        let outputs: Vec<String> = (0..n)
            .map(|i| match &ann[i].output {
                OutputRole::Primary(name) => name.clone(),
                OutputRole::Garbage => {
                    garbage_counter += 1;
                    let mut candidate = format!("g{garbage_counter}");
                    while taken.contains(&candidate) {
                        candidate.insert(0, '_');
                    }
                    taken.push(candidate.clone());
                    candidate
                }
            })
            .collect();
        let constants: String = (0..n)
            .map(|i| match &ann[i].input {
                InputRole::Primary(_) => '-',
                InputRole::Ancillary(false) => '0',
                InputRole::Ancillary(true) => '1',
            })
            .collect();
        let garbage: String = (0..n)
            .map(|i| if ann[i].is_garbage() { '1' } else { '-' })
            .collect();
        let _ = writeln!(s, ".inputs {}", inputs.join(" "));
        let _ = writeln!(s, ".outputs {}", outputs.join(" "));
        let _ = writeln!(s, ".constants {constants}");
        let _ = writeln!(s, ".garbage {garbage}");
    }
    let _ = writeln!(s, ".begin");
    for gate in circuit.gates() {
        let k = gate.controls().len() + 1;
        let mut tokens = vec![format!("t{k}")];
        for c in gate.controls() {
            let name = &variables[c.line as usize];
            tokens.push(match c.polarity {
                Polarity::Positive => name.clone(),
                Polarity::Negative => format!("-{name}"),
            });
        }
        tokens.push(variables[gate.target() as usize].clone());
        let _ = writeln!(s, "{}", tokens.join(" "));
    }
    let _ = writeln!(s, ".end");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use revsec_core::circuit::example_three_gate_circuit;
    use revsec_core::Bits;

    const THREE_GATE: &str = "\
.version 2.0
.numvars 3
.variables x1 x2 x3
.begin
t2 x1 x3
t3 x3 -x2 x1
t2 x1 x2
.end
";

    #[test]
    fn parses_the_three_gate_example() {
        let circuit = real_parse(THREE_GATE).unwrap();
        assert_eq!(circuit, example_three_gate_circuit());
        let out = circuit.simulate("001".parse::<Bits>().unwrap()).unwrap();
        assert_eq!(out.to_string(), "100");
    }

    #[test]
    fn constants_mark_ancillas() {
        let text = "\
.numvars 3
.variables a b c
.constants 0--
.garbage 1--
.begin
t2 b a
.end
";
        let circuit = real_parse(text).unwrap();
        let ann = circuit.annotations().unwrap();
        assert_eq!(ann[0].input, InputRole::Ancillary(false));
        assert!(matches!(ann[1].input, InputRole::Primary(_)));
        assert!(ann[0].is_garbage());
        assert!(!ann[1].is_garbage());
    }

    #[test]
    fn missing_end_is_an_error() {
        let text = ".numvars 1\n.variables a\n.begin\nt1 a\n";
        match real_parse(text) {
            Err(RealError::MissingEnd { begin_line }) => assert_eq!(begin_line, 3),
            other => panic!("expected MissingEnd, got {other:?}"),
        }
    }

    #[test]
    fn error_cases_name_the_line() {
        assert!(matches!(
            real_parse(".numvars 1\n.variables a\n.frobnicate\n.begin\n.end\n"),
            Err(RealError::UnknownDirective { line: 3, .. })
        ));
        assert!(matches!(
            real_parse(".numvars 2\n.variables a b\n.begin\nt3 a b\n.end\n"),
            Err(RealError::BadGateToken { line: 4, .. })
        ));
        assert!(matches!(
            real_parse(".numvars 2\n.variables a b\n.begin\nt2 a z\n.end\n"),
            Err(RealError::UnknownVariable { line: 4, .. })
        ));
    }

    #[test]
    fn write_parse_round_trip() {
        let circuit = example_three_gate_circuit();
        let text = real_write(&circuit);
        let parsed = real_parse(&text).unwrap();
        assert_eq!(parsed, circuit);
        // Byte stability.
        assert_eq!(real_write(&parsed), text);
    }

    #[test]
    fn negative_controls_survive_round_trips() {
        let gates = vec![
            ToffoliGate::new([Control::negative(0), Control::positive(2)], 1).unwrap(),
            ToffoliGate::new([Control::negative(1)], 0).unwrap(),
        ];
        let circuit = ReversibleCircuit::new(3, gates).unwrap();
        assert_eq!(real_parse(&real_write(&circuit)).unwrap(), circuit);
    }

    #[test]
    fn empty_circuit_round_trips() {
        let circuit = ReversibleCircuit::new(1, vec![]).unwrap();
        let text = real_write(&circuit);
        assert_eq!(real_parse(&text).unwrap(), circuit);
    }
}
