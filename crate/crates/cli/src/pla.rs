//! PLA truth-table ingestion (two-level sum-of-products cube lists).
//!
//! Supported directives: `.i`, `.o`, optional `.p`, optional `.ilb`/`.ob`
//! name lists, cube lines `<in-cube> <out-bits>`, `.e`. Input cube chars
//! are `0`, `1`, `-`; output chars `1` (set), `0`/`~` (leave). Minterms no
//! cube covers default every output to 0, so overlapping cubes simply OR.
//! Cube column `j` corresponds to the `j`-th declared input/output name.

use revsec_core::bits::Bits;
use revsec_core::function::{default_names, BooleanFunction, FunctionError};
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum PlaError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: cube width mismatch (expected {expected} {side} columns, got {got})")]
    CubeWidth {
        line: usize,
        side: &'static str,
        expected: u32,
        got: usize,
    },
    #[error("missing .i/.o declaration")]
    MissingHeader,
    #[error(transparent)]
    Function(#[from] FunctionError),
}

pub fn pla_parse(text: &str) -> Result<BooleanFunction, PlaError> {
    let mut num_inputs: Option<u32> = None;
    let mut num_outputs: Option<u32> = None;
    let mut input_names: Option<Vec<String>> = None;
    let mut output_names: Option<Vec<String>> = None;
    let mut cubes: Vec<(Vec<char>, Vec<char>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match head {
            ".i" | ".o" => {
                let value = rest
                    .first()
                    .and_then(|s| s.parse::<u32>().ok())
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| PlaError::Malformed {
                        line: lineno,
                        message: format!("{head} needs a positive integer"),
                    })?;
                if head == ".i" {
                    num_inputs = Some(value);
                } else {
                    num_outputs = Some(value);
                }
            }
            ".p" => {
                rest.first()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| PlaError::Malformed {
                        line: lineno,
                        message: ".p needs an integer".into(),
                    })?;
            }
            ".ilb" => input_names = Some(rest.iter().map(|s| s.to_string()).collect()),
            ".ob" => output_names = Some(rest.iter().map(|s| s.to_string()).collect()),
            ".e" | ".end" => break,
            _ if head.starts_with('.') => {
                return Err(PlaError::Malformed {
                    line: lineno,
                    message: format!("unknown directive {head:?}"),
                })
            }
            _ => {
                let (n, m) = (
                    num_inputs.ok_or(PlaError::MissingHeader)?,
                    num_outputs.ok_or(PlaError::MissingHeader)?,
                );
                if rest.len() != 1 {
                    return Err(PlaError::Malformed {
                        line: lineno,
                        message: "cube lines are <in-cube> <out-bits>".into(),
                    });
                }
                let in_cube: Vec<char> = head.chars().collect();
                let out_bits: Vec<char> = rest[0].chars().collect();
                if in_cube.len() != n as usize {
                    return Err(PlaError::CubeWidth {
                        line: lineno,
                        side: "input",
                        expected: n,
                        got: in_cube.len(),
                    });
                }
                if out_bits.len() != m as usize {
                    return Err(PlaError::CubeWidth {
                        line: lineno,
                        side: "output",
                        expected: m,
                        got: out_bits.len(),
                    });
                }
                for &c in &in_cube {
                    if !matches!(c, '0' | '1' | '-') {
                        return Err(PlaError::Malformed {
                            line: lineno,
                            message: format!("invalid input cube character {c:?}"),
                        });
                    }
                }
                for &c in &out_bits {
                    if !matches!(c, '0' | '1' | '~') {
                        return Err(PlaError::Malformed {
                            line: lineno,
                            message: format!("invalid output character {c:?}"),
                        });
                    }
                }
                cubes.push((in_cube, out_bits));
            }
        }
    }

    let n = num_inputs.ok_or(PlaError::MissingHeader)?;
    let m = num_outputs.ok_or(PlaError::MissingHeader)?;
    let check_names = |names: Option<Vec<String>>, count: u32, what: &str| match names {
        None => Ok(None),
        Some(v) if v.len() == count as usize => Ok(Some(v)),
        Some(v) => Err(PlaError::Malformed {
            line: 0,
            message: format!("{what} lists {} names, expected {count}", v.len()),
        }),
    };
    let input_names =
        check_names(input_names, n, ".ilb")?.unwrap_or_else(|| default_names("x", n));
    let output_names =
        check_names(output_names, m, ".ob")?.unwrap_or_else(|| default_names("y", m));

    let mut rows = vec![0u64; 1 << n];
    for (in_cube, out_bits) in &cubes {
        let set_mask: u64 = out_bits
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == '1')
            .fold(0, |acc, (j, _)| acc | 1 << j);
        if set_mask == 0 {
            continue;
        }
        // Expand don't-cares over the covered minterms.
        let fixed: Vec<(u32, bool)> = in_cube
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != '-')
            .map(|(j, &c)| (j as u32, c == '1'))
            .collect();
        let free: Vec<u32> = in_cube
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == '-')
            .map(|(j, _)| j as u32)
            .collect();
        for combo in 0u64..1 << free.len() {
            let mut v = 0u64;
            for &(j, bit) in &fixed {
                if bit {
                    v |= 1 << j;
                }
            }
            for (i, &j) in free.iter().enumerate() {
                if combo >> i & 1 == 1 {
                    v |= 1 << j;
                }
            }
            rows[v as usize] |= set_mask;
        }
    }
    let rows = rows.into_iter().map(|v| Bits::new(v, m)).collect();
    Ok(BooleanFunction::new(input_names, output_names, rows)?)
}

/// Writes a function as one minterm cube per row with a non-zero output.
pub fn pla_write(function: &BooleanFunction) -> String {
    let n = function.num_inputs();
    let m = function.num_outputs();
    let mut body = String::new();
    let mut count = 0usize;
    for (v, row) in function.rows().iter().enumerate() {
        if row.value() == 0 {
            continue;
        }
        count += 1;
        let in_cube: String = (0..n)
            .map(|j| if v >> j & 1 == 1 { '1' } else { '0' })
            .collect();
        let out_bits: String = (0..m)
            .map(|j| if row.bit(j) { '1' } else { '0' })
            .collect();
        let _ = writeln!(body, "{in_cube} {out_bits}");
    }
    let mut s = String::new();
    let _ = writeln!(s, ".i {n}");
    let _ = writeln!(s, ".o {m}");
    let _ = writeln!(s, ".ilb {}", function.input_names().join(" "));
    let _ = writeln!(s, ".ob {}", function.output_names().join(" "));
    let _ = writeln!(s, ".p {count}");
    s.push_str(&body);
    s.push_str(".e\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use revsec_core::function::full_adder;

    #[test]
    fn and_gate_from_single_cube() {
        let f = pla_parse(".i 2\n.o 1\n11 1\n.e\n").unwrap();
        for v in Bits::all(2) {
            let expect = (v.bit(0) && v.bit(1)) as u64;
            assert_eq!(f.evaluate(v).unwrap().value(), expect);
        }
    }

    #[test]
    fn full_adder_from_eight_cubes() {
        // Cube columns follow .ilb order: c_in x y -> c_out sum.
        let text = "\
.i 3
.o 2
.ilb c_in x y
.ob c_out sum
000 00
001 01
010 01
011 10
100 01
101 10
110 10
111 11
.e
";
        let f = pla_parse(text).unwrap();
        let reference = full_adder();
        // Column j in the cube is input j, which is bit j of the row index.
        for v in Bits::all(3) {
            assert_eq!(f.evaluate(v).unwrap(), reference.evaluate(v).unwrap());
        }
        assert_eq!(f.input_names(), reference.input_names());
    }

    #[test]
    fn dont_care_expansion() {
        let f = pla_parse(".i 2\n.o 1\n1- 1\n.e\n").unwrap();
        // Covers minterms with input 0 set: 01 and 11.
        assert_eq!(f.rows()[1].value(), 1);
        assert_eq!(f.rows()[3].value(), 1);
        assert_eq!(f.rows()[0].value(), 0);
        assert_eq!(f.rows()[2].value(), 0);
    }

    #[test]
    fn overlapping_cubes_or_together() {
        let f = pla_parse(".i 2\n.o 2\n1- 10\n-1 01\n.e\n").unwrap();
        assert_eq!(f.rows()[3].value(), 0b11);
        assert_eq!(f.rows()[1].value(), 0b01);
        assert_eq!(f.rows()[2].value(), 0b10);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(pla_parse("11 1\n.e\n"), Err(PlaError::MissingHeader)));
        assert!(matches!(
            pla_parse(".i 2\n.o 1\n111 1\n.e\n"),
            Err(PlaError::CubeWidth { line: 3, .. })
        ));
        assert!(matches!(
            pla_parse(".i 2\n.o 1\n1x 1\n.e\n"),
            Err(PlaError::Malformed { line: 3, .. })
        ));
    }

    #[test]
    fn write_parse_round_trip() {
        let f = full_adder();
        let text = pla_write(&f);
        let parsed = pla_parse(&text).unwrap();
        assert_eq!(parsed, f);
        assert_eq!(pla_write(&parsed), text);
    }
}
