//! Completely specified multi-output Boolean functions as dense truth tables.

use crate::bits::Bits;
use std::collections::BTreeMap;

/// Default cap on the number of inputs; dense tables hold `2^n` rows.
pub const DEFAULT_INPUT_CAP: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FunctionError {
    #[error("width mismatch: function takes {expected} inputs, got {got}")]
    WidthMismatch { expected: u32, got: u32 },
    #[error("table has {got} rows, expected {expected}")]
    BadRowCount { expected: usize, got: usize },
    #[error("row {row} has width {got}, expected {expected} outputs")]
    BadRowWidth { row: usize, expected: u32, got: u32 },
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("function has {0} inputs; the default cap is {DEFAULT_INPUT_CAP} (use new_uncapped)")]
    TooManyInputs(u32),
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: u32, num_vars: u32 },
}

/// A product term: a conjunction of literals, each a variable with a
/// polarity (`true` = plain, `false` = complemented).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductTerm {
    pub literals: Vec<(u32, bool)>,
}

impl ProductTerm {
    pub fn new(literals: impl IntoIterator<Item = (u32, bool)>) -> Self {
        ProductTerm {
            literals: literals.into_iter().collect(),
        }
    }

    pub fn satisfied_by(&self, assignment: Bits) -> bool {
        self.literals
            .iter()
            .all(|&(var, positive)| assignment.bit(var) == positive)
    }
}

/// Histogram of output patterns over all input assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPatternStats {
    /// Highest multiplicity of any output pattern (`m >= 1`).
    pub max_multiplicity: u64,
    /// Pattern value -> number of input rows producing it.
    pub histogram: BTreeMap<u64, u64>,
}

/// A completely specified function with `num_inputs` inputs and
/// `num_outputs` outputs, stored as `2^num_inputs` output rows. Row index
/// `v` is the assignment where input `i` equals bit `i` of `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    input_names: Vec<String>,
    output_names: Vec<String>,
    rows: Vec<Bits>,
}

impl BooleanFunction {
    pub fn new(
        input_names: Vec<String>,
        output_names: Vec<String>,
        rows: Vec<Bits>,
    ) -> Result<Self, FunctionError> {
        if input_names.len() as u32 > DEFAULT_INPUT_CAP {
            return Err(FunctionError::TooManyInputs(input_names.len() as u32));
        }
        Self::new_uncapped(input_names, output_names, rows)
    }

    /// Like [`new`](Self::new) but without the input cap. Memory grows as
    /// `2^num_inputs`; callers opting in are expected to know their budget.
    pub fn new_uncapped(
        input_names: Vec<String>,
        output_names: Vec<String>,
        rows: Vec<Bits>,
    ) -> Result<Self, FunctionError> {
        let n = input_names.len() as u32;
        let m = output_names.len() as u32;
        let expected = 1usize << n;
        if rows.len() != expected {
            return Err(FunctionError::BadRowCount {
                expected,
                got: rows.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.width() != m {
                return Err(FunctionError::BadRowWidth {
                    row: i,
                    expected: m,
                    got: row.width(),
                });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for name in input_names.iter().chain(output_names.iter()) {
            if !seen.insert(name.as_str()) {
                return Err(FunctionError::DuplicateName(name.clone()));
            }
        }
        Ok(BooleanFunction {
            input_names,
            output_names,
            rows,
        })
    }

    /// Builds a function by evaluating `f` on every assignment, with
    /// default names `x1..xn` and `y1..ym`.
    pub fn from_fn(
        num_inputs: u32,
        num_outputs: u32,
        mut f: impl FnMut(Bits) -> Bits,
    ) -> Self {
        let rows = Bits::all(num_inputs).map(|v| {
            let out = f(v);
            assert_eq!(out.width(), num_outputs);
            out
        });
        BooleanFunction::new(
            default_names("x", num_inputs),
            default_names("y", num_outputs),
            rows.collect(),
        )
        .expect("generated table is well formed")
    }

    /// Truth table of a sum of products: a row is 1 iff some term is
    /// satisfied. The empty term list is constant 0; a single empty term is
    /// constant 1.
    pub fn from_expression_terms(
        num_vars: u32,
        terms: &[ProductTerm],
    ) -> Result<Self, FunctionError> {
        for term in terms {
            for &(var, _) in &term.literals {
                if var >= num_vars {
                    return Err(FunctionError::VariableOutOfRange {
                        index: var,
                        num_vars,
                    });
                }
            }
        }
        let rows = Bits::all(num_vars)
            .map(|v| {
                let hit = terms.iter().any(|t| t.satisfied_by(v));
                Bits::new(hit as u64, 1)
            })
            .collect();
        BooleanFunction::new(default_names("x", num_vars), default_names("y", 1), rows)
    }

    pub fn num_inputs(&self) -> u32 {
        self.input_names.len() as u32
    }

    pub fn num_outputs(&self) -> u32 {
        self.output_names.len() as u32
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    pub fn evaluate(&self, input: Bits) -> Result<Bits, FunctionError> {
        if input.width() != self.num_inputs() {
            return Err(FunctionError::WidthMismatch {
                expected: self.num_inputs(),
                got: input.width(),
            });
        }
        Ok(self.rows[input.value() as usize])
    }

    /// One output as a column of `2^n` bits.
    pub fn output_column(&self, output: u32) -> Vec<bool> {
        self.rows.iter().map(|row| row.bit(output)).collect()
    }

    pub fn pattern_stats(&self) -> OutputPatternStats {
        let mut histogram = BTreeMap::new();
        for row in &self.rows {
            *histogram.entry(row.value()).or_insert(0u64) += 1;
        }
        let max_multiplicity = histogram.values().copied().max().unwrap_or(0);
        OutputPatternStats {
            max_multiplicity,
            histogram,
        }
    }
}

pub fn default_names(prefix: &str, count: u32) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

/// The full-adder truth table (inputs `c_in x y`, outputs `c_out sum`).
pub fn full_adder() -> BooleanFunction {
    BooleanFunction::new(
        vec!["c_in".into(), "x".into(), "y".into()],
        vec!["c_out".into(), "sum".into()],
        Bits::all(3)
            .map(|v| {
                let total = v.bit(0) as u64 + v.bit(1) as u64 + v.bit(2) as u64;
                // Output j is bit j: c_out on bit 0, sum on bit 1.
                Bits::new(total >> 1 | (total & 1) << 1, 2)
            })
            .collect(),
    )
    .unwrap()
}

/// The four-term single-output function used as a running example:
/// `f = !x1 !x2 !x3 x4 + !x1 x2 x3 !x4 + x1 !x2 x3 !x4 + x1 x2 !x3 x4`.
pub fn four_term_example() -> BooleanFunction {
    let terms = [
        ProductTerm::new([(0, false), (1, false), (2, false), (3, true)]),
        ProductTerm::new([(0, false), (1, true), (2, true), (3, false)]),
        ProductTerm::new([(0, true), (1, false), (2, true), (3, false)]),
        ProductTerm::new([(0, true), (1, true), (2, false), (3, true)]),
    ];
    BooleanFunction::from_expression_terms(4, &terms).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_adder_evaluate() {
        let f = full_adder();
        // c_in x y = 011 -> c_out sum = 10.
        let input = Bits::from_bools(&[false, true, true]);
        let out = f.evaluate(input).unwrap();
        assert!(out.bit(0), "c_out");
        assert!(!out.bit(1), "sum");
    }

    #[test]
    fn constant_zero_evaluates_to_zero() {
        let f = BooleanFunction::from_fn(3, 1, |_| Bits::zero(1));
        for v in Bits::all(3) {
            assert_eq!(f.evaluate(v).unwrap().value(), 0);
        }
    }

    #[test]
    fn four_term_example_values() {
        let f = four_term_example();
        // x1 x2 x3 x4 = 0001: only x4 set.
        let input = Bits::from_bools(&[false, false, false, true]);
        assert_eq!(f.evaluate(input).unwrap().value(), 1);
        // Exactly four one-rows.
        let ones: u64 = f.rows().iter().map(|r| r.value()).sum();
        assert_eq!(ones, 4);
    }

    #[test]
    fn pattern_stats_examples() {
        assert_eq!(full_adder().pattern_stats().max_multiplicity, 3);

        // Any permutation given as a truth table has multiplicity 1.
        let perm = BooleanFunction::from_fn(3, 3, |v| Bits::new(v.value() ^ 0b101, 3));
        assert_eq!(perm.pattern_stats().max_multiplicity, 1);

        // Two-input AND: pattern 0 appears three times.
        let and = BooleanFunction::from_fn(2, 1, |v| {
            Bits::new((v.bit(0) && v.bit(1)) as u64, 1)
        });
        let stats = and.pattern_stats();
        assert_eq!(stats.max_multiplicity, 3);
        assert_eq!(stats.histogram[&0], 3);
        assert_eq!(stats.histogram[&1], 1);
    }

    #[test]
    fn histogram_counts_sum_to_row_count() {
        let f = four_term_example();
        let total: u64 = f.pattern_stats().histogram.values().sum();
        assert_eq!(total, 16);
    }

    #[test]
    fn expression_term_edge_cases() {
        let zero = BooleanFunction::from_expression_terms(3, &[]).unwrap();
        assert!(zero.rows().iter().all(|r| r.value() == 0));

        let one =
            BooleanFunction::from_expression_terms(3, &[ProductTerm::new([])]).unwrap();
        assert!(one.rows().iter().all(|r| r.value() == 1));

        let bad = BooleanFunction::from_expression_terms(2, &[ProductTerm::new([(5, true)])]);
        assert!(matches!(bad, Err(FunctionError::VariableOutOfRange { .. })));
    }

    #[test]
    fn terms_agree_with_direct_evaluation() {
        // Exhaustive for a handful of term sets over up to 10 variables.
        let cases: Vec<(u32, Vec<ProductTerm>)> = vec![
            (4, vec![
                ProductTerm::new([(0, true), (2, false)]),
                ProductTerm::new([(3, true)]),
            ]),
            (6, vec![
                ProductTerm::new([(1, false), (4, true), (5, true)]),
                ProductTerm::new([(0, true), (1, true)]),
                ProductTerm::new([(2, false)]),
            ]),
            (10, vec![ProductTerm::new([(9, true), (0, false)])]),
        ];
        for (n, terms) in cases {
            let f = BooleanFunction::from_expression_terms(n, &terms).unwrap();
            for v in Bits::all(n) {
                let direct = terms.iter().any(|t| t.satisfied_by(v));
                assert_eq!(f.evaluate(v).unwrap().value(), direct as u64);
            }
        }
    }

    #[test]
    fn evaluate_rejects_wrong_width() {
        let f = full_adder();
        assert!(matches!(
            f.evaluate(Bits::zero(4)),
            Err(FunctionError::WidthMismatch { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            BooleanFunction::new(default_names("x", 2), default_names("y", 1), vec![]),
            Err(FunctionError::BadRowCount { .. })
        ));
        let rows = vec![Bits::zero(2); 4];
        assert!(matches!(
            BooleanFunction::new(default_names("x", 2), default_names("y", 1), rows),
            Err(FunctionError::BadRowWidth { .. })
        ));
        assert!(matches!(
            BooleanFunction::new(
                vec!["a".into(), "a".into()],
                default_names("y", 1),
                vec![Bits::zero(1); 4]
            ),
            Err(FunctionError::DuplicateName(_))
        ));
    }
}
