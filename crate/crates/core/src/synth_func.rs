//! Functional synthesis: turns a reversible permutation into a Toffoli
//! cascade by the unidirectional transformation-based construction.
//!
//! Rows are processed in ascending input order. For the current row `i`
//! with image `b`, gates are appended to the output side mapping `b` back
//! to `i` one differing bit at a time; controlling on the one-bits keeps
//! every earlier row fixed (the image of row `i` is always `>= i` once all
//! smaller rows are settled). The appended gate list, reversed, is the
//! circuit realizing the permutation.

use crate::bits::Bits;
use crate::circuit::{CircuitError, Control, ReversibleCircuit, ToffoliGate};

/// Cap for exhaustive permutation tables.
pub const MAX_PERMUTATION_WIDTH: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermError {
    #[error("image of length {got} is not a bijection on [0, 2^{width})")]
    NotABijection { width: u32, got: usize },
    #[error("width {0} exceeds the exhaustive cap {MAX_PERMUTATION_WIDTH}")]
    WidthTooLarge(u32),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A bijection on `[0, 2^width)` stored as its image table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    width: u32,
    image: Vec<u64>,
}

impl Permutation {
    pub fn new(width: u32, image: Vec<u64>) -> Result<Self, PermError> {
        if width > MAX_PERMUTATION_WIDTH {
            return Err(PermError::WidthTooLarge(width));
        }
        let size = 1usize << width;
        let mut seen = vec![false; size];
        let valid = image.len() == size
            && image.iter().all(|&v| {
                (v as usize) < size && !std::mem::replace(&mut seen[v as usize], true)
            });
        if !valid {
            return Err(PermError::NotABijection {
                width,
                got: image.len(),
            });
        }
        Ok(Permutation { width, image })
    }

    pub fn identity(width: u32) -> Self {
        Permutation {
            width,
            image: (0..1u64 << width).collect(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn image(&self) -> &[u64] {
        &self.image
    }

    pub fn apply(&self, v: u64) -> u64 {
        self.image[v as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i as u64 == v)
    }
}

/// Exhaustive simulation table of a circuit (the oracle inverse of
/// [`synthesize_permutation`]).
pub fn circuit_to_permutation(circuit: &ReversibleCircuit) -> Result<Permutation, PermError> {
    let width = circuit.width();
    if width > MAX_PERMUTATION_WIDTH {
        return Err(PermError::WidthTooLarge(width));
    }
    let image = Bits::all(width)
        .map(|v| circuit.simulate(v).map(|o| o.value()))
        .collect::<Result<Vec<u64>, CircuitError>>()?;
    Permutation::new(width, image)
}

/// Transformation-based synthesis of a permutation into a Toffoli cascade.
pub fn synthesize_permutation(perm: &Permutation) -> Result<ReversibleCircuit, PermError> {
    let width = perm.width();
    let mut current = perm.image().to_vec();
    // Gates in application order seen from the output side; the circuit is
    // this list reversed.
    let mut appended: Vec<ToffoliGate> = Vec::new();

    let mut apply_and_record = |gate: ToffoliGate, current: &mut [u64]| -> Result<(), PermError> {
        for v in current.iter_mut() {
            let bits = Bits::new(*v, width);
            if gate.fires(bits) {
                *v = bits.flipped(gate.target()).value();
            }
        }
        appended.push(gate);
        Ok(())
    };

    for row in 0..current.len() as u64 {
        let mut b = current[row as usize];
        if b == row {
            continue;
        }
        debug_assert!(b > row, "earlier rows are settled, so the image is >= row");
        // Set the bits row has and b lacks, controlling on b's one-bits.
        for p in 0..width {
            if row >> p & 1 == 1 && b >> p & 1 == 0 {
                let controls: Vec<Control> = (0..width)
                    .filter(|&q| q != p && b >> q & 1 == 1)
                    .map(Control::positive)
                    .collect();
                apply_and_record(ToffoliGate::new(controls, p)?, &mut current)?;
                b |= 1 << p;
            }
        }
        // Clear the bits b has and row lacks, controlling on row's one-bits.
        for p in 0..width {
            if row >> p & 1 == 0 && b >> p & 1 == 1 {
                let controls: Vec<Control> = (0..width)
                    .filter(|&q| q != p && row >> q & 1 == 1)
                    .map(Control::positive)
                    .collect();
                apply_and_record(ToffoliGate::new(controls, p)?, &mut current)?;
                b &= !(1 << p);
            }
        }
        debug_assert_eq!(current[row as usize], row);
        // Monotone prefix: all rows up to here are settled.
        debug_assert!((0..=row).all(|r| current[r as usize] == r));
    }

    appended.reverse();
    Ok(ReversibleCircuit::new(width.max(1), appended)?)
}
