//! Reduced ordered binary decision diagrams with shared nodes.
//!
//! Each internal node carries a select variable and applies the Shannon
//! decomposition `f = !x*f(x=0) + x*f(x=1)`: `low` is the negative
//! co-factor, `high` the positive one. Nodes are hash-consed through a
//! unique table keyed by `(var, low, high)`, and `low == high` is never
//! materialized, so equal functions built under the same order share the
//! same root (canonicity). There are no complement edges.

use crate::bits::Bits;
use crate::function::BooleanFunction;
use std::collections::HashMap;
use std::fmt::Write as _;

/// Reference to a BDD node or terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRef {
    Zero,
    One,
    Node(u32),
}

impl NodeRef {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, NodeRef::Node(_))
    }
}

/// An internal node. `var` is the original input index of the select
/// variable; positions in the variable order strictly increase from root
/// to terminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BddNode {
    pub var: u32,
    pub low: NodeRef,
    pub high: NodeRef,
}

/// What a node's child is, for template selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChildKind {
    Zero,
    One,
    Internal,
}

/// The seven realizable node shapes under plain Shannon decomposition.
/// Named by the terminal child: `LowZero` means the negative co-factor is
/// the constant 0, so `f = x * high`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    /// Both children internal: `f = x*high + !x*low`.
    General,
    /// low = 0: `f = x * high`.
    LowZero,
    /// low = 1: `f = !x + x*high`.
    LowOne,
    /// high = 0: `f = !x * low`.
    HighZero,
    /// high = 1: `f = x + !x*low`.
    HighOne,
    /// low = 0, high = 1: `f = x`.
    Variable,
    /// low = 1, high = 0: `f = !x`.
    NegatedVariable,
}

/// Shape of an internal node plus sharing information ("still needed"):
/// whether each internal child, and the select line, are referenced by
/// other parents and so must be preserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeShape {
    pub low: ChildKind,
    pub high: ChildKind,
    pub low_shared: bool,
    pub high_shared: bool,
    pub select_shared: bool,
}

impl NodeShape {
    pub fn kind(&self) -> ShapeKind {
        match (self.low, self.high) {
            (ChildKind::Zero, ChildKind::One) => ShapeKind::Variable,
            (ChildKind::One, ChildKind::Zero) => ShapeKind::NegatedVariable,
            (ChildKind::Zero, ChildKind::Internal) => ShapeKind::LowZero,
            (ChildKind::One, ChildKind::Internal) => ShapeKind::LowOne,
            (ChildKind::Internal, ChildKind::Zero) => ShapeKind::HighZero,
            (ChildKind::Internal, ChildKind::One) => ShapeKind::HighOne,
            (ChildKind::Internal, ChildKind::Internal) => ShapeKind::General,
            _ => unreachable!("reduced BDDs have no node with two equal terminals"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BddError {
    #[error("order {0:?} is not a permutation of the input indices")]
    InvalidOrder(Vec<u32>),
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: u32, got: u32 },
    #[error("terminal reference has no shape")]
    TerminalHasNoShape,
    #[error("node id {0} out of range")]
    NodeOutOfRange(u32),
}

/// A multi-rooted ROBDD over the inputs of one function.
#[derive(Debug, Clone)]
pub struct Bdd {
    order: Vec<u32>,
    nodes: Vec<BddNode>,
    roots: Vec<NodeRef>,
    num_inputs: u32,
    input_names: Vec<String>,
    output_names: Vec<String>,
    /// Internal references per node (times it appears as a child).
    parent_counts: Vec<u32>,
}

impl Bdd {
    /// Builds the canonical ROBDD of `function` under `order` (default:
    /// declaration order of the inputs).
    pub fn build(function: &BooleanFunction, order: Option<&[u32]>) -> Result<Bdd, BddError> {
        let n = function.num_inputs();
        let order: Vec<u32> = match order {
            Some(o) => o.to_vec(),
            None => (0..n).collect(),
        };
        let mut seen = vec![false; n as usize];
        if order.len() != n as usize
            || !order.iter().all(|&v| {
                (v as usize) < seen.len() && !std::mem::replace(&mut seen[v as usize], true)
            })
        {
            return Err(BddError::InvalidOrder(order));
        }

        let mut builder = Builder {
            order: &order,
            nodes: Vec::new(),
            unique: HashMap::new(),
            memo: HashMap::new(),
        };
        let mut roots = Vec::new();
        for out in 0..function.num_outputs() {
            // Permute the column so that the root-level variable is the
            // most significant index bit; cofactoring is then a halving.
            let column = function.output_column(out);
            let mut table = vec![false; column.len()];
            for (v, &bit) in column.iter().enumerate() {
                let mut idx = 0usize;
                for (pos, &var) in order.iter().enumerate() {
                    if v >> var & 1 == 1 {
                        idx |= 1 << (n as usize - 1 - pos);
                    }
                }
                table[idx] = bit;
            }
            roots.push(builder.build_rec(&table));
        }

        let nodes = builder.nodes;
        let mut parent_counts = vec![0u32; nodes.len()];
        for node in &nodes {
            for child in [node.low, node.high] {
                if let NodeRef::Node(id) = child {
                    parent_counts[id as usize] += 1;
                }
            }
        }

        Ok(Bdd {
            order,
            nodes,
            roots,
            num_inputs: n,
            input_names: function.input_names().to_vec(),
            output_names: function.output_names().to_vec(),
            parent_counts,
        })
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn roots(&self) -> &[NodeRef] {
        &self.roots
    }

    pub fn num_inputs(&self) -> u32 {
        self.num_inputs
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn node(&self, id: u32) -> Result<&BddNode, BddError> {
        self.nodes
            .get(id as usize)
            .ok_or(BddError::NodeOutOfRange(id))
    }

    pub fn nodes(&self) -> &[BddNode] {
        &self.nodes
    }

    /// Times `id` appears as a child of another node.
    pub fn parent_count(&self, id: u32) -> u32 {
        self.parent_counts[id as usize]
    }

    /// Times `id` appears in the root list.
    pub fn root_count(&self, id: u32) -> u32 {
        self.roots
            .iter()
            .filter(|r| **r == NodeRef::Node(id))
            .count() as u32
    }

    /// Number of internal nodes selecting on `var`.
    pub fn var_node_count(&self, var: u32) -> u32 {
        self.nodes.iter().filter(|n| n.var == var).count() as u32
    }

    /// Shape and sharing record for an internal node.
    pub fn classify_node(&self, node: NodeRef) -> Result<NodeShape, BddError> {
        let id = match node {
            NodeRef::Node(id) => id,
            _ => return Err(BddError::TerminalHasNoShape),
        };
        let n = *self.node(id)?;
        let kind_of = |r: NodeRef| match r {
            NodeRef::Zero => ChildKind::Zero,
            NodeRef::One => ChildKind::One,
            NodeRef::Node(_) => ChildKind::Internal,
        };
        let shared = |r: NodeRef| match r {
            NodeRef::Node(c) => self.parent_count(c) + self.root_count(c) > 1,
            _ => false,
        };
        Ok(NodeShape {
            low: kind_of(n.low),
            high: kind_of(n.high),
            low_shared: shared(n.low),
            high_shared: shared(n.high),
            select_shared: self.var_node_count(n.var) > 1,
        })
    }

    /// Evaluates all roots by path traversal.
    pub fn evaluate(&self, input: Bits) -> Result<Bits, BddError> {
        if input.width() != self.num_inputs {
            return Err(BddError::WidthMismatch {
                expected: self.num_inputs,
                got: input.width(),
            });
        }
        let mut out = Bits::zero(self.roots.len() as u32);
        for (i, &root) in self.roots.iter().enumerate() {
            let mut cur = root;
            let value = loop {
                match cur {
                    NodeRef::Zero => break false,
                    NodeRef::One => break true,
                    NodeRef::Node(id) => {
                        let node = &self.nodes[id as usize];
                        cur = if input.bit(node.var) {
                            node.high
                        } else {
                            node.low
                        };
                    }
                }
            };
            out = out.with_bit(i as u32, value);
        }
        Ok(out)
    }

    /// DOT dump of the DAG: node label = variable name, dashed edge = low,
    /// solid = high.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph bdd {\n");
        for (i, root) in self.roots.iter().enumerate() {
            let name = &self.output_names[i];
            let _ = writeln!(s, "  out_{i} [label=\"{name}\" shape=plaintext];");
            let _ = writeln!(s, "  out_{i} -> {};", dot_ref(*root));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            let label = &self.input_names[node.var as usize];
            let _ = writeln!(s, "  n{id} [label=\"{label}\"];");
            let _ = writeln!(s, "  n{id} -> {} [style=dashed];", dot_ref(node.low));
            let _ = writeln!(s, "  n{id} -> {};", dot_ref(node.high));
        }
        s.push_str("  t0 [label=\"0\" shape=box];\n  t1 [label=\"1\" shape=box];\n}\n");
        s
    }
}

fn dot_ref(r: NodeRef) -> String {
    match r {
        NodeRef::Zero => "t0".into(),
        NodeRef::One => "t1".into(),
        NodeRef::Node(id) => format!("n{id}"),
    }
}

struct Builder<'a> {
    order: &'a [u32],
    nodes: Vec<BddNode>,
    unique: HashMap<BddNode, u32>,
    memo: HashMap<Vec<bool>, NodeRef>,
}

impl Builder<'_> {
    fn build_rec(&mut self, table: &[bool]) -> NodeRef {
        if table.iter().all(|&b| !b) {
            return NodeRef::Zero;
        }
        if table.iter().all(|&b| b) {
            return NodeRef::One;
        }
        if let Some(&r) = self.memo.get(table) {
            return r;
        }
        // table.len() == 2^k for the last k order positions; the split
        // variable is the one at position (order.len() - k).
        let k = table.len().trailing_zeros() as usize;
        let level = self.order.len() - k;
        let var = self.order[level];
        let half = table.len() / 2;
        let low = self.build_rec(&table[..half]);
        let high = self.build_rec(&table[half..]);
        let r = self.get_node(var, low, high);
        self.memo.insert(table.to_vec(), r);
        r
    }

    fn get_node(&mut self, var: u32, low: NodeRef, high: NodeRef) -> NodeRef {
        if low == high {
            return low;
        }
        let node = BddNode { var, low, high };
        if let Some(&id) = self.unique.get(&node) {
            return NodeRef::Node(id);
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, id);
        NodeRef::Node(id)
    }
}
