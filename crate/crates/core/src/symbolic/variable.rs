use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// What a variable stands for. Indices are 1-based to match the usual
/// `x1 .. xn`, `u1 .. um` naming.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    State(usize),
    /// `order` is the time-derivative order: `Input { index: 2, order: 1 }` is `u2_d1`.
    Input { index: usize, order: usize },
    TransformedInput { index: usize, order: usize },
    Parameter(String),
}

impl VarKind {
    /// Input-like family `(is_transformed, index)`; `None` for states and parameters.
    pub fn family(&self) -> Option<(bool, usize)> {
        match self {
            VarKind::Input { index, .. } => Some((false, *index)),
            VarKind::TransformedInput { index, .. } => Some((true, *index)),
            _ => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            VarKind::Input { order, .. } | VarKind::TransformedInput { order, .. } => Some(*order),
            _ => None,
        }
    }

    /// Stable 64-bit key, independent of the Rust version and platform.
    pub fn stable_key(&self) -> u64 {
        let mut h = Fnv::default();
        match self {
            VarKind::State(i) => {
                h.write_u8(1);
                h.write_u64(*i as u64);
            }
            VarKind::Input { index, order } => {
                h.write_u8(2);
                h.write_u64(*index as u64);
                h.write_u64(*order as u64);
            }
            VarKind::TransformedInput { index, order } => {
                h.write_u8(3);
                h.write_u64(*index as u64);
                h.write_u64(*order as u64);
            }
            VarKind::Parameter(name) => {
                h.write_u8(4);
                h.write(name.as_bytes());
            }
        }
        h.finish()
    }
}

#[derive(Default)]
struct Fnv(u64);

impl Fnv {
    fn write(&mut self, bytes: &[u8]) {
        if self.0 == 0 {
            self.0 = 0xcbf2_9ce4_8422_2325;
        }
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
    fn write_u8(&mut self, v: u8) {
        self.write(&[v]);
    }
    fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

/// A named variable. Identity (equality, ordering, hashing) is carried by
/// the kind alone; the name is only used for display.
#[derive(Debug, Clone)]
pub struct VariableId {
    kind: VarKind,
    name: Arc<str>,
}

impl VariableId {
    pub fn new(kind: VarKind, name: impl Into<Arc<str>>) -> Self {
        VariableId { kind, name: name.into() }
    }

    pub fn state(index: usize, name: &str) -> Self {
        Self::new(VarKind::State(index), name)
    }

    pub fn input(index: usize, base_name: &str) -> Self {
        Self::new(VarKind::Input { index, order: 0 }, base_name)
    }

    pub fn transformed_input(index: usize) -> Self {
        Self::new(VarKind::TransformedInput { index, order: 0 }, format!("uhat{index}"))
    }

    pub fn parameter(name: &str) -> Self {
        Self::new(VarKind::Parameter(name.to_string()), name)
    }

    pub fn kind(&self) -> &VarKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Name without any `_d<k>` derivative suffix.
    pub fn base_name(&self) -> &str {
        match self.kind.order() {
            Some(k) if k > 0 => {
                let suffix = format!("_d{k}");
                self.name.strip_suffix(suffix.as_str()).unwrap_or(&self.name)
            }
            _ => &self.name,
        }
    }

    pub fn is_state(&self) -> bool {
        matches!(self.kind, VarKind::State(_))
    }

    pub fn is_input_like(&self) -> bool {
        self.kind.family().is_some()
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self.kind, VarKind::Parameter(_))
    }

    /// Same family at derivative order `order`. Panics on states and parameters.
    pub fn with_order(&self, order: usize) -> Self {
        let kind = match &self.kind {
            VarKind::Input { index, .. } => VarKind::Input { index: *index, order },
            VarKind::TransformedInput { index, .. } => {
                VarKind::TransformedInput { index: *index, order }
            }
            other => panic!("with_order on non-input variable {other:?}"),
        };
        let base = self.base_name();
        let name = if order == 0 { base.to_string() } else { format!("{base}_d{order}") };
        VariableId::new(kind, name)
    }

    /// Next time derivative of an input-like variable.
    pub fn successor(&self) -> Self {
        self.with_order(self.kind.order().expect("successor of non-input") + 1)
    }
}

impl PartialEq for VariableId {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for VariableId {}

impl PartialOrd for VariableId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VariableId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind.cmp(&other.kind)
    }
}

impl Hash for VariableId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
