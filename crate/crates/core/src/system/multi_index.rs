use std::fmt;
use std::ops::{Add, Index, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexRole {
    K,
    R,
    P,
    D,
    Q,
}

/// Ordered integer tuple with componentwise arithmetic; `|A|` is [`MultiIndex::abs`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub role: IndexRole,
    pub values: Vec<i64>,
}

impl MultiIndex {
    /// Checked constructor: entries must be nonnegative, and positive for `D`.
    pub fn new(role: IndexRole, values: Vec<i64>) -> Result<Self> {
        let min = if role == IndexRole::D { 1 } else { 0 };
        if let Some(v) = values.iter().find(|&&v| v < min) {
            return Err(Error::InvalidArgument(format!("{role:?} entry {v} is below {min}")));
        }
        Ok(MultiIndex { role, values })
    }

    pub fn from_usizes(role: IndexRole, values: &[usize]) -> Self {
        MultiIndex { role, values: values.iter().map(|&v| v as i64).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn abs(&self) -> i64 {
        self.values.iter().sum()
    }

    pub fn get(&self, i: usize) -> i64 {
        self.values[i]
    }

    pub fn with_role(mut self, role: IndexRole) -> Self {
        self.role = role;
        self
    }

    pub fn add_scalar(&self, c: i64) -> Self {
        MultiIndex { role: self.role, values: self.values.iter().map(|v| v + c).collect() }
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.len() == other.len() && self.values.iter().zip(&other.values).all(|(a, b)| a >= b)
    }

    /// Componentwise `self > other`.
    pub fn strictly_dominates(&self, other: &MultiIndex) -> bool {
        self.len() == other.len() && self.values.iter().zip(&other.values).all(|(a, b)| a > b)
    }

    /// Entries reordered: new entry `i` is old entry `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        MultiIndex { role: self.role, values: order.iter().map(|&i| self.values[i]).collect() }
    }

    /// Inverse of [`MultiIndex::permuted`].
    pub fn unpermuted(&self, order: &[usize]) -> Self {
        let mut values = vec![0; self.values.len()];
        for (pos, &orig) in order.iter().enumerate() {
            values[orig] = self.values[pos];
        }
        MultiIndex { role: self.role, values }
    }

    pub fn as_usizes(&self) -> Vec<usize> {
        self.values.iter().map(|&v| v.max(0) as usize).collect()
    }
}

impl Index<usize> for MultiIndex {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.values[i]
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.len(), rhs.len(), "multi-index length mismatch");
        MultiIndex {
            role: self.role,
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.len(), rhs.len(), "multi-index length mismatch");
        MultiIndex {
            role: self.role,
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let r = MultiIndex::new(IndexRole::R, vec![4, 3, 4]).unwrap();
        let k = MultiIndex::new(IndexRole::K, vec![1, 1, 1]).unwrap();
        let d = &r - &k;
        assert_eq!(d.values, vec![3, 2, 3]);
        assert_eq!(r.abs(), 11);
        assert_eq!(r.to_string(), "(4,3,4)");
        assert!(r.strictly_dominates(&k));
        assert!(MultiIndex::new(IndexRole::D, vec![0]).is_err());
    }

    #[test]
    fn permutation_roundtrip() {
        let r = MultiIndex::new(IndexRole::R, vec![2, 3, 3]).unwrap();
        let order = [1, 0, 2];
        assert_eq!(r.permuted(&order).values, vec![3, 2, 3]);
        assert_eq!(r.permuted(&order).unpermuted(&order), r);
    }
}
