use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered list of coordinate names shared by every expression on the same chart.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart(Arc<[String]>);

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::InvalidArgument(format!("`{n}` is not a valid coordinate name")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidArgument(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Chart(names.into()))
    }

    /// Chart `prefix1..prefixN`.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Chart(names.into())
    }

    /// Canonical cotangent chart `q1..qn, p1..pn`.
    pub fn canonical(n: usize) -> Self {
        let names: Vec<String> = (1..=n)
            .map(|i| format!("q{i}"))
            .chain((1..=n).map(|i| format!("p{i}")))
            .collect();
        Chart(names.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::NotInChart(name.to_string()))
    }

    pub fn ensure_same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch {
                expected: self.0.join(","),
                found: other.0.join(","),
            })
        }
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart{:?}", &self.0[..])
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(", "))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
