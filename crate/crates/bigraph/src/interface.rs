//! Interfaces: the faces through which bigraphs compose.
//!
//! An interface pairs a width (how many regions, or dually how many holes)
//! with a finite set of names. Names are compared as sets; order never
//! matters.

use std::collections::BTreeSet;
use std::fmt;

/// `⟨width, names⟩`. The inner face of a bigraph counts holes, the outer
/// face counts regions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Interface {
    pub width: usize,
    pub names: BTreeSet<String>,
}

impl Interface {
    pub fn new(width: usize, names: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Interface { width, names: names.into_iter().map(Into::into).collect() }
    }

    /// `⟨0, {}⟩`, the interface of ground bigraphs.
    pub fn ground() -> Self {
        Interface::default()
    }

    pub fn is_ground(&self) -> bool {
        self.width == 0 && self.names.is_empty()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    /// Names shared with another interface, in sorted order.
    pub fn shared_names<'a>(&'a self, other: &'a Interface) -> impl Iterator<Item = &'a String> {
        self.names.intersection(&other.names)
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {{", self.width)?;
        for (i, n) in self.names.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}>")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_compare_as_sets() {
        let a = Interface::new(1, ["x", "y"]);
        let b = Interface::new(1, ["y", "x"]);
        assert_eq!(a, b);
    }

    #[test]
    fn display_is_sorted() {
        let i = Interface::new(2, ["b", "a"]);
        assert_eq!(i.to_string(), "<2, {a,b}>");
    }
}
