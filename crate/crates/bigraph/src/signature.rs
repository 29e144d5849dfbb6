//! Controls and signatures.
//!
//! A control is a node kind: it fixes how many ports a node carries and
//! whether reactions may happen underneath it. A signature is a finite set
//! of controls with distinct names; every bigraph is built over one.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Whether reactions are permitted strictly below a node of this control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Activity {
    Active,
    Passive,
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activity::Active => write!(f, "active"),
            Activity::Passive => write!(f, "passive"),
        }
    }
}

/// A node kind: name, port count, and activity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Control {
    pub name: String,
    pub arity: usize,
    pub activity: Activity,
}

impl Control {
    pub fn new(name: impl Into<String>, arity: usize, activity: Activity) -> Self {
        Control { name: name.into(), arity, activity }
    }

    pub fn is_active(&self) -> bool {
        self.activity == Activity::Active
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate control name `{0}`")]
    DuplicateControl(String),
}

/// A finite set of controls, indexed by name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    controls: BTreeMap<String, Control>,
}

impl Signature {
    pub fn new(controls: impl IntoIterator<Item = Control>) -> Result<Self, SignatureError> {
        let mut map = BTreeMap::new();
        for c in controls {
            if map.insert(c.name.clone(), c.clone()).is_some() {
                return Err(SignatureError::DuplicateControl(c.name));
            }
        }
        Ok(Signature { controls: map })
    }

    pub fn get(&self, name: &str) -> Option<&Control> {
        self.controls.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.controls.contains_key(name)
    }

    /// Controls in name order.
    pub fn controls(&self) -> impl Iterator<Item = &Control> {
        self.controls.values()
    }

    pub fn len(&self) -> usize {
        self.controls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controls.is_empty()
    }

    /// The signature with the named controls removed.
    pub fn without(&self, names: &std::collections::BTreeSet<String>) -> Signature {
        Signature {
            controls: self
                .controls
                .iter()
                .filter(|(n, _)| !names.contains(*n))
                .map(|(n, c)| (n.clone(), c.clone()))
                .collect(),
        }
    }
}
