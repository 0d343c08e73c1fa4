//! Name-keyed registries of trait objects.
//!
//! Interchangeable pieces of the toolkit (matched-projection routes, example
//! families, verification suites) implement a common trait with a stable
//! name and are looked up at runtime from the CLI.

use crate::error::{Error, Result};

pub trait Named {
    fn name(&self) -> &'static str;
}

/// Insertion-ordered collection of boxed strategies with unique names.
pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: Vec::new(),
        }
    }

    pub fn register(&mut self, entry: Box<T>) -> Result<()> {
        if self.entries.iter().any(|e| e.name() == entry.name()) {
            return Err(Error::InvalidParameter(format!(
                "{} '{}' registered twice",
                self.kind,
                entry.name()
            )));
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Builder-style [`register`](Self::register); panics on duplicates.
    pub fn with(mut self, entry: Box<T>) -> Self {
        self.register(entry).expect("unique registry names");
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown {} '{name}' (known: {})",
                    self.kind,
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
