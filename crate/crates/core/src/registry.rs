//! Name-keyed registries of strategy objects.
//!
//! Each family of interchangeable algorithms ([`SeriesGauge`], [`RootFinder`],
//! [`SurveyMetric`]) exposes a `builtin_registry()` that pre-registers the
//! stock implementations. Callers may register their own implementations on
//! top before handing the registry to a driver.
//!
//! [`SeriesGauge`]: crate::series::SeriesGauge
//! [`RootFinder`]: crate::singularity::RootFinder
//! [`SurveyMetric`]: crate::convergence::SurveyMetric

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Anything that can be stored in a [`Registry`].
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `item` under its own name, replacing any previous entry.
    pub fn register(&mut self, item: Arc<T>) -> &mut Self {
        self.entries.insert(item.name(), item);
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}
