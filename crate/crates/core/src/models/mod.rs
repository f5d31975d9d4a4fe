//! Built-in model Hamiltonians.

mod henon_heiles;
mod spring;

pub use henon_heiles::{ModifiedHenonHeiles, StandardHenonHeiles};
pub use spring::SpringPendulum;

use crate::error::{Error, Result};
use crate::system::SystemModel;

/// Name-addressable handle over the built-in models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemId {
    ModifiedHenonHeiles,
    StandardHenonHeiles,
    SpringPendulum,
}

impl SystemId {
    pub const ALL: [SystemId; 3] = [
        SystemId::ModifiedHenonHeiles,
        SystemId::StandardHenonHeiles,
        SystemId::SpringPendulum,
    ];

    pub fn by_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.model().name() == name)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|id| id.model().name()).collect();
                Error::Parameter(format!(
                    "unknown system `{name}`; valid names: {}",
                    names.join(", ")
                ))
            })
    }

    pub fn model(self) -> &'static dyn SystemModel<2> {
        match self {
            SystemId::ModifiedHenonHeiles => &ModifiedHenonHeiles,
            SystemId::StandardHenonHeiles => &StandardHenonHeiles,
            SystemId::SpringPendulum => &SpringPendulum,
        }
    }

    pub fn name(self) -> &'static str {
        self.model().name()
    }

    /// Index into the phase vector `(q..., p...)` of a coordinate or momentum name.
    pub fn component_index(self, name: &str) -> Result<usize> {
        let m = self.model();
        m.coordinate_names()
            .iter()
            .chain(m.momentum_names().iter())
            .position(|n| *n == name)
            .ok_or_else(|| {
                Error::Parameter(format!(
                    "system `{}` has no variable `{name}`; valid: {}, {}",
                    m.name(),
                    m.coordinate_names().join(", "),
                    m.momentum_names().join(", ")
                ))
            })
    }
}
