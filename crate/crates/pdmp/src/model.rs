//! Process models: the bundle of local characteristics, and the registry
//! that builds named models from flat parameter maps.

use crate::flow::Flow;
use crate::law::{JumpLaw, TransitionLaw};
use crate::space::StateSpace;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown model {name:?}; registered models: {known}")]
    Unknown { name: String, known: String },
    #[error("model parameter {key:?} is not recognized by model {model:?}")]
    UnknownParam { model: String, key: String },
    #[error("model parameter {key:?} = {value} violates {constraint}")]
    BadParam {
        key: String,
        value: f64,
        constraint: String,
    },
    #[error("flow dimension {flow} disagrees with state-space dimension {space}")]
    DimensionMismatch { flow: usize, space: usize },
}

/// A process model: state space plus the three local characteristics.
/// Immutable once built; shared freely across replicate workers.
#[derive(Clone)]
pub struct PdmpModel {
    space: StateSpace,
    flow: Arc<dyn Flow>,
    jumps: Arc<dyn JumpLaw>,
    transitions: Arc<dyn TransitionLaw>,
}

impl std::fmt::Debug for PdmpModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PdmpModel")
            .field("space", &self.space)
            .finish_non_exhaustive()
    }
}

impl PdmpModel {
    pub fn new(
        space: StateSpace,
        flow: Arc<dyn Flow>,
        jumps: Arc<dyn JumpLaw>,
        transitions: Arc<dyn TransitionLaw>,
    ) -> Result<Self, ModelError> {
        if flow.dim() != space.dim() {
            return Err(ModelError::DimensionMismatch {
                flow: flow.dim(),
                space: space.dim(),
            });
        }
        Ok(Self {
            space,
            flow,
            jumps,
            transitions,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn flow(&self) -> &Arc<dyn Flow> {
        &self.flow
    }

    pub fn jumps(&self) -> &Arc<dyn JumpLaw> {
        &self.jumps
    }

    pub fn transitions(&self) -> &Arc<dyn TransitionLaw> {
        &self.transitions
    }
}

/// Numeric parameter map taken from the `[model]` section of a config.
pub type ModelParams = BTreeMap<String, f64>;

/// Builds one family of models from parameters.
pub trait ModelBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, params: &ModelParams) -> Result<PdmpModel, ModelError>;
}

/// By-name registry of model families.
pub struct ModelRegistry {
    builders: BTreeMap<String, Arc<dyn ModelBuilder>>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self {
            builders: BTreeMap::new(),
        }
    }

    /// Registry with every model family this crate ships (currently the
    /// cell-growth model).
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(crate::cell::CellModelBuilder));
        reg
    }

    pub fn register(&mut self, builder: Arc<dyn ModelBuilder>) {
        self.builders.insert(builder.name().to_string(), builder);
    }

    pub fn build(&self, name: &str, params: &ModelParams) -> Result<PdmpModel, ModelError> {
        let builder = self.builders.get(name).ok_or_else(|| ModelError::Unknown {
            name: name.to_string(),
            known: self.names().join(", "),
        })?;
        builder.build(params)
    }

    pub fn names(&self) -> Vec<String> {
        self.builders.keys().cloned().collect()
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_knows_the_cell_model() {
        let reg = ModelRegistry::builtin();
        assert_eq!(reg.names(), vec!["cell".to_string()]);
        assert!(reg.build("cell", &ModelParams::new()).is_ok());
    }

    #[test]
    fn unknown_model_is_an_error() {
        let reg = ModelRegistry::builtin();
        let err = reg.build("brownian", &ModelParams::new()).unwrap_err();
        assert!(matches!(err, ModelError::Unknown { .. }));
    }
}
