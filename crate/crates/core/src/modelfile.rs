//! Sectioned plain-text model files.
//!
//! ```toml
//! [system]
//! name = "three_level_chain"      # optional
//! n_dof = 3
//! parameters = []                 # E is implicit
//! hamiltonian = "q1*p2 + q2*p3"
//!
//! [primaries]                     # ordered, name = expression
//! phi1 = "p1"
//!
//! [secondaries]                   # optional, verification mode
//! [tertiaries]                    # optional, verification mode
//!
//! [generators.good]               # any number of named sets
//! D = "q1*p1"
//!
//! [options]                       # all optional
//! degree_bound = 4
//! on_shell_energy = true
//! coefficient_mode = "polynomial" # or "constant"
//! ```
//!
//! Unknown sections and keys are rejected. Key order is significant and is
//! preserved on both read and write.

use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainOptions, ConstrainedSystem, Constraint, ConstraintChain};
use crate::error::{AlgebraError, ChainError, ParseError};
use crate::expr::parse;
use crate::ideal::CoefficientMode;
use crate::poly::PhaseSpace;
use crate::symmetry::{CheckOptions, GeneratorSet, GeneratorSetError};

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("malformed model file: {0}")]
    Syntax(String),
    #[error("in `{field}`: {error}")]
    Expression { field: String, error: ParseError },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("generator set `{set}`: {error}")]
    Generators { set: String, error: GeneratorSetError },
    #[error("tertiaries given without secondaries")]
    TertiariesWithoutSecondaries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n_dof: usize,
    #[serde(default)]
    pub parameters: Vec<String>,
    pub hamiltonian: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Constant,
    Polynomial,
}

impl From<ModeName> for CoefficientMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Constant => CoefficientMode::Constant,
            ModeName::Polynomial => CoefficientMode::Polynomial,
        }
    }
}

impl From<CoefficientMode> for ModeName {
    fn from(m: CoefficientMode) -> Self {
        match m {
            CoefficientMode::Constant => ModeName::Constant,
            CoefficientMode::Polynomial => ModeName::Polynomial,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on_shell_energy: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient_mode: Option<ModeName>,
}

impl OptionsSection {
    fn is_empty(&self) -> bool {
        *self == OptionsSection::default()
    }
}

/// The raw file, before any expression is parsed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub system: SystemSection,
    #[serde(default)]
    pub primaries: IndexMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondaries: Option<IndexMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tertiaries: Option<IndexMap<String, String>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub generators: IndexMap<String, IndexMap<String, String>>,
    #[serde(default, skip_serializing_if = "OptionsSection::is_empty")]
    pub options: OptionsSection,
}

impl ModelFile {
    pub fn from_toml(text: &str) -> Result<Self, ModelFileError> {
        toml::from_str(text).map_err(|e| ModelFileError::Syntax(e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model files always serialize")
    }

    /// Parses every expression and validates the system and generator sets.
    pub fn load(&self) -> Result<Model, ModelFileError> {
        let space = PhaseSpace::new(self.system.n_dof, self.system.parameters.iter().cloned())?;
        let expr = |field: String, text: &str| {
            parse(text, &space).map_err(|error| ModelFileError::Expression { field, error })
        };
        let named = |section: &str, map: &IndexMap<String, String>| -> Result<Vec<Constraint>, ModelFileError> {
            map.iter()
                .map(|(name, text)| Ok(Constraint::new(name, expr(format!("{section}.{name}"), text)?)))
                .collect()
        };

        let hamiltonian = expr("system.hamiltonian".into(), &self.system.hamiltonian)?;
        let system = ConstrainedSystem::new(hamiltonian, named("primaries", &self.primaries)?)?;
        let explicit_levels = match (&self.secondaries, &self.tertiaries) {
            (None, None) => None,
            (None, Some(_)) => return Err(ModelFileError::TertiariesWithoutSecondaries),
            (Some(s), t) => Some([
                named("secondaries", s)?,
                t.as_ref().map(|t| named("tertiaries", t)).transpose()?.unwrap_or_default(),
            ]),
        };
        let generator_sets = self
            .generators
            .iter()
            .map(|(set, gens)| {
                let gens = named(&format!("generators.{set}"), gens)?;
                GeneratorSet::new(set, gens).map_err(|error| ModelFileError::Generators {
                    set: set.clone(),
                    error,
                })
            })
            .collect::<Result<_, _>>()?;
        let options = ModelOptions {
            degree_bound: self.options.degree_bound,
            on_shell_energy: self.options.on_shell_energy.unwrap_or(true),
            coefficient_mode: self
                .options
                .coefficient_mode
                .map_or(CoefficientMode::Polynomial, Into::into),
        };
        Ok(Model {
            name: self.system.name.clone(),
            system,
            explicit_levels,
            generator_sets,
            options,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelOptions {
    pub degree_bound: Option<u32>,
    pub on_shell_energy: bool,
    pub coefficient_mode: CoefficientMode,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            degree_bound: None,
            on_shell_energy: true,
            coefficient_mode: CoefficientMode::Polynomial,
        }
    }
}

impl ModelOptions {
    pub fn chain_options(&self) -> ChainOptions {
        ChainOptions {
            degree_bound: self.degree_bound,
        }
    }

    pub fn check_options(&self) -> CheckOptions {
        CheckOptions {
            degree_bound: self.degree_bound,
            include_energy: self.on_shell_energy,
            level_mode: self.coefficient_mode,
        }
    }
}

/// A validated constrained system with its generator sets.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: Option<String>,
    pub system: ConstrainedSystem,
    /// Secondaries and tertiaries given in the file, if any.
    pub explicit_levels: Option<[Vec<Constraint>; 2]>,
    pub generator_sets: Vec<GeneratorSet>,
    pub options: ModelOptions,
}

impl Model {
    pub fn from_toml(text: &str) -> Result<Self, ModelFileError> {
        ModelFile::from_toml(text)?.load()
    }

    pub fn space(&self) -> &Arc<PhaseSpace> {
        self.system.space()
    }

    /// The generated chain.
    pub fn chain(&self) -> Result<ConstraintChain, ChainError> {
        ConstraintChain::generate(&self.system, self.options.chain_options())
    }

    /// The chain built from the file's explicit levels, if it has them.
    pub fn explicit_chain(&self) -> Option<Result<ConstraintChain, ChainError>> {
        self.explicit_levels.as_ref().map(|[s, t]| {
            ConstraintChain::from_levels(&self.system, s.clone(), t.clone(), self.options.chain_options())
        })
    }

    pub fn generator_set(&self, name: &str) -> Option<&GeneratorSet> {
        self.generator_sets.iter().find(|s| s.name == name)
    }

    pub fn to_file(&self) -> ModelFile {
        let strings = |cs: &[Constraint]| -> IndexMap<String, String> {
            cs.iter().map(|c| (c.name.clone(), c.poly.to_string())).collect()
        };
        let defaults = ModelOptions::default();
        ModelFile {
            system: SystemSection {
                name: self.name.clone(),
                n_dof: self.space().n_dof(),
                parameters: self.space().declared_parameters().map(String::from).collect(),
                hamiltonian: self.system.hamiltonian().to_string(),
            },
            primaries: strings(self.system.primaries()),
            secondaries: self.explicit_levels.as_ref().map(|[s, _]| strings(s)),
            tertiaries: self
                .explicit_levels
                .as_ref()
                .filter(|[_, t]| !t.is_empty())
                .map(|[_, t]| strings(t)),
            generators: self
                .generator_sets
                .iter()
                .map(|set| (set.name.clone(), strings(set.generators())))
                .collect(),
            options: OptionsSection {
                degree_bound: self.options.degree_bound,
                on_shell_energy: (self.options.on_shell_energy != defaults.on_shell_energy)
                    .then_some(self.options.on_shell_energy),
                coefficient_mode: (self.options.coefficient_mode != defaults.coefficient_mode)
                    .then_some(self.options.coefficient_mode.into()),
            },
        }
    }

    pub fn to_toml(&self) -> String {
        self.to_file().to_toml()
    }
}
