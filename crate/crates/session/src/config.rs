use memrep_core::dfa::{Dfa, DfaFamily, SymmetryBreaking, Synthesizer};
use memrep_core::learner::LearnerConfig;
use memrep_core::monotone::{GridFamily, GridLevels};
use memrep_core::{targets, Alphabet};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Result, SessionError};

/// A prior every hypothesis is intersected with: a built-in name or an
/// automaton in the usual JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Named(String),
    Automaton(Dfa),
}

impl PriorSpec {
    pub fn resolve(&self) -> Result<Dfa> {
        match self {
            PriorSpec::Named(name) => match name.as_str() {
                "ry" => Ok(targets::ry()),
                other => Err(SessionError::Config(format!("unknown prior `{other}`"))),
            },
            PriorSpec::Automaton(d) => Ok(d.clone()),
        }
    }
}

fn binary() -> Alphabet {
    Alphabet::binary()
}

fn default_max_states() -> usize {
    DfaFamily::DEFAULT_MAX_STATES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Dfa {
        #[serde(default = "binary")]
        alphabet: Alphabet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<PriorSpec>,
        #[serde(default = "default_max_states")]
        max_states: usize,
        #[serde(default)]
        symmetry: SymmetryBreaking,
    },
    Grid {
        dim: usize,
        #[serde(default)]
        levels: GridLevels,
    },
}

impl FamilySpec {
    pub fn dfa(alphabet: Alphabet) -> Self {
        FamilySpec::Dfa {
            alphabet,
            prior: None,
            max_states: default_max_states(),
            symmetry: SymmetryBreaking::default(),
        }
    }

    /// The grid-world tiles with the "reach Y, never touch R" prior.
    pub fn tiles() -> Self {
        FamilySpec::Dfa {
            alphabet: targets::tile_alphabet(),
            prior: Some(PriorSpec::Named("ry".into())),
            max_states: default_max_states(),
            symmetry: SymmetryBreaking::default(),
        }
    }

    pub fn build_dfa(&self) -> Result<DfaFamily> {
        let FamilySpec::Dfa {
            alphabet,
            prior,
            max_states,
            symmetry,
        } = self
        else {
            return Err(SessionError::Config("not a DFA family".into()));
        };
        if *max_states == 0 {
            return Err(SessionError::Config("max_states must be at least 1".into()));
        }
        let mut synth = Synthesizer::new(alphabet.clone());
        if let Some(p) = prior {
            synth = synth.with_prior(p.resolve()?)?;
        }
        synth.options.symmetry = *symmetry;
        Ok(DfaFamily {
            synth,
            max_states: *max_states,
        })
    }

    pub fn build_grid(&self) -> Result<GridFamily> {
        match self {
            FamilySpec::Grid { dim, levels } => Ok(GridFamily::new(*dim, *levels)?),
            FamilySpec::Dfa { .. } => Err(SessionError::Config("not a grid family".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub family: FamilySpec,
    pub learner: LearnerConfig,
    /// Answers known up front, as `{mem: [...], pref: [...]}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knowledge: Option<Value>,
}
