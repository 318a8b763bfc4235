//! Benchmark targets, teachers and the experiment description.

use std::sync::Arc;

use memrep_core::dfa::{Dfa, DfaFamily, Synthesizer};
use memrep_core::learner::RecoveryMode;
use memrep_core::monotone::{threshold_cost, Grid, GridConcept, GridEquivalence, GridFamily, GridLevels};
use memrep_core::oracles::{
    cost_threshold_teacher, tomita_order, with_noise, DfaEquivalence, Noisy, RandomMemRepOrder, RandomOrderParams,
    SimulatedTeacher,
};
use memrep_core::strategy::CostModel;
use memrep_core::targets::{bby, modulo_k, ry, scaled_tomita4, tomita};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Extra states the synthesizer may use beyond the target's own size.
const STATE_SLACK: usize = 2;
const MIN_MAX_STATES: usize = 10;
/// Extra length the equivalence oracle explores past the product size.
const EQUIVALENCE_SLACK: usize = 4;

/// A benchmark concept: a fixed automaton, or a grid threshold drawn per seed
/// unless the name pins it.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Dfa { dfa: Dfa, prior: Option<Dfa> },
    Grid { grid: Grid, pinned: Option<u64> },
}

impl Target {
    /// The grid threshold a trial with `seed` tries to learn.
    pub fn grid_concept(grid: &Grid, seed: u64) -> GridConcept {
        let n = ChaCha8Rng::seed_from_u64(seed).gen_range(0..grid.len());
        GridConcept::new(grid.point(n))
    }
}

fn parse_name(name: &str) -> Result<(String, Vec<u64>)> {
    let bad = || HarnessError::UnknownTarget(name.to_string());
    let name = name.trim();
    if let Some((base, rest)) = name.split_once('(') {
        let args = rest.strip_suffix(')').ok_or_else(bad)?;
        let args = args
            .split(',')
            .map(|a| a.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        return Ok((base.to_string(), args));
    }
    match name.rsplit_once('_') {
        Some((base, n)) if n.chars().all(|c| c.is_ascii_digit()) && !n.is_empty() => {
            Ok((base.to_string(), vec![n.parse().map_err(|_| bad())?]))
        }
        _ => Ok((name.to_string(), vec![])),
    }
}

/// Resolves a target name: `tomita_1` … `tomita_7`, `bby`, `rymask`,
/// `modulo_k(k)`, `scaled_tomita4(n)` and `grid(d, i)` or `grid(d, i, seed)`.
pub fn build_target(name: &str) -> Result<Target> {
    let (base, args) = parse_name(name)?;
    let dfa = |dfa: Dfa| Ok(Target::Dfa { dfa, prior: None });
    let size = |v: u64| v as usize;
    match (base.as_str(), args.as_slice()) {
        ("tomita", [n]) => dfa(tomita(size(*n))?),
        ("bby", []) => Ok(Target::Dfa {
            dfa: bby(),
            prior: Some(ry()),
        }),
        ("rymask", []) => dfa(ry()),
        ("modulo_k" | "modulo", [k]) => dfa(modulo_k(size(*k))?),
        ("scaled_tomita4", [n]) => dfa(scaled_tomita4(size(*n))?),
        ("grid", [d, i]) => Ok(Target::Grid {
            grid: Grid::new(size(*d), size(*i))?,
            pinned: None,
        }),
        ("grid", [d, i, seed]) => Ok(Target::Grid {
            grid: Grid::new(size(*d), size(*i))?,
            pinned: Some(*seed),
        }),
        _ => Err(HarnessError::UnknownTarget(name.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeacherKind {
    RandomMemrep,
    TomitaSemantic,
    CostThreshold,
    /// Answers come from a person through the session service.
    Human,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeacherSpec {
    pub kind: TeacherKind,
    #[serde(default = "default_frac_incomparable")]
    pub frac_incomparable: f64,
    #[serde(default)]
    pub noise_rate: f64,
    /// Mixed into each trial's seed.
    #[serde(default)]
    pub seed: u64,
}

fn default_frac_incomparable() -> f64 {
    RandomOrderParams::default().frac_incomparable
}

impl TeacherSpec {
    pub fn new(kind: TeacherKind) -> Self {
        TeacherSpec {
            kind,
            frac_incomparable: default_frac_incomparable(),
            noise_rate: 0.0,
            seed: 0,
        }
    }

    /// Tomita languages get the semantic order, grids the cost order and
    /// everything else a random MemReP order.
    pub fn default_for(target: &str) -> Self {
        let kind = match parse_name(target) {
            Ok((base, _)) if base == "tomita" => TeacherKind::TomitaSemantic,
            Ok((base, _)) if base == "grid" => TeacherKind::CostThreshold,
            _ => TeacherKind::RandomMemrep,
        };
        TeacherSpec::new(kind)
    }
}

pub type DfaTeacher = Noisy<SimulatedTeacher<Dfa>>;
pub type GridTeacher = Noisy<SimulatedTeacher<GridConcept>>;

fn noise_seed(seed: u64) -> u64 {
    seed ^ 0x5eed
}

impl TeacherSpec {
    pub fn dfa_teacher(&self, target: &Dfa, seed: u64) -> Result<DfaTeacher> {
        let seed = self.seed.wrapping_add(seed);
        let shared = Arc::new(target.clone());
        let equivalence = DfaEquivalence::new(target.clone(), EQUIVALENCE_SLACK, seed);
        let inner = match self.kind {
            TeacherKind::RandomMemrep => {
                let params = RandomOrderParams {
                    frac_incomparable: self.frac_incomparable,
                    ..RandomOrderParams::default()
                };
                SimulatedTeacher::new(
                    shared.clone(),
                    RandomMemRepOrder::new(shared, params, seed)?,
                    equivalence,
                )
            }
            TeacherKind::TomitaSemantic => SimulatedTeacher::new(shared, tomita_order(target), equivalence),
            kind => return Err(HarnessError::Teacher(kind, "an automaton target")),
        };
        Ok(with_noise(inner, self.noise_rate, noise_seed(seed)))
    }

    pub fn grid_teacher(&self, grid: &Grid, target: &GridConcept, seed: u64) -> Result<GridTeacher> {
        if self.kind != TeacherKind::CostThreshold {
            return Err(HarnessError::Teacher(self.kind, "a grid target"));
        }
        let seed = self.seed.wrapping_add(seed);
        let equivalence = GridEquivalence {
            grid: *grid,
            target: target.clone(),
        };
        let inner = cost_threshold_teacher(threshold_cost(target), 0.0, equivalence);
        Ok(with_noise(inner, self.noise_rate, noise_seed(seed)))
    }
}

/// One batch experiment: a target, a teacher, the cost grid and the trials
/// run at every cost point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub name: String,
    pub target: String,
    /// Defaults to [`TeacherSpec::default_for`] the target.
    #[serde(default)]
    pub teacher: Option<TeacherSpec>,
    pub costs: Vec<CostModel>,
    pub trials: usize,
    /// Trial `t` runs with seed `seed + t`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub recovery: RecoveryMode,
    /// Grid resolutions the learner walks through; defaults to the target's.
    #[serde(default)]
    pub levels: Option<GridLevels>,
    #[serde(default)]
    pub max_states: Option<usize>,
    #[serde(default)]
    pub max_rounds: Option<usize>,
}

/// `a ∈ {1, 2, 4, 8}` with `b = 1`, then the membership-only baseline.
pub fn default_costs() -> Vec<CostModel> {
    let mut costs: Vec<CostModel> = [1.0, 2.0, 4.0, 8.0].iter().map(|&a| cost(a, 1.0)).collect();
    costs.push(cost(1.0, f64::INFINITY));
    costs
}

pub(crate) fn cost(a: f64, b: f64) -> CostModel {
    CostModel::new(a, b).expect("literal costs are valid")
}

impl Benchmark {
    /// A benchmark on a named target with the default teacher and cost grid:
    /// 20 trials for automata, 100 for grids.
    pub fn named(target: &str) -> Result<Self> {
        let resolved = build_target(target)?;
        let trials = match resolved {
            Target::Dfa { .. } => 20,
            Target::Grid { .. } => 100,
        };
        Ok(Benchmark {
            name: target.to_string(),
            target: target.to_string(),
            teacher: None,
            costs: default_costs(),
            trials,
            seed: 0,
            recovery: RecoveryMode::Off,
            levels: None,
            max_states: None,
            max_rounds: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.costs.is_empty() {
            return Err(HarnessError::Config("the cost grid is empty".into()));
        }
        let teacher = self.teacher();
        if teacher.kind == TeacherKind::Human {
            return Err(HarnessError::Config("human teachers answer through `serve`".into()));
        }
        if !(0.0..=1.0).contains(&teacher.noise_rate) {
            return Err(HarnessError::Config(format!(
                "noise rate {} is outside [0, 1]",
                teacher.noise_rate
            )));
        }
        let fits = match build_target(&self.target)? {
            Target::Dfa { .. } => matches!(teacher.kind, TeacherKind::RandomMemrep | TeacherKind::TomitaSemantic),
            Target::Grid { .. } => teacher.kind == TeacherKind::CostThreshold,
        };
        if !fits {
            return Err(HarnessError::Teacher(teacher.kind, "this target"));
        }
        Ok(())
    }

    pub fn teacher(&self) -> TeacherSpec {
        self.teacher
            .clone()
            .unwrap_or_else(|| TeacherSpec::default_for(&self.target))
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }

    pub fn dfa_family(&self, dfa: &Dfa, prior: Option<&Dfa>) -> Result<DfaFamily> {
        let mut synth = Synthesizer::new(dfa.alphabet().clone());
        if let Some(p) = prior {
            synth = synth.with_prior(p.clone())?;
        }
        let max_states = self
            .max_states
            .unwrap_or_else(|| MIN_MAX_STATES.max(dfa.num_states() + STATE_SLACK));
        Ok(DfaFamily { synth, max_states })
    }

    pub fn grid_family(&self, grid: &Grid) -> Result<GridFamily> {
        let levels = self.levels.unwrap_or(GridLevels::Fixed {
            resolution: grid.resolution,
        });
        Ok(GridFamily::new(grid.dim, levels)?)
    }
}
