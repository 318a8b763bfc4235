//! Monotone threshold predicates over `[0, 1]^d` on uniform parameter grids.
//!
//! A point `p` belongs to `φ_θ` iff `p ≥ θ` coordinatewise, so raising a
//! threshold shrinks the concept.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::atom::{format_coord, parse_coord, Atom, Coord, Universe};
use crate::consistency::{is_consistent, Concept};
use crate::error::{Error, Result};
use crate::family::{Family, Survey, SurveyParams};
use crate::knowledge::KnowledgeBase;
use crate::label::MemLabel;
use crate::oracles::{CostFn, EquivalenceOracle};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct GridConcept {
    pub theta: Vec<Coord>,
}

impl GridConcept {
    pub fn new(theta: Vec<Coord>) -> Self {
        GridConcept { theta }
    }

    /// `φ_self ⊆ φ_other`, i.e. `other.θ ≤ self.θ` coordinatewise.
    pub fn refines(&self, other: &GridConcept) -> bool {
        self.theta.len() == other.theta.len() && other.theta.iter().zip(&self.theta).all(|(a, b)| a <= b)
    }
}

impl fmt::Debug for GridConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.theta.iter().map(format_coord).collect();
        write!(f, "θ({})", parts.join(", "))
    }
}

impl TryFrom<Vec<String>> for GridConcept {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        Ok(GridConcept {
            theta: v.iter().map(|s| parse_coord(s)).collect::<Result<_>>()?,
        })
    }
}

impl From<GridConcept> for Vec<String> {
    fn from(c: GridConcept) -> Self {
        c.theta.iter().map(format_coord).collect()
    }
}

impl Concept for GridConcept {
    fn contains(&self, atom: &Atom) -> bool {
        match atom {
            Atom::Point(p) => p.len() == self.theta.len() && p.iter().zip(&self.theta).all(|(x, t)| x >= t),
            Atom::Word(_) => false,
        }
    }
}

pub fn grid_contains(theta: &GridConcept, atom: &Atom) -> Result<bool> {
    let p = atom.as_point()?;
    if p.len() != theta.theta.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.theta.len(),
            actual: p.len(),
        });
    }
    Ok(theta.contains(atom))
}

/// The uniform grid `{0, 1/(r−1), …, 1}^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub resolution: usize,
}

impl Grid {
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::parameter("d", dim, "d ≥ 1"));
        }
        if resolution < 2 {
            return Err(Error::parameter("resolution", resolution, "≥ 2"));
        }
        Ok(Grid { dim, resolution })
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> Coord {
        Ratio::new(i as i64, self.resolution as i64 - 1)
    }

    /// The `n`-th grid point in lexicographic order.
    pub fn point(&self, mut n: usize) -> Vec<Coord> {
        let mut digits = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            digits[d] = n % self.resolution;
            n /= self.resolution;
        }
        digits.into_iter().map(|i| self.value(i)).collect()
    }

    /// All grid points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Vec<Coord>> + '_ {
        (0..self.len()).map(|n| self.point(n))
    }

    pub fn concepts(&self) -> impl Iterator<Item = GridConcept> + '_ {
        self.points().map(GridConcept::new)
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.points().map(Atom::Point)
    }

    /// Grid thresholds consistent with `kb`, in lexicographic order.
    pub fn consistent_set(&self, kb: &KnowledgeBase) -> Vec<GridConcept> {
        self.concepts().filter(|c| is_consistent(c, kb)).collect()
    }

    /// Smallest grid threshold at or above `theta` in every coordinate.
    pub fn ceil(&self, theta: &[f64]) -> GridConcept {
        let steps = (self.resolution - 1) as f64;
        GridConcept::new(
            theta
                .iter()
                .map(|&t| self.value(((t * steps - 1e-9).ceil().clamp(0.0, steps)) as usize))
                .collect(),
        )
    }
}

pub fn grid_consistent_set(grid: &Grid, kb: &KnowledgeBase) -> Vec<GridConcept> {
    grid.consistent_set(kb)
}

/// The lexicographically smallest grid point where the two thresholds
/// disagree, labeled by the target.
pub fn grid_equivalence(grid: &Grid, hypothesis: &GridConcept, target: &GridConcept) -> Option<(Atom, MemLabel)> {
    grid.atoms().find_map(|p| {
        let truth = target.contains(&p);
        (hypothesis.contains(&p) != truth).then(|| (p, MemLabel::from_bool(truth)))
    })
}

pub struct GridEquivalence {
    pub grid: Grid,
    pub target: GridConcept,
}

impl EquivalenceOracle<GridConcept> for GridEquivalence {
    fn counterexample(&mut self, hypothesis: &GridConcept) -> Option<(Atom, MemLabel)> {
        grid_equivalence(&self.grid, hypothesis, &self.target)
    }
}

/// Thresholds of a linear-reward specification `w · x ≥ δ`: `θ_j = (1 − w_j)/2`
/// and a final coordinate `(δ/d + 1)/2`.
pub fn thresholded_reward_params(w: &[f64], delta: f64) -> Result<Vec<f64>> {
    let d = w.len();
    if d == 0 {
        return Err(Error::parameter("d", 0, "d ≥ 1"));
    }
    if let Some(x) = w.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
        return Err(Error::parameter("w", x, "[−1, 1]"));
    }
    if !(-(d as f64)..=d as f64).contains(&delta) {
        return Err(Error::parameter("δ", delta, "[−d, d]"));
    }
    let mut theta: Vec<f64> = w.iter().map(|x| (1.0 - x) / 2.0).collect();
    theta.push((delta / d as f64 + 1.0) / 2.0);
    Ok(theta)
}

/// Feature scaling of a trajectory summary into the unit square: time spent
/// `tau` out of horizon `t_max`, and remaining distance `d` out of `d_max`.
pub fn smartcar_features(tau: f64, t_max: f64, d: f64, d_max: f64) -> Result<Vec<f64>> {
    if t_max <= 0.0 || d_max <= 0.0 {
        return Err(Error::parameter("horizon", format!("({t_max}, {d_max})"), "positive"));
    }
    let f = [tau / t_max, (d_max - d) / d_max];
    if let Some(x) = f.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::CoordinateRange(x.to_string()));
    }
    Ok(f.to_vec())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureTransform {
    #[default]
    Identity,
    Smartcar,
    ThresholdedReward,
}

/// `c(p) = max_j (θ_j − p_j)`: non-positive exactly on members of `φ_θ`.
pub fn threshold_cost(theta: &GridConcept) -> CostFn {
    let theta: Vec<f64> = theta.theta.iter().map(ratio_f64).collect();
    std::sync::Arc::new(move |a: &Atom| match a {
        Atom::Point(p) => p
            .iter()
            .zip(&theta)
            .map(|(x, t)| t - ratio_f64(x))
            .fold(f64::NEG_INFINITY, f64::max),
        Atom::Word(_) => f64::INFINITY,
    })
}

pub fn ratio_f64(c: &Coord) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

/// How the grid resolution grows when no threshold at the current one is
/// consistent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridLevels {
    /// `i, i+1, …` up to `cap`.
    Linear { start: usize, cap: usize },
    /// `2, 3, 5, 9, 17, 33, …` up to `cap`; each grid contains the previous one.
    Dyadic { cap: usize },
    /// A single resolution.
    Fixed { resolution: usize },
}

impl Default for GridLevels {
    fn default() -> Self {
        GridLevels::Linear { start: 2, cap: 33 }
    }
}

/// Above this many containment checks per round the distinguishing
/// candidates are subsampled.
const SPLIT_BUDGET: usize = 4_000_000;

/// Monotone thresholds on uniform grids; the size index is the resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFamily {
    pub dim: usize,
    pub levels: GridLevels,
}

impl GridFamily {
    pub fn new(dim: usize, levels: GridLevels) -> Result<Self> {
        Grid::new(dim, 2)?;
        let ok = match levels {
            GridLevels::Linear { start, cap } => start >= 2 && cap >= start,
            GridLevels::Dyadic { cap } => cap >= 2,
            GridLevels::Fixed { resolution } => resolution >= 2,
        };
        if !ok {
            return Err(Error::parameter(
                "levels",
                format!("{levels:?}"),
                "resolutions ≥ 2, cap ≥ start",
            ));
        }
        Ok(GridFamily { dim, levels })
    }

    pub fn grid(&self, size: usize) -> Grid {
        Grid {
            dim: self.dim,
            resolution: size,
        }
    }

    fn split_score(pool: &[GridConcept], atom: &Atom) -> usize {
        let inside = pool.iter().filter(|c| c.contains(atom)).count();
        inside.max(pool.len() - inside)
    }
}

impl Family for GridFamily {
    type Concept = GridConcept;

    fn universe(&self) -> Universe {
        Universe::Points { dim: self.dim }
    }

    fn initial_size(&self) -> usize {
        match self.levels {
            GridLevels::Linear { start, .. } => start,
            GridLevels::Dyadic { .. } => 2,
            GridLevels::Fixed { resolution } => resolution,
        }
    }

    fn next_size(&self, size: usize) -> Option<usize> {
        match self.levels {
            GridLevels::Linear { cap, .. } => Some(size + 1).filter(|&n| n <= cap),
            GridLevels::Dyadic { cap } => Some(2 * size - 1).filter(|&n| n <= cap),
            GridLevels::Fixed { .. } => None,
        }
    }

    fn survey(
        &self,
        kb: &KnowledgeBase,
        size: usize,
        params: SurveyParams,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Survey<GridConcept>> {
        let pool = self.grid(size).consistent_set(kb);
        let n = pool.len();
        let mut picks: Vec<usize> = Vec::new();
        if n > 0 {
            let want = params.alpha.min(n);
            for j in 0..want {
                let idx = if want == 1 { 0 } else { j * (n - 1) / (want - 1) };
                if !picks.contains(&idx) {
                    picks.push(idx);
                }
            }
        }
        Ok(Survey {
            psi: picks.into_iter().map(|i| pool[i].clone()).collect(),
            pool,
            exact: true,
        })
    }

    fn distinguishing_atoms(
        &self,
        a: &GridConcept,
        b: &GridConcept,
        size: usize,
        pool: &[GridConcept],
        per_side: usize,
        skip: &dyn Fn(&Atom) -> bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Atom>> {
        let grid = self.grid(size);
        let mut sides: [Vec<Atom>; 2] = [Vec::new(), Vec::new()];
        for p in grid.atoms() {
            let (ina, inb) = (a.contains(&p), b.contains(&p));
            if ina != inb && !skip(&p) {
                sides[usize::from(inb)].push(p);
            }
        }
        let budget = (SPLIT_BUDGET / pool.len().max(1)).max(per_side);
        let mut out = Vec::new();
        for mut side in sides {
            if side.len() > budget {
                side.shuffle(rng);
                side.truncate(budget);
            }
            let mut scored: Vec<(usize, Atom)> = side.into_iter().map(|p| (Self::split_score(pool, &p), p)).collect();
            scored.sort();
            out.extend(scored.into_iter().take(per_side).map(|(_, p)| p));
        }
        Ok(out)
    }

    fn filler_atoms(&self, size: usize, n: usize, skip: &dyn Fn(&Atom) -> bool, rng: &mut ChaCha8Rng) -> Vec<Atom> {
        let grid = self.grid(size);
        let mut out = Vec::new();
        for _ in 0..n * 50 {
            let p = Atom::Point(grid.point(rng.gen_range(0..grid.len())));
            if !skip(&p) && !out.contains(&p) {
                out.push(p);
                if out.len() == n {
                    break;
                }
            }
        }
        out
    }
}
