//! What a client needs to draw atoms: tile strips for words, gauges for points.

use memrep_core::monotone::ratio_f64;
use memrep_core::{Atom, Universe};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub symbol: String,
    pub color: String,
    pub meaning: String,
}

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
];

fn tile(symbol: &str) -> Option<(&'static str, &'static str)> {
    Some(match symbol {
        "Bl" => ("#2b6cb0", "water"),
        "Br" => ("#8b5a2b", "dryer"),
        "R" => ("#c53030", "lava"),
        "Y" => ("#d69e2e", "recharge"),
        _ => return None,
    })
}

/// Colors for every symbol; grid-world tiles get their usual colors.
pub fn legend(universe: &Universe) -> Vec<LegendEntry> {
    match universe {
        Universe::Words { alphabet } => alphabet
            .names()
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let (color, meaning) = tile(name).unwrap_or((PALETTE[i % PALETTE.len()], name.as_str()));
                LegendEntry {
                    symbol: name.clone(),
                    color: color.to_string(),
                    meaning: meaning.to_string(),
                }
            })
            .collect(),
        Universe::Points { .. } => Vec::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rendered {
    /// One tile per step, by symbol name.
    Tiles(Vec<String>),
    /// One gauge per feature.
    Gauges(Vec<f64>),
}

pub fn render(universe: &Universe, atom: &Atom) -> Rendered {
    match (universe, atom) {
        (Universe::Words { alphabet }, Atom::Word(w)) => Rendered::Tiles(
            w.iter()
                .map(|&s| alphabet.name(s).map(str::to_string).unwrap_or_else(|_| s.to_string()))
                .collect(),
        ),
        (_, Atom::Point(p)) => Rendered::Gauges(p.iter().map(ratio_f64).collect()),
        (Universe::Points { .. }, Atom::Word(w)) => Rendered::Tiles(w.iter().map(|s| s.to_string()).collect()),
    }
}
