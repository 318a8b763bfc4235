//! CNF encoding of "some DFA with k states agrees with the knowledge base".
//!
//! Variables: `x(v, i)` node `v` of the prefix tree is colored with state `i`;
//! `z(i)` state `i` accepts; `y(i, a, j)` state `i` moves to `j` on `a`.
//! Every entry gets an activation literal guarding its clauses, so entries can
//! be switched off by assumptions and show up in unsatisfiable cores.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::atom::{Alphabet, Symbol};
use crate::dfa::automaton::{Dfa, State};
use crate::dfa::prefix_tree::{PrefixTree, ROOT};
use crate::error::{Error, Result};
use crate::knowledge::{EntryId, Fact, KnowledgeBase};
use crate::label::{MemLabel, PrefLabel};

/// DIMACS-style clause set: variables are `1..=num_vars`, literals are signed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    pub fn add(&mut self, clause: Vec<i32>) {
        self.clauses.push(clause);
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

/// BFS-order symmetry breaking. It forces all `k` states to be reachable,
/// which leaves the set of representable languages unchanged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryBreaking {
    Off,
    On,
    /// On from five states up.
    #[default]
    Auto,
}

impl SymmetryBreaking {
    pub fn enabled(self, k: usize) -> bool {
        match self {
            SymmetryBreaking::Off => false,
            SymmetryBreaking::On => true,
            SymmetryBreaking::Auto => k >= 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Encoding {
    pub cnf: Cnf,
    pub k: usize,
    pub symbols: usize,
    pub nodes: usize,
    /// Activation literal of each active entry, in acquisition order.
    pub activations: Vec<(EntryId, i32)>,
}

impl Encoding {
    pub fn x(&self, v: u32, i: usize) -> i32 {
        (v as usize * self.k + i + 1) as i32
    }

    pub fn z(&self, i: usize) -> i32 {
        (self.nodes * self.k + i + 1) as i32
    }

    pub fn y(&self, i: usize, a: usize, j: usize) -> i32 {
        (self.nodes * self.k + self.k + (i * self.symbols + a) * self.k + j + 1) as i32
    }

    fn base_vars(&self) -> u32 {
        (self.nodes * self.k + self.k + self.k * self.symbols * self.k) as u32
    }

    pub fn assumptions(&self) -> Vec<i32> {
        self.activations.iter().map(|&(_, l)| l).collect()
    }

    /// The `k`-state automaton described by a model (`value(var)`).
    pub fn decode(&self, alphabet: &Alphabet, value: impl Fn(i32) -> bool) -> Result<Dfa> {
        let mut delta = Vec::with_capacity(self.k * self.symbols);
        for i in 0..self.k {
            for a in 0..self.symbols {
                let j = (0..self.k)
                    .find(|&j| value(self.y(i, a, j)))
                    .ok_or_else(|| Error::malformed("model", "state without a transition"))?;
                delta.push(j as State);
            }
        }
        let accepting = (0..self.k).map(|i| value(self.z(i))).collect();
        Dfa::new(alphabet.clone(), 0, accepting, delta)
    }

    /// Forbids the reachable structure of `dfa`: its transitions and
    /// acceptance flags restricted to states reachable from state 0.
    pub fn blocking_clause(&self, dfa: &Dfa) -> Vec<i32> {
        let mut clause = Vec::new();
        for q in dfa.reachable() {
            let i = q as usize;
            clause.push(if dfa.is_accepting(q) { -self.z(i) } else { self.z(i) });
            for a in 0..self.symbols {
                clause.push(-self.y(i, a, dfa.step(q, a as Symbol) as usize));
            }
        }
        clause
    }
}

pub fn encode(
    tree: &PrefixTree,
    kb: &KnowledgeBase,
    alphabet: &Alphabet,
    k: usize,
    sb: SymmetryBreaking,
) -> Result<Encoding> {
    if k == 0 {
        return Err(Error::parameter("k", k, "k ≥ 1"));
    }
    let mut enc = Encoding {
        cnf: Cnf::default(),
        k,
        symbols: alphabet.len(),
        nodes: tree.len(),
        activations: Vec::new(),
    };
    enc.cnf.num_vars = enc.base_vars();
    let s = enc.symbols;
    let mut clauses: Vec<Vec<i32>> = Vec::new();

    clauses.push(vec![enc.x(ROOT, 0)]);
    for v in 0..tree.len() as u32 {
        clauses.push((0..k).map(|i| enc.x(v, i)).collect());
        for i in 0..k {
            for j in i + 1..k {
                clauses.push(vec![-enc.x(v, i), -enc.x(v, j)]);
            }
        }
    }
    for i in 0..k {
        for a in 0..s {
            clauses.push((0..k).map(|j| enc.y(i, a, j)).collect());
            for j in 0..k {
                for h in j + 1..k {
                    clauses.push(vec![-enc.y(i, a, j), -enc.y(i, a, h)]);
                }
            }
        }
    }
    for (p, a, v) in tree.edges() {
        for i in 0..k {
            for j in 0..k {
                let y = enc.y(i, a as usize, j);
                clauses.push(vec![-enc.x(p, i), -enc.x(v, j), y]);
                clauses.push(vec![-y, -enc.x(p, i), enc.x(v, j)]);
            }
        }
    }

    let node = |w: &[Symbol]| tree.node(w).expect("prefix tree holds every entry word");
    for e in kb.active() {
        let act = enc.cnf.new_var();
        enc.activations.push((e.id, act));
        match &e.fact {
            Fact::Mem { atom, label } => {
                let v = node(atom.as_word()?);
                for i in 0..k {
                    let z = match label {
                        MemLabel::Member => enc.z(i),
                        MemLabel::NonMember => -enc.z(i),
                    };
                    clauses.push(vec![-act, -enc.x(v, i), z]);
                }
            }
            Fact::Pref { lhs, rhs, label } => {
                let (w, v) = (node(lhs.as_word()?), node(rhs.as_word()?));
                // φ(lo) ≤ φ(hi) for each ordered requirement.
                let mut add_le = |lo: u32, hi: u32| {
                    for j in 0..k {
                        for i in 0..k {
                            clauses.push(vec![-act, -enc.x(lo, j), -enc.x(hi, i), -enc.z(j), enc.z(i)]);
                        }
                    }
                };
                match label {
                    PrefLabel::Less => add_le(w, v),
                    PrefLabel::Greater => add_le(v, w),
                    PrefLabel::Equiv => {
                        add_le(w, v);
                        add_le(v, w);
                    }
                    PrefLabel::Incomparable => {}
                }
            }
        }
    }

    if sb.enabled(k) && k > 1 {
        add_bfs_symmetry_breaking(&mut enc, &mut clauses);
    }
    enc.cnf.clauses = clauses;
    Ok(enc)
}

fn add_bfs_symmetry_breaking(enc: &mut Encoding, clauses: &mut Vec<Vec<i32>>) {
    let (k, s) = (enc.k, enc.symbols);
    // t[i][j], i < j: some transition from i to j.
    let mut t = vec![vec![0i32; k]; k];
    // p[j][i], i < j: i is the BFS parent of j.
    let mut p = vec![vec![0i32; k]; k];
    // m[i][a][j], i < j: a is the least symbol moving i to j.
    let mut m = vec![vec![vec![0i32; k]; s]; k];
    for i in 0..k {
        for j in i + 1..k {
            t[i][j] = enc.cnf.new_var();
            p[j][i] = enc.cnf.new_var();
            for row in m[i].iter_mut() {
                row[j] = enc.cnf.new_var();
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            let mut any = vec![-t[i][j]];
            for a in 0..s {
                clauses.push(vec![-enc.y(i, a, j), t[i][j]]);
                any.push(enc.y(i, a, j));
            }
            clauses.push(any);

            clauses.push(vec![-p[j][i], t[i][j]]);
            let mut def = vec![p[j][i], -t[i][j]];
            for h in 0..i {
                clauses.push(vec![-p[j][i], -t[h][j]]);
                def.push(t[h][j]);
            }
            clauses.push(def);

            for a in 0..s {
                let mv = m[i][a][j];
                clauses.push(vec![-mv, enc.y(i, a, j)]);
                let mut def = vec![mv, -enc.y(i, a, j)];
                for b in 0..a {
                    clauses.push(vec![-mv, -enc.y(i, b, j)]);
                    def.push(enc.y(i, b, j));
                }
                clauses.push(def);
            }
        }
    }
    for j in 1..k {
        clauses.push((0..j).map(|i| p[j][i]).collect());
    }
    for j in 1..k - 1 {
        for i in 0..j {
            for h in 0..i {
                clauses.push(vec![-p[j][i], -p[j + 1][h]]);
            }
            for a in 0..s {
                let mut c = vec![-p[j][i], -p[j + 1][i], -m[i][a][j + 1]];
                c.extend((0..a).map(|b| m[i][b][j]));
                clauses.push(c);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::Atom;
    use crate::dfa::prefix_tree::build_prefix_tree;

    #[test]
    fn variable_layout_is_dense_and_disjoint() {
        let mut kb = KnowledgeBase::new();
        kb.add_membership(Atom::word(vec![0, 1]), MemLabel::Member);
        let alphabet = Alphabet::binary();
        let tree = build_prefix_tree(&kb, &alphabet).unwrap();
        let enc = encode(&tree, &kb, &alphabet, 3, SymmetryBreaking::Off).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for v in 0..3 {
            for i in 0..3 {
                assert!(seen.insert(enc.x(v, i)));
            }
        }
        for i in 0..3 {
            assert!(seen.insert(enc.z(i)));
            for a in 0..2 {
                for j in 0..3 {
                    assert!(seen.insert(enc.y(i, a, j)));
                }
            }
        }
        assert_eq!(seen.len() as u32, enc.base_vars());
        assert_eq!(*seen.iter().next_back().unwrap() as u32, enc.base_vars());
        assert_eq!(enc.activations.len(), 1);
        let dimacs = enc.cnf.to_dimacs();
        assert!(dimacs.starts_with(&format!("p cnf {} {}", enc.cnf.num_vars, enc.cnf.clauses.len())));
    }
}
