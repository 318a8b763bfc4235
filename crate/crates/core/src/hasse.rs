//! The preorder induced by recorded preferences, and contradiction detection.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::atom::{Atom, Universe};
use crate::knowledge::{EntryId, Fact, KnowledgeBase};
use crate::label::{MemLabel, PrefLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// A strict preference closes a cycle, possibly through equivalences.
    StrictCycle,
    /// Two atoms declared incomparable are nonetheless ordered by the closure.
    IncomparableEntailed,
    /// One atom carries both membership labels.
    ConflictingLabels,
    /// A rejected atom is weakly preferred to an accepted one.
    MemRep,
    /// No concept up to the size cap agrees with these entries jointly.
    Unsatisfiable,
}

impl ViolationKind {
    /// Whether this violation rules out every subset of the universe.
    pub fn blocks_consistency(self) -> bool {
        matches!(self, ViolationKind::ConflictingLabels | ViolationKind::MemRep)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub entries: BTreeSet<EntryId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations that leave no consistent concept at all.
    pub fn blocking(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.kind.blocks_consistency())
    }

    pub fn entries(&self) -> BTreeSet<EntryId> {
        self.violations.iter().flat_map(|v| v.entries.iter().copied()).collect()
    }

    fn push(&mut self, kind: ViolationKind, entries: BTreeSet<EntryId>) {
        if !self.violations.iter().any(|v| v.entries == entries) {
            self.violations.push(Violation { kind, entries });
        }
    }
}

/// Atom-level graph with an edge `u → v` whenever a fact entails `v ⪯ u`.
struct PrefGraph {
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, usize>,
    out: Vec<Vec<(usize, EntryId)>>,
}

impl PrefGraph {
    fn new(kb: &KnowledgeBase) -> Self {
        let atoms: Vec<Atom> = kb.atoms().into_iter().collect();
        let index: BTreeMap<Atom, usize> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let mut out = vec![Vec::new(); atoms.len()];
        for e in kb.active() {
            if let Fact::Pref { lhs, rhs, label } = &e.fact {
                let (x, y) = (index[lhs], index[rhs]);
                match label {
                    PrefLabel::Less => out[y].push((x, e.id)),
                    PrefLabel::Equiv => {
                        out[x].push((y, e.id));
                        out[y].push((x, e.id));
                    }
                    PrefLabel::Greater | PrefLabel::Incomparable => {}
                }
            }
        }
        PrefGraph { atoms, index, out }
    }

    /// BFS tree from `s`: for each reached node, the edge used to reach it.
    fn bfs(&self, s: usize) -> Vec<Option<(usize, EntryId)>> {
        let mut parent = vec![None; self.atoms.len()];
        let mut seen = vec![false; self.atoms.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &(v, e) in &self.out[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some((u, e));
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    fn path_entries(parent: &[Option<(usize, EntryId)>], s: usize, t: usize) -> Option<BTreeSet<EntryId>> {
        let mut entries = BTreeSet::new();
        let mut cur = t;
        while cur != s {
            let (p, e) = parent[cur]?;
            entries.insert(e);
            cur = p;
        }
        Some(entries)
    }

    fn shortest_path(&self, s: usize, t: usize) -> Option<BTreeSet<EntryId>> {
        if s == t {
            return Some(BTreeSet::new());
        }
        Self::path_entries(&self.bfs(s), s, t)
    }
}

/// Every contradiction among active entries, each with a small supporting set.
pub fn detect_violations(kb: &KnowledgeBase) -> ViolationReport {
    let g = PrefGraph::new(kb);
    let mut report = ViolationReport::default();

    for e in kb.active() {
        let Fact::Pref { lhs, rhs, label } = &e.fact else {
            continue;
        };
        let (x, y) = (g.index[lhs], g.index[rhs]);
        match label {
            PrefLabel::Less => {
                // The edge y → x closes a cycle iff x reaches y.
                if let Some(mut path) = g.shortest_path(x, y) {
                    path.insert(e.id);
                    report.push(ViolationKind::StrictCycle, path);
                }
            }
            PrefLabel::Incomparable => {
                let forward = g.shortest_path(x, y);
                let backward = g.shortest_path(y, x);
                let best = match (forward, backward) {
                    (Some(a), Some(b)) => Some(if b.len() < a.len() { b } else { a }),
                    (a, b) => a.or(b),
                };
                if let Some(mut path) = best {
                    path.insert(e.id);
                    report.push(ViolationKind::IncomparableEntailed, path);
                }
            }
            _ => {}
        }
    }

    let mut members: BTreeMap<usize, EntryId> = BTreeMap::new();
    let mut non_members: BTreeMap<usize, EntryId> = BTreeMap::new();
    for e in kb.active() {
        if let Fact::Mem { atom, label } = &e.fact {
            let side = match label {
                MemLabel::Member => &mut members,
                MemLabel::NonMember => &mut non_members,
            };
            side.entry(g.index[atom]).or_insert(e.id);
        }
    }
    for (&n, &n_entry) in &non_members {
        let parent = g.bfs(n);
        for (&m, &m_entry) in &members {
            if let Some(mut path) = PrefGraph::path_entries(&parent, n, m) {
                let kind = if n == m {
                    ViolationKind::ConflictingLabels
                } else {
                    ViolationKind::MemRep
                };
                path.insert(n_entry);
                path.insert(m_entry);
                report.push(kind, path);
            }
        }
    }
    report
}

/// Transitive reduction of the strict part of the recorded preorder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HasseDiagram {
    /// Equivalence classes, each sorted; classes ordered by their least atom.
    pub classes: Vec<Vec<Atom>>,
    /// `(u, v)`: every atom of class `u` is strictly preferred to every atom of `v`.
    pub edges: Vec<(usize, usize)>,
    /// Recorded incomparabilities between classes.
    pub incomparable: Vec<(usize, usize)>,
    class_of: BTreeMap<Atom, usize>,
}

impl HasseDiagram {
    pub fn class_of(&self, atom: &Atom) -> Option<usize> {
        self.class_of.get(atom).copied()
    }

    fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.classes.len();
        let mut succ = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            succ[u].push(v);
        }
        (0..n)
            .map(|s| {
                let mut seen = vec![false; n];
                let mut stack = succ[s].clone();
                while let Some(u) = stack.pop() {
                    if !seen[u] {
                        seen[u] = true;
                        stack.extend(&succ[u]);
                    }
                }
                seen
            })
            .collect()
    }

    /// All pairs `(x, y)` with `x ≺ y`, recovered from the reduced edges.
    pub fn strict_pairs(&self) -> BTreeSet<(Atom, Atom)> {
        let reach = self.reachability();
        let mut pairs = BTreeSet::new();
        for (u, row) in reach.iter().enumerate() {
            for (v, &r) in row.iter().enumerate() {
                if r {
                    for y in &self.classes[u] {
                        for x in &self.classes[v] {
                            pairs.insert((x.clone(), y.clone()));
                        }
                    }
                }
            }
        }
        pairs
    }

    /// Graphviz rendering; membership labels from `kb` color the nodes.
    pub fn to_dot(&self, universe: &Universe, kb: &KnowledgeBase) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=TB;\n");
        for (i, class) in self.classes.iter().enumerate() {
            let names: Vec<String> = class.iter().map(|a| universe.display(a)).collect();
            let color = match class.iter().find_map(|a| kb.membership(a)) {
                Some(MemLabel::Member) => "palegreen",
                Some(MemLabel::NonMember) => "lightpink",
                None => "white",
            };
            let _ = writeln!(
                out,
                "  c{i} [label=\"{}\", style=filled, fillcolor={color}];",
                names.join(" ≡ ").replace('"', "\\\"")
            );
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  c{u} -> c{v};");
        }
        for &(u, v) in &self.incomparable {
            let _ = writeln!(out, "  c{u} -> c{v} [style=dashed, dir=none, label=\"∥\"];");
        }
        out.push_str("}\n");
        out
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// The Hasse diagram of the recorded preorder, or the preorder violations
/// that prevent one from existing.
pub fn build_hasse(kb: &KnowledgeBase) -> Result<HasseDiagram, ViolationReport> {
    let report = detect_violations(kb);
    if report
        .violations
        .iter()
        .any(|v| matches!(v.kind, ViolationKind::StrictCycle | ViolationKind::IncomparableEntailed))
    {
        let violations = report
            .violations
            .into_iter()
            .filter(|v| !v.kind.blocks_consistency())
            .collect();
        return Err(ViolationReport { violations });
    }

    let atoms: Vec<Atom> = kb.atoms().into_iter().collect();
    let index: BTreeMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut uf: Vec<usize> = (0..atoms.len()).collect();
    for e in kb.active() {
        if let Fact::Pref {
            lhs,
            rhs,
            label: PrefLabel::Equiv,
        } = &e.fact
        {
            let (a, b) = (find(&mut uf, index[lhs]), find(&mut uf, index[rhs]));
            uf[a.max(b)] = a.min(b);
        }
    }
    // Atoms are sorted, so the root with the smallest index is the class minimum.
    let mut class_ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<Atom>> = Vec::new();
    let mut class_of = BTreeMap::new();
    for (i, atom) in atoms.iter().enumerate() {
        let root = find(&mut uf, i);
        let next = class_ids.len();
        let c = *class_ids.entry(root).or_insert(next);
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(atom.clone());
        class_of.insert(atom.clone(), c);
    }

    let n = classes.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut incomparable = BTreeSet::new();
    for e in kb.active() {
        if let Fact::Pref { lhs, rhs, label } = &e.fact {
            let (x, y) = (class_of[lhs], class_of[rhs]);
            match label {
                PrefLabel::Less => {
                    succ[y].insert(x);
                }
                PrefLabel::Incomparable => {
                    incomparable.insert((x.min(y), x.max(y)));
                }
                _ => {}
            }
        }
    }
    let mut reach = vec![vec![false; n]; n];
    for s in 0..n {
        let mut stack: Vec<usize> = succ[s].iter().copied().collect();
        while let Some(u) = stack.pop() {
            if !reach[s][u] {
                reach[s][u] = true;
                stack.extend(&succ[u]);
            }
        }
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for &v in &succ[u] {
            if !succ[u].iter().any(|&w| w != v && reach[w][v]) {
                edges.push((u, v));
            }
        }
    }

    Ok(HasseDiagram {
        classes,
        edges,
        incomparable: incomparable.into_iter().collect(),
        class_of,
    })
}
