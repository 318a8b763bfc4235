//! Prefix tree over every word mentioned by a knowledge base.

use std::collections::BTreeMap;

use crate::atom::{Alphabet, Symbol};
use crate::error::Result;
use crate::knowledge::{EntryId, Fact, KnowledgeBase};
use crate::label::MemLabel;

pub type NodeId = u32;

pub const ROOT: NodeId = 0;

#[derive(Clone, Debug, Default)]
pub struct PrefixTree {
    parent: Vec<Option<(NodeId, Symbol)>>,
    children: Vec<BTreeMap<Symbol, NodeId>>,
    labels: Vec<Vec<(EntryId, MemLabel)>>,
}

impl PrefixTree {
    pub fn new() -> Self {
        PrefixTree {
            parent: vec![None],
            children: vec![BTreeMap::new()],
            labels: vec![Vec::new()],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn insert(&mut self, word: &[Symbol]) -> NodeId {
        let mut cur = ROOT;
        for &a in word {
            cur = match self.children[cur as usize].get(&a) {
                Some(&next) => next,
                None => {
                    let id = self.parent.len() as NodeId;
                    self.parent.push(Some((cur, a)));
                    self.children.push(BTreeMap::new());
                    self.labels.push(Vec::new());
                    self.children[cur as usize].insert(a, id);
                    id
                }
            };
        }
        cur
    }

    pub fn node(&self, word: &[Symbol]) -> Option<NodeId> {
        word.iter()
            .try_fold(ROOT, |cur, a| self.children[cur as usize].get(a).copied())
    }

    /// `(parent, symbol)` of every non-root node.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, Symbol, NodeId)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|(u, a)| (u, a, v as NodeId)))
    }

    pub fn labels(&self, node: NodeId) -> &[(EntryId, MemLabel)] {
        &self.labels[node as usize]
    }

    pub fn word(&self, mut node: NodeId) -> Vec<Symbol> {
        let mut w = Vec::new();
        while let Some((p, a)) = self.parent[node as usize] {
            w.push(a);
            node = p;
        }
        w.reverse();
        w
    }
}

/// Inserts every word of every active entry; membership labels are attached.
pub fn build_prefix_tree(kb: &KnowledgeBase, alphabet: &Alphabet) -> Result<PrefixTree> {
    let mut tree = PrefixTree::new();
    for e in kb.active() {
        for atom in e.fact.atoms() {
            let w = atom.as_word()?;
            alphabet.check(w)?;
            let node = tree.insert(w);
            if let Fact::Mem { label, .. } = &e.fact {
                tree.labels[node as usize].push((e.id, *label));
            }
        }
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::Atom;
    use crate::label::PrefLabel;

    #[test]
    fn shares_prefixes_and_keeps_labels() {
        let mut kb = KnowledgeBase::new();
        let e = kb.add_membership(Atom::word(vec![0, 1]), MemLabel::Member);
        kb.add_preference(Atom::word(vec![0]), Atom::word(vec![1, 1]), PrefLabel::Less);
        let t = build_prefix_tree(&kb, &Alphabet::binary()).unwrap();
        // ε, 0, 01, 1, 11
        assert_eq!(t.len(), 5);
        let n = t.node(&[0, 1]).unwrap();
        assert_eq!(t.labels(n), &[(e, MemLabel::Member)]);
        assert_eq!(t.word(n), vec![0, 1]);
        assert!(t.labels(t.node(&[0]).unwrap()).is_empty());
        assert_eq!(t.edges().count(), 4);
    }

    #[test]
    fn foreign_symbols_are_rejected() {
        let mut kb = KnowledgeBase::new();
        kb.add_membership(Atom::word(vec![5]), MemLabel::Member);
        assert!(build_prefix_tree(&kb, &Alphabet::binary()).is_err());
    }
}
