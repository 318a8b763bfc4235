//! Complete deterministic finite automata.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::atom::{Alphabet, Atom, Symbol};
use crate::consistency::Concept;
use crate::error::{Error, Result};

pub type State = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DfaRepr", into = "DfaRepr")]
pub struct Dfa {
    alphabet: Alphabet,
    initial: State,
    accepting: Vec<bool>,
    /// Row-major `states × |Σ|` transition table.
    delta: Vec<State>,
}

impl Dfa {
    pub fn new(alphabet: Alphabet, initial: State, accepting: Vec<bool>, delta: Vec<State>) -> Result<Self> {
        let n = accepting.len();
        if n == 0 {
            return Err(Error::malformed("dfa", "no states"));
        }
        if delta.len() != n * alphabet.len() {
            return Err(Error::malformed("dfa", "transition table is not complete"));
        }
        if initial as usize >= n || delta.iter().any(|&q| q as usize >= n) {
            return Err(Error::malformed("dfa", "state out of range"));
        }
        Ok(Dfa {
            alphabet,
            initial,
            accepting,
            delta,
        })
    }

    pub fn from_fn(
        alphabet: Alphabet,
        states: usize,
        accepting: impl Fn(State) -> bool,
        step: impl Fn(State, Symbol) -> State,
    ) -> Self {
        let k = alphabet.len();
        let mut delta = Vec::with_capacity(states * k);
        for q in 0..states as State {
            for a in 0..k as Symbol {
                delta.push(step(q, a));
            }
        }
        let accepting = (0..states as State).map(accepting).collect();
        Dfa::new(alphabet, 0, accepting, delta).expect("from_fn builds a complete automaton")
    }

    pub fn universal(alphabet: Alphabet) -> Self {
        Dfa::from_fn(alphabet, 1, |_| true, |_, _| 0)
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Dfa::from_fn(alphabet, 1, |_| false, |_, _| 0)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn is_accepting(&self, q: State) -> bool {
        self.accepting[q as usize]
    }

    pub fn step(&self, q: State, a: Symbol) -> State {
        self.delta[q as usize * self.alphabet.len() + a as usize]
    }

    pub fn run_from(&self, q: State, word: &[Symbol]) -> State {
        word.iter().fold(q, |q, &a| self.step(q, a))
    }

    /// Whether the word is accepted; symbols outside the alphabet reject.
    pub fn accepts_word(&self, word: &[Symbol]) -> bool {
        if word.iter().any(|&a| a as usize >= self.alphabet.len()) {
            return false;
        }
        self.is_accepting(self.run_from(self.initial, word))
    }

    pub fn accepts(&self, atom: &Atom) -> Result<bool> {
        let w = atom.as_word()?;
        self.alphabet.check(w)?;
        Ok(self.accepts_word(w))
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        for a in &mut d.accepting {
            *a = !*a;
        }
        d
    }

    /// Reachable part of the synchronous product, accepting where `op` holds.
    pub fn product(&self, other: &Dfa, op: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        self.alphabet.same_as(&other.alphabet)?;
        let k = self.alphabet.len();
        let mut ids: HashMap<(State, State), State> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        let start = (self.initial, other.initial);
        ids.insert(start, 0);
        order.push(start);
        queue.push_back(start);
        let mut delta = Vec::new();
        while let Some((p, q)) = queue.pop_front() {
            for a in 0..k as Symbol {
                let next = (self.step(p, a), other.step(q, a));
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = order.len() as State;
                        ids.insert(next, id);
                        order.push(next);
                        queue.push_back(next);
                        id
                    }
                };
                delta.push(id);
            }
        }
        let accepting = order
            .iter()
            .map(|&(p, q)| op(self.is_accepting(p), other.is_accepting(q)))
            .collect();
        Dfa::new(self.alphabet.clone(), 0, accepting, delta)
    }

    pub fn conjunction(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && b)
    }

    pub fn symmetric_difference(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a != b)
    }

    /// States reachable from the initial state, in BFS order over symbol order.
    pub fn reachable(&self) -> Vec<State> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial as usize] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for a in 0..self.alphabet.len() as Symbol {
                let r = self.step(q, a);
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    order.push(r);
                }
            }
            i += 1;
        }
        order
    }

    /// The minimal automaton with canonically numbered states. Two automata
    /// accept the same language iff their minimized forms are equal.
    pub fn minimize(&self) -> Dfa {
        let k = self.alphabet.len();
        let reach = self.reachable();
        let mut class: HashMap<State, usize> = reach.iter().map(|&q| (q, usize::from(self.is_accepting(q)))).collect();
        let mut count = class.values().collect::<std::collections::BTreeSet<_>>().len();
        loop {
            let mut sigs: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            let mut next = HashMap::with_capacity(reach.len());
            for &q in &reach {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[&q]);
                sig.extend((0..k as Symbol).map(|a| class[&self.step(q, a)]));
                let n = sigs.len();
                let c = *sigs.entry(sig).or_insert(n);
                next.insert(q, c);
            }
            let new_count = sigs.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // Renumber classes in BFS order from the initial state.
        let mut id_of: HashMap<usize, State> = HashMap::new();
        let mut reps: Vec<State> = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        id_of.insert(class[&self.initial], 0);
        reps.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for a in 0..k as Symbol {
                let r = self.step(q, a);
                let c = class[&r];
                if let std::collections::hash_map::Entry::Vacant(v) = id_of.entry(c) {
                    v.insert(reps.len() as State);
                    reps.push(r);
                    queue.push_back(r);
                }
            }
        }
        let mut delta = Vec::with_capacity(reps.len() * k);
        for &q in &reps {
            for a in 0..k as Symbol {
                delta.push(id_of[&class[&self.step(q, a)]]);
            }
        }
        let accepting = reps.iter().map(|&q| self.is_accepting(q)).collect();
        Dfa::new(self.alphabet.clone(), 0, accepting, delta).expect("minimized automaton is complete")
    }

    /// `live[q]`: some accepting state is reachable from `q`.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut live: Vec<bool> = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                if !live[q] && (0..self.alphabet.len()).any(|a| live[self.step(q as State, a as Symbol) as usize]) {
                    live[q] = true;
                    changed = true;
                }
            }
        }
        live
    }

    /// Symbols that lead every reachable live state to a dead one: no
    /// accepted word contains them.
    pub fn killing_symbols(&self) -> Vec<Symbol> {
        let live = self.live_states();
        let reach = self.reachable();
        (0..self.alphabet.len() as Symbol)
            .filter(|&a| {
                reach
                    .iter()
                    .all(|&q| !live[q as usize] || !live[self.step(q, a) as usize])
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.reachable().iter().all(|&q| !self.is_accepting(q))
    }

    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        Ok(self.symmetric_difference(other)?.is_empty())
    }

    /// `self ⊆ other` as languages.
    pub fn is_subset_of(&self, other: &Dfa) -> Result<bool> {
        Ok(self.product(other, |a, b| a && !b)?.is_empty())
    }

    /// A shortest accepted word, least in symbol order among those.
    pub fn shortest_accepted(&self) -> Option<Vec<Symbol>> {
        let k = self.alphabet.len();
        let mut parent: Vec<Option<(State, Symbol)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        seen[self.initial as usize] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            if self.is_accepting(q) {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur as usize] {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for a in 0..k as Symbol {
                let r = self.step(q, a);
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    parent[r as usize] = Some((q, a));
                    queue.push_back(r);
                }
            }
        }
        None
    }

    /// Length of the shortest accepted word.
    pub fn min_accepted_length(&self) -> Option<usize> {
        self.shortest_accepted().map(|w| w.len())
    }

    /// Number of accepted words of each length `0..=max_len`, saturating.
    pub fn count_by_length(&self, max_len: usize) -> Vec<u128> {
        let counter = WordCounter::new(self, max_len);
        (0..=max_len).map(|l| counter.from(self.initial, l)).collect()
    }

    /// A uniformly random accepted word of exactly `len` symbols.
    pub fn sample_accepted<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Option<Vec<Symbol>> {
        WordCounter::new(self, len).sample(self, len, rng)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n");
        for q in 0..self.num_states() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        let _ = writeln!(out, "  start -> q{};", self.initial);
        for q in 0..self.num_states() as State {
            let mut grouped: BTreeMap<State, Vec<&str>> = BTreeMap::new();
            for (a, name) in self.alphabet.names().iter().enumerate() {
                grouped.entry(self.step(q, a as Symbol)).or_default().push(name);
            }
            for (r, names) in grouped {
                let _ = writeln!(out, "  q{q} -> q{r} [label=\"{}\"];", names.join(","));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Concept for Dfa {
    fn contains(&self, atom: &Atom) -> bool {
        match atom {
            Atom::Word(w) => self.accepts_word(w),
            Atom::Point(_) => false,
        }
    }
}

/// `table[r][q]`: accepted words of length `r` read from state `q`.
pub struct WordCounter {
    table: Vec<Vec<u128>>,
}

impl WordCounter {
    pub fn new(dfa: &Dfa, max_len: usize) -> Self {
        let n = dfa.num_states();
        let mut table = Vec::with_capacity(max_len + 1);
        table.push(
            (0..n as State)
                .map(|q| u128::from(dfa.is_accepting(q)))
                .collect::<Vec<_>>(),
        );
        for r in 1..=max_len {
            let prev: &Vec<u128> = &table[r - 1];
            let row = (0..n as State)
                .map(|q| {
                    (0..dfa.alphabet().len() as Symbol)
                        .fold(0u128, |acc, a| acc.saturating_add(prev[dfa.step(q, a) as usize]))
                })
                .collect();
            table.push(row);
        }
        WordCounter { table }
    }

    pub fn from(&self, q: State, len: usize) -> u128 {
        self.table[len][q as usize]
    }

    pub fn sample<R: Rng + ?Sized>(&self, dfa: &Dfa, len: usize, rng: &mut R) -> Option<Vec<Symbol>> {
        let mut q = dfa.initial();
        if self.from(q, len) == 0 {
            return None;
        }
        let mut word = Vec::with_capacity(len);
        for r in (1..=len).rev() {
            let total = self.from(q, r);
            let mut pick = rng.gen_range(0..total);
            let mut chosen = None;
            for a in 0..dfa.alphabet().len() as Symbol {
                let c = self.from(dfa.step(q, a), r - 1);
                if pick < c {
                    chosen = Some(a);
                    break;
                }
                pick -= c;
            }
            // Saturated counts can leave `pick` beyond the last bucket.
            let a = chosen.unwrap_or_else(|| {
                (0..dfa.alphabet().len() as Symbol)
                    .rev()
                    .find(|&a| self.from(dfa.step(q, a), r - 1) > 0)
                    .expect("a nonzero count has a nonzero successor")
            });
            word.push(a);
            q = dfa.step(q, a);
        }
        Some(word)
    }
}

#[derive(Serialize, Deserialize)]
struct DfaRepr {
    states: usize,
    alphabet: Alphabet,
    transitions: Vec<(State, String, State)>,
    initial: State,
    accepting: Vec<State>,
}

impl From<Dfa> for DfaRepr {
    fn from(d: Dfa) -> Self {
        let mut transitions = Vec::with_capacity(d.delta.len());
        for q in 0..d.num_states() as State {
            for (a, name) in d.alphabet.names().iter().enumerate() {
                transitions.push((q, name.clone(), d.step(q, a as Symbol)));
            }
        }
        DfaRepr {
            states: d.num_states(),
            accepting: (0..d.num_states() as State).filter(|&q| d.is_accepting(q)).collect(),
            initial: d.initial,
            alphabet: d.alphabet,
            transitions,
        }
    }
}

impl TryFrom<DfaRepr> for Dfa {
    type Error = Error;

    fn try_from(r: DfaRepr) -> Result<Self> {
        let k = r.alphabet.len();
        let mut delta: Vec<Option<State>> = vec![None; r.states * k];
        for (q, name, p) in r.transitions {
            let a = r.alphabet.symbol(&name)?;
            if q as usize >= r.states || p as usize >= r.states {
                return Err(Error::malformed("dfa", format!("transition {q} -{name}-> {p}")));
            }
            let slot = &mut delta[q as usize * k + a as usize];
            if slot.is_some_and(|old| old != p) {
                return Err(Error::malformed("dfa", format!("nondeterministic at {q} on {name}")));
            }
            *slot = Some(p);
        }
        let delta = delta
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::malformed("dfa", "missing transitions"))?;
        let mut accepting = vec![false; r.states];
        for q in r.accepting {
            *accepting
                .get_mut(q as usize)
                .ok_or_else(|| Error::malformed("dfa", format!("accepting state {q}")))? = true;
        }
        Dfa::new(r.alphabet, r.initial, accepting, delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binary() -> Alphabet {
        Alphabet::binary()
    }

    /// Even number of 1s, with a redundant copy of each state.
    fn even_ones_bloated() -> Dfa {
        Dfa::from_fn(binary(), 4, |q| q % 2 == 0, |q, a| if a == 1 { (q + 1) % 4 } else { q })
    }

    fn all_words(max_len: usize) -> Vec<Vec<Symbol>> {
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for a in 0..2 {
                    let mut v: Vec<Symbol> = w.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    fn arb_dfa() -> impl Strategy<Value = Dfa> {
        (1usize..6).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(0..n as State, n * 2),
            )
                .prop_map(|(acc, delta)| Dfa::new(Alphabet::binary(), 0, acc, delta).unwrap())
        })
    }

    #[test]
    fn minimization_merges_duplicates() {
        let m = even_ones_bloated().minimize();
        assert_eq!(m.num_states(), 2);
        assert!(m.accepts_word(&[1, 0, 1]));
        assert!(!m.accepts_word(&[1]));
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        let d = even_ones_bloated();
        let text = serde_json::to_string(&d).unwrap();
        let back: Dfa = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn incomplete_json_is_rejected() {
        let text = r#"{"states":1,"alphabet":["0","1"],"transitions":[[0,"0",0]],"initial":0,"accepting":[]}"#;
        assert!(serde_json::from_str::<Dfa>(text).is_err());
    }

    #[test]
    fn counts_and_shortest_word() {
        let d = even_ones_bloated();
        // Words of length 2 with an even number of 1s: 00, 11.
        assert_eq!(d.count_by_length(3), vec![1, 1, 2, 4]);
        let odd = d.complement();
        assert_eq!(odd.shortest_accepted(), Some(vec![1]));
        assert!(Dfa::empty(binary()).shortest_accepted().is_none());
    }

    #[test]
    fn sampling_hits_only_accepted_words_of_the_length() {
        let d = even_ones_bloated().complement();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let w = d.sample_accepted(3, &mut rng).unwrap();
            assert_eq!(w.len(), 3);
            assert!(d.accepts_word(&w));
            seen.insert(w);
        }
        assert_eq!(seen.len(), 4);
    }

    proptest! {
        #[test]
        fn minimize_preserves_language(d in arb_dfa()) {
            let m = d.minimize();
            prop_assert!(m.num_states() <= d.num_states());
            for w in all_words(7) {
                prop_assert_eq!(m.accepts_word(&w), d.accepts_word(&w));
            }
            prop_assert_eq!(m.minimize(), m);
        }

        #[test]
        fn canonical_forms_agree_iff_languages_agree(a in arb_dfa(), b in arb_dfa()) {
            // Two automata with at most 5 states each that agree on all words
            // shorter than 10 accept the same language.
            let same = all_words(9).iter().all(|w| a.accepts_word(w) == b.accepts_word(w));
            prop_assert_eq!(a.minimize() == b.minimize(), same);
            prop_assert_eq!(a.equivalent(&b).unwrap(), same);
        }

        #[test]
        fn product_matches_pointwise(a in arb_dfa(), b in arb_dfa()) {
            let c = a.conjunction(&b).unwrap();
            for w in all_words(6) {
                prop_assert_eq!(c.accepts_word(&w), a.accepts_word(&w) && b.accepts_word(&w));
            }
        }

        #[test]
        fn counts_match_enumeration(d in arb_dfa()) {
            let counts = d.count_by_length(6);
            for (len, &c) in counts.iter().enumerate() {
                let brute = all_words(6).iter().filter(|w| w.len() == len && d.accepts_word(w)).count();
                prop_assert_eq!(c, brute as u128);
            }
        }
    }
}
