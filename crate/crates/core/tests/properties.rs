use std::sync::Arc;

use memrep_core::consistency::{consistent_filter, AtomSet, FnConcept};
use memrep_core::dfa::{Dfa, Synthesizer};
use memrep_core::oracles::{
    tomita_order, with_noise, DfaEquivalence, PreferenceOrder, RandomMemRepOrder, RandomOrderParams, SimulatedTeacher,
    Teacher,
};
use memrep_core::strategy::{softmax, softmax_floor, ArmKind, CostModel};
use memrep_core::targets::tomita;
use memrep_core::{is_consistent, memrep_holds, Alphabet, Atom, Concept, Fact, KnowledgeBase, MemLabel, PrefLabel};
use proptest::prelude::*;

fn words() -> Vec<Atom> {
    ["", "0", "1", "00", "01", "10", "11"]
        .iter()
        .map(|s| Atom::word(s.bytes().map(|b| u16::from(b - b'0')).collect::<Vec<_>>()))
        .collect()
}

fn powerset() -> Vec<AtomSet> {
    let w = words();
    (0..1u32 << w.len())
        .map(|mask| {
            (0..w.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| w[i].clone())
                .collect()
        })
        .collect()
}

fn pref_label() -> impl Strategy<Value = PrefLabel> {
    prop_oneof![
        Just(PrefLabel::Less),
        Just(PrefLabel::Greater),
        Just(PrefLabel::Equiv),
        Just(PrefLabel::Incomparable)
    ]
}

#[derive(Clone, Debug)]
enum RawFact {
    Mem(usize, bool),
    Pref(usize, usize, PrefLabel),
}

fn raw_fact() -> impl Strategy<Value = RawFact> {
    prop_oneof![
        (0..7usize, any::<bool>()).prop_map(|(a, m)| RawFact::Mem(a, m)),
        (0..7usize, 0..7usize, pref_label()).prop_map(|(a, b, l)| RawFact::Pref(a, b, l)),
    ]
}

fn build(facts: &[RawFact]) -> KnowledgeBase {
    let w = words();
    let mut kb = KnowledgeBase::new();
    for f in facts {
        match f {
            RawFact::Mem(a, m) => {
                kb.add_membership(w[*a].clone(), MemLabel::from_bool(*m));
            }
            RawFact::Pref(a, b, l) => {
                kb.add_preference(w[*a].clone(), w[*b].clone(), *l);
            }
        }
    }
    kb
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn more_facts_never_revive_a_concept(facts in prop::collection::vec(raw_fact(), 0..8), extra in prop::collection::vec(raw_fact(), 1..4)) {
        let class = powerset();
        let small = build(&facts);
        let mut all = facts.clone();
        all.extend(extra);
        let big = build(&all);
        let before = consistent_filter(&class, &small);
        for c in consistent_filter(&class, &big) {
            prop_assert!(before.contains(&c));
        }
    }

    #[test]
    fn top_and_bottom_fit_any_preferences(prefs in prop::collection::vec((0..7usize, 0..7usize, pref_label()), 0..12)) {
        let raw: Vec<RawFact> = prefs.into_iter().map(|(a, b, l)| RawFact::Pref(a, b, l)).collect();
        let kb = build(&raw);
        prop_assert!(is_consistent(&FnConcept(|_: &Atom| true), &kb));
        prop_assert!(is_consistent(&FnConcept(|_: &Atom| false), &kb));
    }

    #[test]
    fn equivalence_entails_equal_membership(mask in 0u32..128, a in 0..7usize, b in 0..7usize) {
        let w = words();
        let c: AtomSet = (0..7).filter(|i| mask >> i & 1 == 1).map(|i| w[i].clone()).collect();
        if memrep_holds(&c, [(&w[a], &w[b], PrefLabel::Equiv)]) {
            prop_assert_eq!(c.contains(&w[a]), c.contains(&w[b]));
        }
    }

    #[test]
    fn synthesized_dfas_respect_strict_preferences(facts in prop::collection::vec(raw_fact(), 0..6), k in 1usize..4) {
        let kb = build(&facts);
        let synth = Synthesizer::new(Alphabet::binary());
        if let Ok(dfas) = synth.synthesize(&kb, k, 8, 0) {
            for d in &dfas {
                prop_assert!(is_consistent(d, &kb));
                for e in kb.active() {
                    if let Fact::Pref { lhs, rhs, label: PrefLabel::Less } = &e.fact {
                        prop_assert!(d.contains(lhs) <= d.contains(rhs));
                    }
                }
            }
        }
    }

    #[test]
    fn noisy_answers_repeat(seed in any::<u64>(), rate in 0.0f64..1.0, picks in prop::collection::vec((0..7usize, 0..7usize), 1..20)) {
        let target = tomita(3).unwrap();
        let inner = SimulatedTeacher::new(Arc::new(target.clone()), tomita_order(&target), DfaEquivalence::new(target.clone(), 4, seed));
        let mut t = with_noise(inner, rate, seed);
        let w = words();
        for &(a, b) in &picks {
            let m = Teacher::<Dfa>::membership(&mut t, &w[a]);
            prop_assert_eq!(Teacher::<Dfa>::membership(&mut t, &w[a]), m);
            let p = Teacher::<Dfa>::compare(&mut t, &w[a], &w[b]);
            prop_assert_eq!(Teacher::<Dfa>::compare(&mut t, &w[a], &w[b]), p);
            if a != b {
                prop_assert_eq!(Teacher::<Dfa>::compare(&mut t, &w[b], &w[a]), p.reversed());
            }
        }
    }

    #[test]
    fn random_orders_are_sound_and_transitive(seed in any::<u64>(), n in 1usize..8) {
        let target = tomita(n).unwrap();
        let mut order = RandomMemRepOrder::new(Arc::new(target.clone()), RandomOrderParams::default(), seed).unwrap();
        let w = words();
        let mut table = vec![vec![PrefLabel::Equiv; w.len()]; w.len()];
        for i in 0..w.len() {
            for j in 0..w.len() {
                table[i][j] = order.compare(&w[i], &w[j]);
                prop_assert!(memrep_holds(&target, [(&w[i], &w[j], table[i][j])]));
            }
        }
        // x ⪯ y and y ⪯ z give x ⪯ z, strictly if either step is strict.
        let weak = |l: PrefLabel| matches!(l, PrefLabel::Less | PrefLabel::Equiv);
        for i in 0..w.len() {
            for j in 0..w.len() {
                for k in 0..w.len() {
                    let (a, b) = (table[i][j], table[j][k]);
                    if weak(a) && weak(b) {
                        let c = table[i][k];
                        prop_assert!(weak(c));
                        if a == PrefLabel::Less || b == PrefLabel::Less {
                            prop_assert_eq!(c, PrefLabel::Less);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn losses_stay_in_the_unit_interval(a in 0.01f64..100.0, b in 0.01f64..100.0, before in 0usize..50, after in 0usize..50) {
        let cost = CostModel::new(a, b).unwrap();
        for kind in ArmKind::BOTH {
            let l = cost.loss(kind, before, after.min(before));
            prop_assert!((0.0..=1.0).contains(&l));
        }
    }

    #[test]
    fn advice_is_a_full_support_distribution(w0 in 0.0f64..1.0, w1 in 0.0f64..1.0, temp in 0.01f64..5.0) {
        let p = softmax(&[w0, w1], [true, true], temp);
        prop_assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
        let floor = softmax_floor(2, temp);
        prop_assert!(floor > 0.0);
        prop_assert!(p[0] >= floor * (1.0 - 1e-12) && p[1] >= floor * (1.0 - 1e-12));
    }
}

#[test]
fn noise_rate_is_close_to_nominal() {
    let target = tomita(1).unwrap();
    let inner = SimulatedTeacher::new(
        Arc::new(target.clone()),
        tomita_order(&target),
        DfaEquivalence::new(target.clone(), 4, 0),
    );
    let mut t = with_noise(inner, 0.1, 42);
    let flipped = (0..500u32)
        .map(|i| Atom::word((0..12).map(|b| ((i >> b) & 1) as u16).collect::<Vec<_>>()))
        .filter(|a| Teacher::<Dfa>::membership(&mut t, a).is_member() != target.contains(a))
        .count();
    let frac = flipped as f64 / 500.0;
    assert!((0.05..=0.15).contains(&frac), "flipped fraction {frac}");
}

#[test]
fn noise_extremes() {
    let target = tomita(2).unwrap();
    let make = |rate| {
        let inner = SimulatedTeacher::new(
            Arc::new(target.clone()),
            tomita_order(&target),
            DfaEquivalence::new(target.clone(), 4, 0),
        );
        with_noise(inner, rate, 3)
    };
    let (mut clean, mut always) = (make(0.0), make(1.0));
    for a in words() {
        assert_eq!(
            Teacher::<Dfa>::membership(&mut clean, &a).is_member(),
            target.contains(&a)
        );
        assert_ne!(
            Teacher::<Dfa>::membership(&mut always, &a).is_member(),
            target.contains(&a)
        );
    }
}

#[test]
fn min_size_is_monotone_in_k() {
    // Alternating labels on 0^n need n+1 states or a cycle; below the
    // minimum every size is unsatisfiable.
    let synth = Synthesizer::new(Alphabet::binary());
    let mut kb = KnowledgeBase::new();
    for n in 0..6 {
        let label = MemLabel::from_bool(n % 3 == 0);
        kb.add_membership(Atom::word(vec![0; n]), label);
    }
    let (k, _) = synth.min_size(&kb, 8, 0).unwrap();
    assert_eq!(k, 3);
    for smaller in 1..k {
        assert!(synth.synthesize(&kb, smaller, 1, 0).unwrap().is_empty());
    }
}
