use std::collections::BTreeSet;

use memrep_core::dfa::{Dfa, State, SymmetryBreaking, Synthesizer};
use memrep_core::{is_consistent, Alphabet, Atom, Error, KnowledgeBase, MemLabel, PrefLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every language over {0,1} recognized by some DFA with at most `k` states,
/// by enumerating all transition tables and acceptance sets.
fn all_languages(k: usize) -> Vec<Dfa> {
    let mut out = BTreeSet::new();
    for n in 1..=k {
        let tables = n.pow(2 * n as u32);
        for t in 0..tables {
            let mut code = t;
            let delta: Vec<State> = (0..2 * n)
                .map(|_| {
                    let q = code % n;
                    code /= n;
                    q as State
                })
                .collect();
            for acc in 0..1u32 << n {
                let accepting = (0..n).map(|q| acc >> q & 1 == 1).collect();
                let d = Dfa::new(Alphabet::binary(), 0, accepting, delta.clone()).unwrap();
                out.insert(serde_json::to_string(&d.minimize()).unwrap());
            }
        }
    }
    out.into_iter().map(|s| serde_json::from_str(&s).unwrap()).collect()
}

fn random_word(rng: &mut ChaCha8Rng) -> Atom {
    let len = rng.gen_range(0..5);
    Atom::word((0..len).map(|_| rng.gen_range(0..2)).collect::<Vec<u16>>())
}

fn random_kb(rng: &mut ChaCha8Rng) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    for _ in 0..rng.gen_range(0..6) {
        let w = random_word(rng);
        kb.add_membership(w, MemLabel::from_bool(rng.gen()));
    }
    for _ in 0..rng.gen_range(0..5) {
        let (x, y) = (random_word(rng), random_word(rng));
        kb.add_preference(x, y, PrefLabel::ALL[rng.gen_range(0..4)]);
    }
    kb
}

#[test]
fn enumeration_matches_brute_force_on_small_instances() {
    let languages: Vec<Vec<Dfa>> = (0..=3).map(all_languages).collect();
    assert_eq!(languages[1].len(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alphabet = Alphabet::binary();
    for round in 0..200 {
        let kb = random_kb(&mut rng);
        let k = 1 + round % 3;
        let expected: BTreeSet<String> = languages[k]
            .iter()
            .filter(|d| is_consistent(*d, &kb))
            .map(|d| serde_json::to_string(d).unwrap())
            .collect();
        for sb in [SymmetryBreaking::Off, SymmetryBreaking::On] {
            let mut s = Synthesizer::new(alphabet.clone());
            s.options.symmetry = sb;
            s.options.max_models = usize::MAX;
            let got: BTreeSet<String> = s
                .synthesize(&kb, k, usize::MAX, round as u64)
                .unwrap()
                .iter()
                .map(|d| serde_json::to_string(d).unwrap())
                .collect();
            assert_eq!(got, expected, "round {round}, k = {k}, {sb:?}");
        }
    }
}

#[test]
fn empty_kb_with_one_state_has_two_languages() {
    let s = Synthesizer::new(Alphabet::binary());
    assert_eq!(s.count_consistent(&KnowledgeBase::new(), 1, 10).unwrap(), 2);
}

#[test]
fn every_returned_dfa_is_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = Synthesizer::new(Alphabet::binary());
    for seed in 0..30 {
        let kb = random_kb(&mut rng);
        for d in s.synthesize(&kb, 4, 10, seed).unwrap() {
            assert!(is_consistent(&d, &kb));
            assert!(d.num_states() <= 4);
        }
    }
}

#[test]
fn min_size_is_minimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = Synthesizer::new(Alphabet::binary());
    let languages: Vec<Vec<Dfa>> = (0..=3).map(all_languages).collect();
    for _ in 0..50 {
        let kb = random_kb(&mut rng);
        let brute = (1..=3).find(|&k| languages[k].iter().any(|d| is_consistent(d, &kb)));
        match (brute, s.min_size(&kb, 3, 0)) {
            (Some(k), Ok((got, d))) => {
                assert_eq!(got, k);
                assert!(is_consistent(&d, &kb));
            }
            (None, Err(Error::NoConsistentConcept(3))) => {}
            (b, r) => panic!("brute force {b:?}, synthesizer {r:?}"),
        }
    }
}

#[test]
fn conflicting_labels_form_the_core() {
    let mut kb = KnowledgeBase::new();
    kb.add_membership(Atom::word(vec![1]), MemLabel::Member);
    let a = kb.add_membership(Atom::word(vec![0]), MemLabel::Member);
    let b = kb.add_membership(Atom::word(vec![0]), MemLabel::NonMember);
    let s = Synthesizer::new(Alphabet::binary());
    assert_eq!(s.unsat_core(&kb, 5).unwrap(), BTreeSet::from([a, b]));
}

#[test]
fn satisfiable_instances_have_no_core() {
    let mut kb = KnowledgeBase::new();
    kb.add_membership(Atom::word(vec![0]), MemLabel::Member);
    let s = Synthesizer::new(Alphabet::binary());
    assert!(matches!(s.unsat_core(&kb, 1), Err(Error::Satisfiable)));
}

#[test]
fn cores_are_unsatisfiable_and_minimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let s = Synthesizer::new(Alphabet::binary());
    let mut checked = 0;
    while checked < 25 {
        let mut kb = random_kb(&mut rng);
        for _ in 0..6 {
            let w = random_word(&mut rng);
            kb.add_membership(w, MemLabel::from_bool(rng.gen()));
        }
        let Ok(core) = s.unsat_core(&kb, 2) else { continue };
        checked += 1;
        let sub = kb.restricted_to(&core);
        assert!(s.synthesize(&sub, 2, 1, 0).unwrap().is_empty());
        if core.len() <= 20 {
            for id in &core {
                let mut smaller = core.clone();
                smaller.remove(id);
                assert!(!s.synthesize(&kb.restricted_to(&smaller), 2, 1, 0).unwrap().is_empty());
            }
        }
    }
}

#[test]
fn enumeration_with_a_prior_matches_brute_force() {
    let b = Alphabet::binary();
    let priors = [
        // 0*: the symbol 1 is never accepted through.
        Dfa::new(b.clone(), 0, vec![true, false], vec![0, 1, 1, 1]).unwrap(),
        // No two consecutive 1s.
        Dfa::new(b.clone(), 0, vec![true, true, false], vec![0, 1, 0, 2, 2, 2]).unwrap(),
        // Odd number of 0s.
        Dfa::new(b.clone(), 0, vec![false, true], vec![1, 0, 0, 1]).unwrap(),
    ];
    let languages: Vec<Vec<Dfa>> = (0..=3).map(all_languages).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for round in 0..90 {
        let prior = &priors[round % 3];
        let kb = random_kb(&mut rng);
        let k = 1 + (round / 3) % 3;
        let expected: BTreeSet<String> = languages[k]
            .iter()
            .map(|d| d.conjunction(prior).unwrap().minimize())
            .filter(|d| is_consistent(d, &kb))
            .map(|d| serde_json::to_string(&d).unwrap())
            .collect();
        for sb in [SymmetryBreaking::Off, SymmetryBreaking::On] {
            let mut s = Synthesizer::new(b.clone()).with_prior(prior.clone()).unwrap();
            s.options.symmetry = sb;
            s.options.max_models = usize::MAX;
            let got: BTreeSet<String> = s
                .synthesize(&kb, k, usize::MAX, round as u64)
                .unwrap()
                .iter()
                .map(|d| serde_json::to_string(d).unwrap())
                .collect();
            assert_eq!(got, expected, "round {round}, k = {k}, {sb:?}");
        }
    }
}
