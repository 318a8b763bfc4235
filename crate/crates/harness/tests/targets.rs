use memrep_core::dfa::Dfa;
use memrep_core::Symbol;
use memrep_harness::{build_target, Benchmark, Target, TeacherKind, TeacherSpec};

fn dfa(name: &str) -> Dfa {
    match build_target(name).unwrap() {
        Target::Dfa { dfa, .. } => dfa,
        other => panic!("{name} is not an automaton: {other:?}"),
    }
}

/// Every word over `k` symbols of length at most `max_len`.
fn words(k: u16, max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<Symbol>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..k).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn text(w: &[Symbol]) -> String {
    w.iter().map(|&a| if a == 0 { '0' } else { '1' }).collect()
}

fn runs(s: &str) -> Vec<(char, usize)> {
    let mut out: Vec<(char, usize)> = Vec::new();
    for c in s.chars() {
        match out.last_mut() {
            Some((d, n)) if *d == c => *n += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

fn agrees(name: &str, k: u16, max_len: usize, pred: impl Fn(&[Symbol]) -> bool) {
    let d = dfa(name);
    for w in words(k, max_len) {
        assert_eq!(d.accepts_word(&w), pred(&w), "{name} on {w:?}");
    }
}

#[test]
fn tomita_targets_match_their_predicates() {
    type Pred<'a> = (&'a str, &'a dyn Fn(&str) -> bool);
    let preds: [Pred; 7] = [
        ("tomita_1", &|s| !s.contains('0')),
        ("tomita_2", &|s| {
            s.len() % 2 == 0 && s.as_bytes().chunks(2).all(|c| c == b"10")
        }),
        ("tomita_3", &|s| {
            !runs(s)
                .windows(2)
                .any(|w| w[0].0 == '1' && w[0].1 % 2 == 1 && w[1].0 == '0' && w[1].1 % 2 == 1)
        }),
        ("tomita_4", &|s| !s.contains("000")),
        ("tomita_5", &|s| {
            s.matches('0').count() % 2 == 0 && s.matches('1').count() % 2 == 0
        }),
        ("tomita_6", &|s| {
            (s.matches('0').count() as i64 - s.matches('1').count() as i64).rem_euclid(3) == 0
        }),
        // 0*1*0*1*: at most four runs, and four only when starting with 0.
        ("tomita_7", &|s| {
            runs(s).len() < 4 || (runs(s).len() == 4 && s.starts_with('0'))
        }),
    ];
    for (name, pred) in preds {
        agrees(name, 2, 8, |w| pred(&text(w)));
    }
}

#[test]
fn scalability_targets_match_their_predicates() {
    for k in [1, 2, 5, 10] {
        let name = format!("modulo_k({k})");
        agrees(&name, 1, 40, |w| w.len() % k == 0);
        let d = dfa(&name);
        assert_eq!(d.minimize().num_states(), k);
        assert!(d.accepts_word(&[]));
    }
    for n in 1..=4 {
        let name = format!("scaled_tomita4({n})");
        agrees(&name, 2, 8, |w| !text(w).contains(&"0".repeat(n + 1)));
        assert_eq!(dfa(&name).minimize().num_states(), n + 2);
    }
    assert_eq!(dfa("tomita_1").minimize().num_states(), 2);
}

const RED: Symbol = 2;
const BROWN: Symbol = 1;
const YELLOW: Symbol = 3;

#[test]
fn tile_targets_match_their_predicates() {
    agrees("rymask", 4, 7, |w| !w.contains(&RED) && w.contains(&YELLOW));
    agrees("bby", 4, 7, |w| {
        let first = w.iter().position(|&a| a == YELLOW);
        !w.contains(&RED) && first.is_some_and(|i| i == 0 || w[i - 1] != BROWN)
    });
    match build_target("bby").unwrap() {
        Target::Dfa { prior, .. } => assert_eq!(prior, Some(dfa("rymask"))),
        _ => unreachable!(),
    }
}

#[test]
fn names_resolve_in_both_spellings() {
    assert_eq!(dfa("tomita_4"), dfa("tomita(4)"));
    assert_eq!(dfa("tomita_4"), dfa("scaled_tomita4(2)"));
    assert_eq!(dfa("modulo_k(5)"), dfa("modulo_5"));
    assert_eq!(dfa("scaled_tomita4_3"), dfa("scaled_tomita4(3)"));
    for bad in [
        "tomita_8",
        "tomita",
        "nope",
        "grid(0,5)",
        "grid(1,1)",
        "modulo_k(0)",
        "grid(1,2",
        "bby(1)",
    ] {
        assert!(build_target(bad).is_err(), "{bad}");
    }
}

#[test]
fn grid_targets_draw_a_point_per_seed() {
    let Target::Grid { grid, pinned } = build_target("grid(2,5)").unwrap() else {
        panic!()
    };
    assert_eq!(pinned, None);
    let drawn: std::collections::BTreeSet<String> = (0..50)
        .map(|s| format!("{:?}", Target::grid_concept(&grid, s)))
        .collect();
    assert!(drawn.len() > 5);
    assert_eq!(Target::grid_concept(&grid, 7), Target::grid_concept(&grid, 7));
    let Target::Grid { pinned, .. } = build_target("grid(2,5,9)").unwrap() else {
        panic!()
    };
    assert_eq!(pinned, Some(9));
}

#[test]
fn default_teachers_fit_their_targets() {
    assert_eq!(TeacherSpec::default_for("tomita_5").kind, TeacherKind::TomitaSemantic);
    assert_eq!(TeacherSpec::default_for("bby").kind, TeacherKind::RandomMemrep);
    assert_eq!(TeacherSpec::default_for("grid(1,17)").kind, TeacherKind::CostThreshold);
    for name in [
        "tomita_5",
        "bby",
        "rymask",
        "modulo_k(5)",
        "scaled_tomita4(3)",
        "grid(1,17)",
    ] {
        Benchmark::named(name).unwrap().validate().unwrap();
    }
    let mut b = Benchmark::named("grid(1,17)").unwrap();
    assert_eq!(b.trials, 100);
    b.teacher = Some(TeacherSpec::new(TeacherKind::TomitaSemantic));
    assert!(b.validate().is_err());
    b.teacher = Some(TeacherSpec::new(TeacherKind::Human));
    assert!(b.validate().is_err());
    let mut b = Benchmark::named("tomita_5").unwrap();
    assert_eq!(b.trials, 20);
    b.trials = 0;
    assert!(b.validate().is_err());
}
