//! Benchmark target languages.

use crate::atom::{Alphabet, Symbol};
use crate::dfa::Dfa;
use crate::error::{Error, Result};

/// Tile names of the grid-world alphabet, in symbol order.
pub const TILES: [&str; 4] = ["Bl", "Br", "R", "Y"];

pub const BLUE: Symbol = 0;
pub const BROWN: Symbol = 1;
pub const RED: Symbol = 2;
pub const YELLOW: Symbol = 3;

pub fn tile_alphabet() -> Alphabet {
    Alphabet::new(TILES).expect("valid alphabet")
}

fn table(alphabet: Alphabet, accepting: &[bool], rows: &[&[u32]]) -> Dfa {
    let delta = rows.iter().flat_map(|r| r.iter().copied()).collect();
    Dfa::new(alphabet, 0, accepting.to_vec(), delta).expect("benchmark automaton is complete")
}

/// The seven Tomita languages over `{0, 1}`.
pub fn tomita(n: usize) -> Result<Dfa> {
    let b = Alphabet::binary();
    // Rows list the successors on 0 and on 1.
    Ok(match n {
        // 1*
        1 => table(b, &[true, false], &[&[1, 0], &[1, 1]]),
        // (10)*
        2 => table(b, &[true, false, false], &[&[2, 1], &[0, 2], &[2, 2]]),
        // No odd run of 1s directly followed by an odd run of 0s.
        3 => table(
            b,
            &[true, true, false, true, false],
            &[&[0, 1], &[2, 0], &[3, 4], &[2, 1], &[4, 4]],
        ),
        // No 000.
        4 => scaled_tomita4(2)?,
        // Even number of 0s and even number of 1s.
        5 => table(b, &[true, false, false, false], &[&[1, 2], &[0, 3], &[3, 0], &[2, 1]]),
        // #0 − #1 ≡ 0 (mod 3).
        6 => table(b, &[true, false, false], &[&[1, 2], &[2, 0], &[0, 1]]),
        // 0*1*0*1*
        7 => table(
            b,
            &[true, true, true, true, false],
            &[&[0, 1], &[2, 1], &[2, 3], &[4, 3], &[4, 4]],
        ),
        _ => return Err(Error::parameter("tomita", n, "1..=7")),
    })
}

/// At most `n` consecutive 0s; `n + 2` states.
pub fn scaled_tomita4(n: usize) -> Result<Dfa> {
    if n == 0 {
        return Err(Error::parameter("n", n, "n ≥ 1"));
    }
    let sink = (n + 1) as u32;
    Ok(Dfa::from_fn(
        Alphabet::binary(),
        n + 2,
        |q| q != sink,
        |q, a| match (q, a) {
            (q, _) if q == sink => sink,
            (_, 1) => 0,
            (q, _) => q + 1,
        },
    ))
}

/// Unary words whose length is a multiple of `k`.
pub fn modulo_k(k: usize) -> Result<Dfa> {
    if k == 0 {
        return Err(Error::parameter("k", k, "k ≥ 1"));
    }
    let a = Alphabet::new(["a"]).expect("valid alphabet");
    Ok(Dfa::from_fn(a, k, |q| q == 0, |q, _| (q + 1) % k as u32))
}

/// Reach a recharge tile without touching lava, and never go from a dryer
/// tile straight to the recharge: water must come in between.
pub fn bby() -> Dfa {
    // 0: start / dry, 1: just on a dryer run, 2: recharged, 3: failed.
    table(
        tile_alphabet(),
        &[false, false, true, false],
        &[&[0, 1, 3, 2], &[0, 1, 3, 3], &[2, 2, 3, 2], &[3, 3, 3, 3]],
    )
}

/// Reach a recharge tile without ever touching lava.
pub fn ry() -> Dfa {
    table(
        tile_alphabet(),
        &[false, true, false],
        &[&[0, 0, 2, 1], &[1, 1, 2, 1], &[2, 2, 2, 2]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::Atom;

    fn bits(s: &str) -> Vec<Symbol> {
        s.bytes().map(|b| (b - b'0') as Symbol).collect()
    }

    fn accepts(d: &Dfa, s: &str) -> bool {
        d.accepts_word(&bits(s))
    }

    #[test]
    fn tomita_languages_match_their_definitions() {
        let all: Vec<String> = (0..=8usize)
            .flat_map(|len| {
                (0..1u32 << len).map(move |v| (0..len).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect())
            })
            .collect();
        let runs = |s: &str| -> Vec<(char, usize)> {
            let mut out: Vec<(char, usize)> = Vec::new();
            for c in s.chars() {
                match out.last_mut() {
                    Some((d, n)) if *d == c => *n += 1,
                    _ => out.push((c, 1)),
                }
            }
            out
        };
        let defs: [&dyn Fn(&str) -> bool; 7] = [
            &|s| !s.contains('0'),
            &|s| s.len() % 2 == 0 && s.as_bytes().chunks(2).all(|c| c == b"10"),
            &|s| {
                !runs(s)
                    .windows(2)
                    .any(|w| w[0].0 == '1' && w[0].1 % 2 == 1 && w[1].0 == '0' && w[1].1 % 2 == 1)
            },
            &|s| !s.contains("000"),
            &|s| s.matches('0').count() % 2 == 0 && s.matches('1').count() % 2 == 0,
            &|s| (s.matches('0').count() as i64 - s.matches('1').count() as i64).rem_euclid(3) == 0,
            &|s| runs(s).len() <= 4 && runs(s).first().is_none_or(|r| r.0 == '0' || runs(s).len() <= 3),
        ];
        let sizes = [2, 3, 5, 4, 4, 3, 5];
        for n in 1..=7 {
            let d = tomita(n).unwrap();
            assert_eq!(d.minimize().num_states(), sizes[n - 1], "tomita {n}");
            for s in &all {
                assert_eq!(accepts(&d, s), defs[n - 1](s), "tomita {n} on `{s}`");
            }
        }
    }

    #[test]
    fn scaled_tomita4_sizes() {
        for n in 1..6 {
            let d = scaled_tomita4(n).unwrap();
            assert_eq!(d.minimize().num_states(), n + 2);
            assert!(accepts(&d, &"0".repeat(n)));
            assert!(!accepts(&d, &"0".repeat(n + 1)));
        }
    }

    #[test]
    fn modulo_k_accepts_multiples() {
        let d = modulo_k(3).unwrap();
        assert_eq!(d.minimize().num_states(), 3);
        for len in 0..10 {
            assert_eq!(d.accepts_word(&vec![0; len]), len % 3 == 0);
        }
    }

    #[test]
    fn grid_world_examples() {
        let a = tile_alphabet();
        let w = |s: &str| Atom::word(a.parse_word(s).unwrap());
        let bby = bby();
        assert_eq!(bby.minimize().num_states(), 4);
        assert!(bby.accepts(&w("Y")).unwrap());
        assert!(!bby.accepts(&w("Br.Y")).unwrap());
        assert!(bby.accepts(&w("Br.Bl.Y")).unwrap());
        assert!(!bby.accepts(&w("R.Y")).unwrap());
        assert!(!bby.accepts(&w("Y.R")).unwrap());
        let ry = ry();
        assert!(ry.accepts(&w("Br.Y")).unwrap());
        assert!(!ry.accepts(&w("R.Y")).unwrap());
        assert!(bby.is_subset_of(&ry).unwrap());
    }
}
