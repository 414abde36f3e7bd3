//! Shared fixtures for the integration suites: the two-dimensional
//! suffix-length sequence on a*b* pairs and its surroundings.

use anskit::automata::{Dfa, Letter};
use anskit::automatic::Dfao;
use anskit::numeration::{ab_star, MultiAns};
use anskit::regular::RegularSequence;
use anskit::semiring::{Matrix, SemiringTag};
use anskit::series::LinRep;
use anskit::synchronized::{relation_alphabet, SyncRelation};
use num_bigint::BigUint;

pub fn n(x: u64) -> BigUint {
    BigUint::from(x)
}

pub fn n1(x: u64) -> Vec<BigUint> {
    vec![n(x)]
}

pub fn n2(a: u64, b: u64) -> Vec<BigUint> {
    vec![n(a), n(b)]
}

pub fn pair_system() -> MultiAns {
    let s = ab_star();
    MultiAns::new(vec![s.clone(), s]).unwrap()
}

/// The free series counting the longest common suffix of the two
/// components of a word over the pair alphabet.
pub fn suffix_series(multi: &MultiAns) -> LinRep {
    let tag = SemiringTag::Nat;
    let alphabet = multi.alphabet().clone();
    let lambda = Matrix::row_from_u64(&tag, &[0, 1]);
    let gamma = Matrix::col_from_u64(&tag, &[1, 0]);
    let diag = Matrix::from_rows(
        tag.clone(),
        vec![
            vec![tag.from_u64(1), tag.from_u64(0)],
            vec![tag.from_u64(1), tag.from_u64(1)],
        ],
    )
    .unwrap();
    let other = Matrix::from_rows(
        tag.clone(),
        vec![
            vec![tag.from_u64(0), tag.from_u64(0)],
            vec![tag.from_u64(0), tag.from_u64(1)],
        ],
    )
    .unwrap();
    let mu = alphabet
        .letters()
        .iter()
        .map(|l| {
            if l.part(0) == l.part(1) && l.part(0) != "#" {
                diag.clone()
            } else {
                other.clone()
            }
        })
        .collect();
    LinRep::new(tag, alphabet, lambda, mu, gamma).unwrap()
}

/// The suffix-length sequence as a regular sequence over ℕ.
pub fn suffix_sequence() -> RegularSequence {
    let multi = pair_system();
    let series = suffix_series(&multi);
    RegularSequence::from_series(multi, series).unwrap()
}

/// Independent oracle for the suffix sequence.
pub fn suffix_len(a: u64, b: u64) -> u64 {
    let sys = ab_star();
    let ra = sys.format_word(&sys.rep(&n(a)));
    let rb = sys.format_word(&sys.rep(&n(b)));
    ra.chars()
        .rev()
        .zip(rb.chars().rev())
        .take_while(|(x, y)| x == y)
        .count() as u64
}

/// The Thue–Morse machine over base 2.
pub fn thue_morse() -> Dfao {
    let multi = MultiAns::new(vec![anskit::numeration::integer_base(2).unwrap()]).unwrap();
    let tag = SemiringTag::Nat;
    Dfao::new(
        multi,
        tag.clone(),
        2,
        0,
        &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
        vec![tag.from_u64(0), tag.from_u64(1)],
    )
    .unwrap()
}

/// The relation pairing words over the pair alphabet whose lengths differ
/// by at most one.
pub fn length_window_relation() -> SyncRelation {
    let multi = pair_system();
    let alphabet = multi.alphabet().clone();
    let rel_alpha = relation_alphabet(&alphabet, &alphabet);
    let pad2 = Letter::uniform("$", 2);
    let mut transitions = Vec::new();
    for (id, letter) in rel_alpha.letters().iter().enumerate() {
        let left = letter.project(&[0, 1]);
        let right = letter.project(&[2, 3]);
        transitions.push((0, id, 1));
        if left != pad2 && right != pad2 {
            transitions.push((1, id, 1));
        }
    }
    let dfa = Dfa::from_parts(rel_alpha, 2, 0, &[0, 1], &transitions).unwrap();
    SyncRelation::new(alphabet.clone(), alphabet, dfa).unwrap()
}
