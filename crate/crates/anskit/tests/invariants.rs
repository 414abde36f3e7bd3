//! Randomized cross-checks of the module invariants against brute-force
//! oracles on finite slices.

mod common;

use std::collections::HashSet;

use anskit::automata::{Alphabet, Dfa};
use anskit::counting::count_projection;
use anskit::logic::{base_eq, base_lt, Connective, Predicate, Quantifier};
use anskit::numeration::{integer_base, MultiAns};
use anskit::semiring::{SemiringTag, SemiringValue};
use common::*;
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A random trimmed automaton over {a,b}.
fn random_dfa(rng: &mut StdRng) -> Dfa {
    let alphabet = Alphabet::from_strs(&["a", "b"]);
    loop {
        let states = rng.gen_range(1..=4usize);
        let mut transitions = Vec::new();
        for q in 0..states {
            for a in 0..2usize {
                if rng.gen_bool(0.85) {
                    transitions.push((q, a, rng.gen_range(0..states)));
                }
            }
        }
        let finals: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.5)).collect();
        let dfa = Dfa::from_parts(alphabet.clone(), states, 0, &finals, &transitions).unwrap();
        let trimmed = dfa.trim();
        if !trimmed.is_empty_language() {
            return trimmed;
        }
    }
}

/// All words over a k-letter alphabet up to the given length.
fn words_up_to(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..k {
                let mut w2 = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[test]
fn boolean_algebra_matches_set_operations() {
    let mut rng = StdRng::seed_from_u64(11);
    let slice = words_up_to(2, 6);
    for _ in 0..60 {
        let a = random_dfa(&mut rng);
        let b = random_dfa(&mut rng);
        let sa: HashSet<&Vec<usize>> = slice.iter().filter(|w| a.accepts_ids(w)).collect();
        let sb: HashSet<&Vec<usize>> = slice.iter().filter(|w| b.accepts_ids(w)).collect();
        let inter = a.intersect(&b).unwrap();
        let union = a.union(&b).unwrap();
        let diff = a.difference(&b).unwrap();
        let comp = a.complement();
        for w in &slice {
            assert_eq!(inter.accepts_ids(w), sa.contains(w) && sb.contains(w));
            assert_eq!(union.accepts_ids(w), sa.contains(w) || sb.contains(w));
            assert_eq!(diff.accepts_ids(w), sa.contains(w) && !sb.contains(w));
            assert_eq!(comp.accepts_ids(w), !sa.contains(w));
        }
    }
}

#[test]
fn quotient_and_minimize_preserve_membership() {
    let mut rng = StdRng::seed_from_u64(12);
    let slice6 = words_up_to(2, 6);
    let slice8 = words_up_to(2, 8);
    for _ in 0..60 {
        let a = random_dfa(&mut rng);
        let u: Vec<usize> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..2)).collect();
        let q = a.right_quotient(&u);
        for w in &slice6 {
            let mut wu = w.clone();
            wu.extend_from_slice(&u);
            assert_eq!(q.accepts_ids(w), a.accepts_ids(&wu));
        }
        let m = a.minimize();
        for w in &slice8 {
            assert_eq!(m.accepts_ids(w), a.accepts_ids(w));
        }
        assert_eq!(m.num_states(), m.minimize().num_states());
    }
}

#[test]
fn projection_matches_componentwise_sets() {
    // Project the two-tape numeration language onto each tape: the image
    // is the padded component language with the padding erased.
    let multi = pair_system();
    let lang = multi.language();
    for keep in [0usize, 1] {
        let erased = anskit::automata::Letter::uniform("#", 1);
        let target = Alphabet::from_strs(&["a", "b"]);
        let projected = lang
            .project_tapes(&[keep], Some(&erased), &target)
            .unwrap()
            .determinize();
        // Brute force: strip the kept component of every short language
        // word.
        let mut expected: HashSet<String> = HashSet::new();
        for w in lang.words_up_to(5) {
            let text: String = w
                .iter()
                .map(|&a| lang.alphabet().letter(a).part(keep).to_string())
                .filter(|s| s != "#")
                .collect();
            expected.insert(text);
        }
        for w in words_up_to(2, 5) {
            let text: String = w
                .iter()
                .map(|&a| target.letter(a).part(0).to_string())
                .collect();
            // Projection of the padded pairs is exactly a*b* on each
            // tape; compare within the enumerated slice.
            if w.len() <= 2 {
                assert_eq!(
                    projected.accepts_ids(&w),
                    expected.contains(&text),
                    "tape {keep} word {text:?}"
                );
            }
        }
    }
}

#[test]
fn count_words_matches_enumeration_on_random_automata() {
    let mut rng = StdRng::seed_from_u64(20);
    for _ in 0..40 {
        let dfa = random_dfa(&mut rng);
        let words = dfa.words_up_to(6);
        for l in 0..=6usize {
            let brute = words.iter().filter(|w| w.len() == l).count();
            assert_eq!(
                dfa.count_words(dfa.initial(), l),
                BigUint::from(brute),
                "length {l}"
            );
        }
    }
}

#[test]
fn representation_length_bound() {
    // For the pair system on a*b*, |rep(m,n)| ≤ √(2·max(m,n)) + 1.
    let multi = pair_system();
    for a in 0..200u64 {
        for b in [0u64, 3, 17, 150] {
            let len = multi.rep(&n2(a, b)).unwrap().len() as f64;
            let bound = (2.0 * (a.max(b) as f64)).sqrt() + 1.0;
            assert!(len <= bound + 1e-9, "({a},{b}): {len} > {bound}");
        }
    }
}

#[test]
fn de_morgan_and_double_negation_randomized() {
    let mut rng = StdRng::seed_from_u64(13);
    let block = MultiAns::new(vec![integer_base(2).unwrap()]).unwrap();
    let eq = base_eq(&block).unwrap();
    let lt = base_lt(&block).unwrap();
    for _ in 0..30 {
        // Random predicate from the generators by a few random operations.
        let mut p = if rng.gen_bool(0.5) { eq.clone() } else { lt.clone() };
        let mut q = if rng.gen_bool(0.5) { eq.clone() } else { lt.clone() };
        for _ in 0..rng.gen_range(0..2) {
            p = p.not().unwrap();
        }
        if rng.gen_bool(0.5) {
            q = q.permute_blocks(&[1, 0]).unwrap();
        }
        let lhs = p.combine(Connective::And, &q).unwrap().not().unwrap();
        let rhs = p
            .not()
            .unwrap()
            .combine(Connective::Or, &q.not().unwrap())
            .unwrap();
        assert!(lhs.dfa().lang_equal(rhs.dfa()).unwrap());
        let nn = p.not().unwrap().not().unwrap();
        assert!(nn.dfa().lang_equal(p.dfa()).unwrap());
        // Compiled predicates stay inside the padded representations.
        assert!(p
            .dfa()
            .difference(p.multi().language())
            .unwrap()
            .is_empty_language());
    }
}

#[test]
fn exists_after_add_block_is_identity() {
    let mut rng = StdRng::seed_from_u64(14);
    let block = MultiAns::new(vec![integer_base(2).unwrap()]).unwrap();
    let lt = base_lt(&block).unwrap();
    let eq = base_eq(&block).unwrap();
    for _ in 0..20 {
        let p = if rng.gen_bool(0.5) { lt.clone() } else { eq.clone() };
        let pos = rng.gen_range(0..=2usize);
        let widened = p.add_block(pos, &block).unwrap();
        let back = widened.quantify(Quantifier::Exists, pos).unwrap();
        assert!(back.dfa().lang_equal(p.dfa()).unwrap());
    }
}

#[test]
fn counting_matches_brute_force_on_finite_fibers() {
    let mut rng = StdRng::seed_from_u64(15);
    let block = MultiAns::new(vec![integer_base(2).unwrap()]).unwrap();
    let lt = base_lt(&block).unwrap();
    let eq = base_eq(&block).unwrap();
    // Predicates over (n, m) with finite fibers in m: always conjoin
    // m < n.
    let m_lt_n = lt.permute_blocks(&[1, 0]).unwrap();
    for _ in 0..20 {
        let extra = match rng.gen_range(0..3) {
            0 => eq.clone().not().unwrap(),
            1 => lt.clone(),
            _ => Predicate::full(block.concat(&block).unwrap(), vec![1, 1]).unwrap(),
        };
        let x = m_lt_n.combine(Connective::And, &extra).unwrap();
        let counting = count_projection(&x, 1).unwrap();
        for a in 0..12u64 {
            let mut want = 0u64;
            for m in 0..12u64 {
                if x.accepts(&[n1(a), n1(m)]).unwrap() {
                    want += 1;
                }
            }
            assert_eq!(
                counting.eval(&n1(a)).unwrap(),
                SemiringTag::NatInf.from_u64(want),
                "count at {a}"
            );
        }
        // Fibers are finite, so the demotion to ℕ succeeds and agrees.
        let nat = counting.demote_to_nat().unwrap();
        for a in 0..12u64 {
            assert_eq!(
                nat.eval(&n1(a)).unwrap().to_nat(),
                counting.eval(&n1(a)).unwrap().to_nat()
            );
        }
    }
}

#[test]
fn relation_composition_is_associative() {
    use anskit::synchronized::{plus_k, SyncSequence};
    let sys = integer_base(2).unwrap();
    let block = MultiAns::new(vec![sys.clone()]).unwrap();
    let r1 = plus_k(&sys, 1).unwrap().to_relation().unwrap();
    let r2 = plus_k(&sys, 2).unwrap().to_relation().unwrap();
    let ident = SyncSequence::new(base_eq(&block).unwrap())
        .unwrap()
        .to_relation()
        .unwrap();
    for (a, b, c) in [
        (&r1, &r1, &r2),
        (&r1, &r2, &r1),
        (&ident, &r1, &r2),
        (&r2, &ident, &r1),
    ] {
        let left = a.compose(b).unwrap().compose(c).unwrap();
        let right = a.compose(&b.compose(c).unwrap()).unwrap();
        assert!(left.dfa().lang_equal(right.dfa()).unwrap());
    }
}

#[test]
fn series_relation_composition_matches_path_sums() {
    // Randomized version of the composition check: random series against
    // the bounded-window relation, compared with the defining sum.
    let mut rng = StdRng::seed_from_u64(16);
    let multi = pair_system();
    let rel = length_window_relation();
    let tag = SemiringTag::Nat;
    let k = multi.alphabet().len();
    for _ in 0..8 {
        let dim = rng.gen_range(1..=2usize);
        let mut lambda = anskit::semiring::Matrix::zero(tag.clone(), 1, dim);
        let mut gamma = anskit::semiring::Matrix::zero(tag.clone(), dim, 1);
        for i in 0..dim {
            lambda.set(0, i, tag.from_u64(rng.gen_range(0..2)));
            gamma.set(i, 0, tag.from_u64(rng.gen_range(0..2)));
        }
        let mu = (0..k)
            .map(|_| {
                let mut m = anskit::semiring::Matrix::zero(tag.clone(), dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        m.set(i, j, tag.from_u64(rng.gen_range(0..2)));
                    }
                }
                m
            })
            .collect();
        let s = anskit::series::LinRep::new(
            tag.clone(),
            multi.alphabet().clone(),
            lambda,
            mu,
            gamma,
        )
        .unwrap();
        let composed = anskit::synchronized::compose_series_relation(&s, &rel).unwrap();
        let words = words_up_to(k, 2);
        for u in words.iter().filter(|w| w.len() <= 1).chain(words.iter().take(6)) {
            let mut want = tag.zero();
            for v in words_up_to(k, u.len() + 1) {
                if v.len() + 1 >= u.len() && rel.relates(u, &v) {
                    let c = s.coeff(&v).unwrap();
                    want = tag.add(&want, &c).unwrap();
                }
            }
            assert_eq!(composed.coeff(u).unwrap(), want, "word {u:?}");
        }
    }
}

#[test]
fn linrep_wfa_round_trip_random() {
    let mut rng = StdRng::seed_from_u64(17);
    let multi = pair_system();
    let tag = SemiringTag::Int;
    let k = multi.alphabet().len();
    for _ in 0..25 {
        let dim = rng.gen_range(1..=3usize);
        let mut lambda = anskit::semiring::Matrix::zero(tag.clone(), 1, dim);
        let mut gamma = anskit::semiring::Matrix::zero(tag.clone(), dim, 1);
        for i in 0..dim {
            lambda.set(0, i, tag.from_u64(rng.gen_range(0..3)));
            gamma.set(i, 0, tag.from_u64(rng.gen_range(0..3)));
        }
        let mu: Vec<_> = (0..k)
            .map(|_| {
                let mut m = anskit::semiring::Matrix::zero(tag.clone(), dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        m.set(i, j, tag.from_u64(rng.gen_range(0..2)));
                    }
                }
                m
            })
            .collect();
        let rep = anskit::series::LinRep::new(
            tag.clone(),
            multi.alphabet().clone(),
            lambda,
            mu,
            gamma,
        )
        .unwrap();
        let wfa = anskit::series::WeightedAutomaton::from_linrep(&rep);
        let back = wfa.to_linrep();
        for _ in 0..50 {
            let w: Vec<usize> = (0..rng.gen_range(0..=6))
                .map(|_| rng.gen_range(0..k))
                .collect();
            let c = rep.coeff(&w).unwrap();
            assert_eq!(wfa.weight(&w).unwrap(), c);
            assert_eq!(back.coeff(&w).unwrap(), c);
        }
    }
}

#[test]
fn val_rejects_padding_violations() {
    let multi = pair_system();
    // Inner padding, trailing padding, and off-language components are
    // all rejected by the value map.
    for text in ["a#,aa", "#a,#a", "ba,ab", "ab,b#"] {
        if let Ok(w) = multi.parse_word(text) {
            assert!(multi.val(&w).is_err(), "{text}");
        }
    }
    // An all-padding letter cannot even be parsed.
    assert!(multi.parse_word("a#,a#").and_then(|w| multi.val(&w)).is_err());
}

#[test]
fn growth_bound_randomized() {
    use num_rational::BigRational;
    use num_traits::One;
    let mut rng = StdRng::seed_from_u64(18);
    let multi = pair_system();
    let tag = SemiringTag::Int;
    let k = multi.alphabet().len();
    for _ in 0..20 {
        let dim = rng.gen_range(1..=2usize);
        let mut lambda = anskit::semiring::Matrix::zero(tag.clone(), 1, dim);
        let mut gamma = anskit::semiring::Matrix::zero(tag.clone(), dim, 1);
        for i in 0..dim {
            lambda.set(0, i, tag.from_u64(rng.gen_range(0..4)));
            gamma.set(i, 0, tag.from_u64(rng.gen_range(0..4)));
        }
        let mu: Vec<_> = (0..k)
            .map(|_| {
                let mut m = anskit::semiring::Matrix::zero(tag.clone(), dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        m.set(i, j, tag.from_u64(rng.gen_range(0..3)));
                    }
                }
                m
            })
            .collect();
        let f = anskit::regular::RegularSequence::from_series(
            multi.clone(),
            anskit::series::LinRep::new(tag.clone(), multi.alphabet().clone(), lambda, mu, gamma)
                .unwrap(),
        )
        .unwrap();
        let c = f.growth_bound().unwrap();
        for _ in 0..10 {
            let a = rng.gen_range(0..30u64);
            let b = rng.gen_range(0..30u64);
            let point = n2(a, b);
            let len = f.multi().rep(&point).unwrap().len();
            let v = f.tag().norm(&f.eval(&point).unwrap()).unwrap();
            let mut bound = BigRational::one();
            for _ in 0..len + 2 {
                bound *= &c;
            }
            assert!(v <= bound, "({a},{b})");
        }
    }
}

#[test]
fn fiber_languages_partition_on_finite_image() {
    // Fibers of a machine-generated sequence partition the numeration
    // language and agree with evaluation.
    let f = suffix_sequence().convert(&SemiringTag::Int).unwrap();
    let machine = anskit::automatic::mod_m(&f, 3).unwrap();
    let seq = machine.to_regular_sequence().unwrap();
    let tag = SemiringTag::int_mod(3);
    for r in 0..3u64 {
        let fiber = seq
            .series()
            .fiber_language(&tag.from_u64(r), 100_000)
            .unwrap()
            .intersect(f.multi().language())
            .unwrap();
        for a in 0..10u64 {
            for b in 0..10u64 {
                let w = f.multi().rep(&n2(a, b)).unwrap();
                assert_eq!(
                    fiber.accepts_ids(&w),
                    suffix_len(a, b) % 3 == r,
                    "fiber {r} at ({a},{b})"
                );
            }
        }
    }
}

#[test]
fn enum_index_round_trip_randomized() {
    let mut rng = StdRng::seed_from_u64(19);
    for sys in [integer_base(3).unwrap(), anskit::numeration::zeckendorf()] {
        let multi = MultiAns::new(vec![sys.clone(), sys]).unwrap();
        let e = anskit::numeration::EnumOrder::lexicographic(multi);
        for _ in 0..100 {
            let i = BigUint::from(rng.gen_range(0..4000u64));
            let v = e.unindex(&i).unwrap();
            assert_eq!(e.index(&v).unwrap(), i);
        }
    }
}

#[test]
fn values_are_shareable_across_threads() {
    // Systems, sequences and machines are immutable after construction;
    // the count caches behind ranking are internally synchronized.
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<anskit::numeration::Ans>();
    assert_send_sync::<anskit::numeration::MultiAns>();
    assert_send_sync::<anskit::regular::RegularSequence>();
    assert_send_sync::<anskit::automatic::Dfao>();
    assert_send_sync::<anskit::logic::Predicate>();

    let f = std::sync::Arc::new(suffix_sequence());
    let handles: Vec<_> = (0..4u64)
        .map(|t| {
            let f = f.clone();
            std::thread::spawn(move || {
                for a in 0..20u64 {
                    let got = f.eval(&n2(a, a + t)).unwrap();
                    assert_eq!(got, SemiringTag::Nat.from_u64(suffix_len(a, a + t)));
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
}
