//! First-order predicates over recognizable sets of vectors.
//!
//! A predicate on m blocks of integers is stored as the automaton of the
//! jointly padded representations of its satisfying tuples. Boolean
//! connectives act through the automaton algebra; quantifiers erase a
//! block's tapes and re-normalize the padding; negation complements and
//! intersects back with the numeration language.

pub mod formula;

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::automata::{Dfa, Letter, PAD};
use crate::automatic::Dfao;
use crate::error::{Error, Result};
use crate::numeration::{EnumOrder, MultiAns, OrderRel};

/// A recognizable predicate: an automaton over the tapes of `multi`,
/// organized into variable blocks of the given tape widths.
#[derive(Debug, Clone)]
pub struct Predicate {
    multi: MultiAns,
    block_dims: Vec<usize>,
    dfa: Dfa,
}

/// Boolean connectives accepted by [`Predicate::combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
}

/// Quantifiers accepted by [`Predicate::quantify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Decision modes for closed predicates of arity 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionMode {
    Exists,
    Forall,
    ExistsInfinitelyMany,
}

impl Predicate {
    /// Wraps an automaton, enforcing the invariant that the language is a
    /// subset of the padded representations.
    pub fn from_dfa(multi: MultiAns, block_dims: Vec<usize>, dfa: Dfa) -> Result<Predicate> {
        if block_dims.is_empty() || block_dims.iter().sum::<usize>() != multi.dim() {
            return Err(Error::BlockMismatch(
                "block widths must partition the tapes".into(),
            ));
        }
        if !dfa.alphabet().same_as(multi.alphabet()) {
            return Err(Error::AlphabetMismatch(
                "predicate automaton must use the product alphabet".into(),
            ));
        }
        let dfa = dfa.intersect(multi.language())?.minimize();
        Ok(Predicate {
            multi,
            block_dims,
            dfa,
        })
    }

    /// The predicate satisfied by every tuple.
    pub fn full(multi: MultiAns, block_dims: Vec<usize>) -> Result<Predicate> {
        let dfa = multi.language().clone();
        Predicate::from_dfa(multi, block_dims, dfa)
    }

    /// The predicate satisfied by no tuple.
    pub fn empty(multi: MultiAns, block_dims: Vec<usize>) -> Result<Predicate> {
        let dfa = Dfa::empty(multi.alphabet().clone());
        Predicate::from_dfa(multi, block_dims, dfa)
    }

    /// Arity-1 predicate holding exactly at the given vector.
    pub fn singleton(block: &MultiAns, value: &[BigUint]) -> Result<Predicate> {
        let w = block.rep(value)?;
        let dfa = Dfa::single_word(block.alphabet().clone(), &w);
        Predicate::from_dfa(block.clone(), vec![block.dim()], dfa)
    }

    pub fn multi(&self) -> &MultiAns {
        &self.multi
    }
    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }
    pub fn arity(&self) -> usize {
        self.block_dims.len()
    }
    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// The tape range occupied by a block.
    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        let start: usize = self.block_dims[..block].iter().sum();
        start..start + self.block_dims[block]
    }

    /// The sub-system of one block.
    pub fn block_system(&self, block: usize) -> Result<MultiAns> {
        let range = self.block_range(block);
        MultiAns::new(self.multi.systems()[range].to_vec())
    }

    /// Membership of an assignment, one integer vector per block.
    pub fn accepts(&self, assignment: &[Vec<BigUint>]) -> Result<bool> {
        if assignment.len() != self.arity() {
            return Err(Error::BlockMismatch(format!(
                "expected {} blocks, got {}",
                self.arity(),
                assignment.len()
            )));
        }
        let mut flat = Vec::with_capacity(self.multi.dim());
        for (block, value) in assignment.iter().enumerate() {
            if value.len() != self.block_dims[block] {
                return Err(Error::BlockMismatch(format!(
                    "block {block} expects {} components",
                    self.block_dims[block]
                )));
            }
            flat.extend(value.iter().cloned());
        }
        let w = self.multi.rep(&flat)?;
        Ok(self.dfa.accepts_ids(&w))
    }

    fn check_shape(&self, other: &Predicate) -> Result<()> {
        if self.block_dims != other.block_dims
            || !self.multi.alphabet().same_as(other.multi.alphabet())
        {
            return Err(Error::BlockMismatch(
                "predicates have different blocks or systems".into(),
            ));
        }
        Ok(())
    }

    /// Logical negation: complement within the padded representations.
    pub fn not(&self) -> Result<Predicate> {
        let dfa = self.dfa.complement().intersect(self.multi.language())?;
        Ok(Predicate {
            multi: self.multi.clone(),
            block_dims: self.block_dims.clone(),
            dfa: dfa.minimize(),
        })
    }

    pub fn combine(&self, op: Connective, other: &Predicate) -> Result<Predicate> {
        self.check_shape(other)?;
        let dfa = match op {
            Connective::And => self.dfa.intersect(&other.dfa)?,
            Connective::Or => self.dfa.union(&other.dfa)?,
            Connective::Implies => self.not()?.dfa.union(&other.dfa)?,
            Connective::Iff => {
                let both = self.dfa.intersect(&other.dfa)?;
                let neither = self.not()?.dfa.intersect(&other.not()?.dfa)?;
                both.union(&neither)?
            }
        };
        Ok(Predicate {
            multi: self.multi.clone(),
            block_dims: self.block_dims.clone(),
            dfa: dfa.minimize(),
        })
    }

    /// Inserts an unconstrained block at the given block position. The
    /// automaton gains a padding loop on a fresh initial state so that
    /// longer new-block representations align, then is re-normalized
    /// against the extended numeration language.
    pub fn add_block(&self, position: usize, block: &MultiAns) -> Result<Predicate> {
        if position > self.arity() {
            return Err(Error::BlockMismatch(format!(
                "block position {position} out of range"
            )));
        }
        let tape_pos: usize = self.block_dims[..position].iter().sum();
        let mut systems = self.multi.systems().to_vec();
        for (offset, sys) in block.systems().iter().enumerate() {
            systems.insert(tape_pos + offset, sys.clone());
        }
        let new_multi = MultiAns::new(systems)?;
        let new_alphabet = new_multi.alphabet().clone();

        // Every combination of new-block symbols, including the padding.
        let mut combos: Vec<Vec<String>> = vec![Vec::new()];
        for sys in block.systems() {
            let mut next = Vec::new();
            for prefix in &combos {
                let mut with = |s: &str| {
                    let mut p = prefix.clone();
                    p.push(s.to_string());
                    next.push(p);
                };
                with(PAD);
                for sym in sys.symbols() {
                    with(&sym);
                }
            }
            combos = next;
        }
        let splice = |old: &Letter, insert: &[String]| -> Letter {
            let mut parts: Vec<String> = old.parts().to_vec();
            for (offset, s) in insert.iter().enumerate() {
                parts.insert(tape_pos + offset, s.clone());
            }
            Letter::new(parts)
        };

        let n = self.dfa.num_states();
        let fresh = n; // new initial carrying the padding loop
        let mut nfa = crate::automata::Nfa::new(new_alphabet.clone(), n + 1);
        nfa.add_initial(fresh);
        if self.dfa.is_final(self.dfa.initial()) {
            nfa.add_final(fresh);
        }
        for q in 0..n {
            if self.dfa.is_final(q) {
                nfa.add_final(q);
            }
        }
        let old_pad = Letter::uniform(PAD, self.multi.dim());
        for combo in &combos {
            let l = splice(&old_pad, combo);
            if let Some(id) = new_alphabet.id_of(&l) {
                nfa.add_transition(fresh, id, fresh);
            }
        }
        for (p, a, q) in self.dfa.transitions() {
            let old_letter = self.dfa.alphabet().letter(a).clone();
            for combo in &combos {
                let l = splice(&old_letter, combo);
                let id = new_alphabet.require_id(&l)?;
                nfa.add_transition(p, id, q);
                if p == self.dfa.initial() {
                    nfa.add_transition(fresh, id, q);
                }
            }
        }
        let dfa = nfa.determinize();
        let mut block_dims = self.block_dims.clone();
        block_dims.insert(position, block.dim());
        Predicate::from_dfa(new_multi, block_dims, dfa)
    }

    /// Reorders the blocks: the new block i is the old block `perm[i]`.
    pub fn permute_blocks(&self, perm: &[usize]) -> Result<Predicate> {
        if perm.len() != self.arity() {
            return Err(Error::BlockMismatch("permutation arity mismatch".into()));
        }
        let mut tape_perm = Vec::with_capacity(self.multi.dim());
        let mut systems = Vec::with_capacity(self.multi.dim());
        let mut block_dims = Vec::with_capacity(perm.len());
        for &old_block in perm {
            let range = self.block_range(old_block);
            block_dims.push(self.block_dims[old_block]);
            for t in range {
                tape_perm.push(t);
                systems.push(self.multi.systems()[t].clone());
            }
        }
        let new_multi = MultiAns::new(systems)?;
        let dfa = self.dfa.permute_tapes(&tape_perm, new_multi.alphabet())?;
        Predicate::from_dfa(new_multi, block_dims, dfa)
    }

    /// Quantifies one block away. Existential quantification projects the
    /// block's tapes out (rows where the remaining tapes are all padding
    /// become ε-moves), re-determinizes and re-normalizes; the universal
    /// quantifier is its dual.
    pub fn quantify(&self, q: Quantifier, block: usize) -> Result<Predicate> {
        if self.arity() < 2 {
            return Err(Error::BlockMismatch(
                "quantification needs at least two blocks".into(),
            ));
        }
        if block >= self.arity() {
            return Err(Error::BlockMismatch(format!("block {block} out of range")));
        }
        match q {
            Quantifier::Exists => {
                let range = self.block_range(block);
                let keep: Vec<usize> = (0..self.multi.dim())
                    .filter(|t| !range.contains(t))
                    .collect();
                let drop: Vec<usize> = range.collect();
                let new_multi = self.multi.without_tapes(&drop)?;
                let erase = Letter::uniform(PAD, keep.len());
                let nfa = self
                    .dfa
                    .project_tapes(&keep, Some(&erase), new_multi.alphabet())?;
                let dfa = nfa.determinize();
                let mut block_dims = self.block_dims.clone();
                block_dims.remove(block);
                Predicate::from_dfa(new_multi, block_dims, dfa)
            }
            Quantifier::Forall => self.not()?.quantify(Quantifier::Exists, block)?.not(),
        }
    }

    /// Decides a closed quantification of an arity-1 predicate.
    pub fn decide(&self, mode: DecisionMode) -> Result<bool> {
        if self.arity() != 1 {
            return Err(Error::BlockMismatch(
                "decision needs an arity-1 predicate".into(),
            ));
        }
        Ok(match mode {
            DecisionMode::Exists => !self.dfa.is_empty_language(),
            DecisionMode::Forall => self.dfa.lang_equal(self.multi.language())?,
            DecisionMode::ExistsInfinitelyMany => self.dfa.is_infinite(),
        })
    }
}

/// Equality of two blocks: the diagonal automaton intersected with the
/// pair language.
pub fn base_eq(block: &MultiAns) -> Result<Predicate> {
    let pair = block.concat(block)?;
    let diag = block
        .language()
        .map_letters(pair.alphabet(), |l| l.concat(l))?;
    Predicate::from_dfa(pair, vec![block.dim(), block.dim()], diag)
}

/// Componentwise strict order of two blocks: on every tape, the first
/// block's component is smaller in radix order.
pub fn base_lt(block: &MultiAns) -> Result<Predicate> {
    let d = block.dim();
    let pair = block.concat(block)?;
    let alphabet = pair.alphabet().clone();
    // Per tape, map a symbol to its order key with # least.
    let key = |tape: usize, sym: &str| -> usize {
        if sym == PAD {
            0
        } else {
            1 + block.systems()[tape]
                .alphabet()
                .id_of(&Letter::scalar(sym))
                .expect("symbol belongs to the tape alphabet")
        }
    };
    // States: one comparison cell per tape (0 =, 1 >, 2 <).
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let start = vec![0u8; d];
    let mut order = vec![start.clone()];
    index.insert(start, 0);
    let mut transitions = Vec::new();
    let mut finals = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let cur = order[i].clone();
        if cur.iter().all(|&c| c == 2) {
            finals.push(i);
        }
        for (a, letter) in alphabet.letters().iter().enumerate() {
            let mut next = cur.clone();
            for (t, cell) in next.iter_mut().enumerate() {
                if *cell != 0 {
                    continue;
                }
                let kl = key(t, letter.part(t));
                let kr = key(t, letter.part(d + t));
                *cell = match kl.cmp(&kr) {
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => 1,
                    std::cmp::Ordering::Less => 2,
                };
            }
            let len = index.len();
            let id = *index.entry(next.clone()).or_insert_with(|| {
                order.push(next);
                len
            });
            transitions.push((i, a, id));
        }
        i += 1;
    }
    let dfa = Dfa::from_parts(alphabet, order.len(), 0, &finals, &transitions)?;
    Predicate::from_dfa(pair, vec![d, d], dfa)
}

/// The base-b addition predicate x + y = z on three scalar blocks. The
/// running digit discrepancy of the prefix values is kept in {-1, 0};
/// padding reads as digit 0 and canonicity comes from the intersection
/// with the representation language.
pub fn adder(b: u32) -> Result<Predicate> {
    let sys = crate::numeration::integer_base(b)?;
    let block = MultiAns::new(vec![sys])?;
    let triple = block.concat(&block)?.concat(&block)?;
    let alphabet = triple.alphabet().clone();
    let digit = |sym: &str| -> i64 {
        if sym == PAD {
            0
        } else {
            sym.parse().expect("digits are decimal")
        }
    };
    let state_of = |d: i64| -> Option<usize> {
        match d {
            0 => Some(0),
            -1 => Some(1),
            _ => None,
        }
    };
    let mut transitions = Vec::new();
    for (a, letter) in alphabet.letters().iter().enumerate() {
        let x = digit(letter.part(0));
        let y = digit(letter.part(1));
        let z = digit(letter.part(2));
        for (from, d) in [(0usize, 0i64), (1, -1)] {
            let next = (b as i64) * d + x + y - z;
            if let Some(to) = state_of(next) {
                transitions.push((from, a, to));
            }
        }
    }
    let dfa = Dfa::from_parts(alphabet, 2, 0, &[0], &transitions)?;
    Predicate::from_dfa(triple, vec![1, 1, 1], dfa)
}

/// The predicate f(x) = f(y) of an automatic sequence: a disjunction over
/// output values of both arguments lying in the same fiber.
pub fn seq_equality(machine: &Dfao) -> Result<Predicate> {
    let block = machine.multi().clone();
    let fibers = machine.fibers()?;
    let mut acc: Option<Predicate> = None;
    for dfa in fibers.values() {
        let fiber_pred = Predicate::from_dfa(block.clone(), vec![block.dim()], dfa.clone())?;
        let left = fiber_pred.add_block(1, &block)?;
        let right = fiber_pred.add_block(0, &block)?;
        let both = left.combine(Connective::And, &right)?;
        acc = Some(match acc {
            None => both,
            Some(p) => p.combine(Connective::Or, &both)?,
        });
    }
    match acc {
        Some(p) => Ok(p),
        None => Predicate::empty(block.concat(&block)?, vec![block.dim(), block.dim()]),
    }
}

/// The enumeration-order comparison of two blocks as a predicate.
pub fn enum_order_predicate(e: &EnumOrder, rel: OrderRel) -> Result<Predicate> {
    let block = e.multi().clone();
    let pair = block.concat(&block)?;
    let dfa = e.order_predicate(rel)?;
    Predicate::from_dfa(pair, vec![block.dim(), block.dim()], dfa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeration::{ab_star, integer_base};

    fn n1(x: u64) -> Vec<BigUint> {
        vec![BigUint::from(x)]
    }

    fn base2_block() -> MultiAns {
        MultiAns::new(vec![integer_base(2).unwrap()]).unwrap()
    }

    #[test]
    fn eq_and_lt_against_numbers() {
        let block = base2_block();
        let eq = base_eq(&block).unwrap();
        let lt = base_lt(&block).unwrap();
        for a in 0..25u64 {
            for b in 0..25u64 {
                assert_eq!(eq.accepts(&[n1(a), n1(b)]).unwrap(), a == b, "{a}={b}");
                assert_eq!(lt.accepts(&[n1(a), n1(b)]).unwrap(), a < b, "{a}<{b}");
            }
        }
    }

    #[test]
    fn lt_componentwise_in_two_dims() {
        let s = ab_star();
        let block = MultiAns::new(vec![s.clone(), s]).unwrap();
        let lt = base_lt(&block).unwrap();
        for a1 in 0..6u64 {
            for a2 in 0..6u64 {
                for b1 in 0..6u64 {
                    for b2 in 0..6u64 {
                        let want = a1 < b1 && a2 < b2;
                        let got = lt
                            .accepts(&[
                                vec![BigUint::from(a1), BigUint::from(a2)],
                                vec![BigUint::from(b1), BigUint::from(b2)],
                            ])
                            .unwrap();
                        assert_eq!(got, want, "({a1},{a2}) < ({b1},{b2})");
                    }
                }
            }
        }
    }

    #[test]
    fn boolean_connectives() {
        let block = base2_block();
        let eq = base_eq(&block).unwrap();
        let lt = base_lt(&block).unwrap();
        // eq ∧ lt is empty (irreflexivity).
        let both = eq.combine(Connective::And, &lt).unwrap();
        assert!(both.dfa().is_empty_language());
        // ¬¬p ≡ p.
        let nn = lt.not().unwrap().not().unwrap();
        assert!(nn.dfa().lang_equal(lt.dfa()).unwrap());
        // p → p is full.
        let tauto = lt.combine(Connective::Implies, &lt).unwrap();
        assert!(tauto.dfa().lang_equal(tauto.multi().language()).unwrap());
        // De Morgan.
        let lhs = eq.combine(Connective::And, &lt).unwrap().not().unwrap();
        let rhs = eq
            .not()
            .unwrap()
            .combine(Connective::Or, &lt.not().unwrap())
            .unwrap();
        assert!(lhs.dfa().lang_equal(rhs.dfa()).unwrap());
    }

    #[test]
    fn add_block_then_project_is_identity() {
        let block = base2_block();
        let lt = base_lt(&block).unwrap();
        for pos in 0..=2usize {
            let widened = lt.add_block(pos, &block).unwrap();
            assert_eq!(widened.arity(), 3);
            for (a, b, c) in [(1u64, 5u64, 9u64), (4, 3, 0), (7, 7, 2)] {
                let mut asst = vec![n1(a), n1(b)];
                asst.insert(pos, n1(c));
                assert_eq!(
                    widened.accepts(&asst).unwrap(),
                    a < b,
                    "pos={pos} ({a},{b},{c})"
                );
            }
            let back = widened.quantify(Quantifier::Exists, pos).unwrap();
            assert!(back.dfa().lang_equal(lt.dfa()).unwrap(), "pos={pos}");
        }
    }

    #[test]
    fn quantifiers_over_base2() {
        let block = base2_block();
        let lt = base_lt(&block).unwrap();
        // ∃y (x < y) holds for every x.
        let some_bigger = lt.quantify(Quantifier::Exists, 1).unwrap();
        assert!(some_bigger.decide(DecisionMode::Forall).unwrap());
        // ∃y (y < x) fails exactly at x = 0.
        let some_smaller = lt.quantify(Quantifier::Exists, 0).unwrap();
        assert!(!some_smaller.decide(DecisionMode::Forall).unwrap());
        assert!(some_smaller.decide(DecisionMode::Exists).unwrap());
        for x in 0..20u64 {
            assert_eq!(some_smaller.accepts(&[n1(x)]).unwrap(), x > 0);
        }
        // ∃y (y < x ∧ x < y) is empty.
        let contradiction = lt
            .combine(Connective::And, &lt.permute_blocks(&[1, 0]).unwrap())
            .unwrap()
            .quantify(Quantifier::Exists, 1)
            .unwrap();
        assert!(!contradiction.decide(DecisionMode::Exists).unwrap());
        // ∀y (x ≤ y) holds exactly at 0.
        let le = lt
            .combine(Connective::Or, &base_eq(&block).unwrap())
            .unwrap();
        let minimum = le.quantify(Quantifier::Forall, 1).unwrap();
        for x in 0..10u64 {
            assert_eq!(minimum.accepts(&[n1(x)]).unwrap(), x == 0);
        }
    }

    #[test]
    fn adder_matches_arithmetic() {
        for b in [2u32, 3] {
            let add = adder(b).unwrap();
            for x in 0..20u64 {
                for y in 0..20u64 {
                    for z in 0..45u64 {
                        assert_eq!(
                            add.accepts(&[n1(x), n1(y), n1(z)]).unwrap(),
                            x + y == z,
                            "base {b}: {x}+{y}={z}"
                        );
                    }
                }
            }
        }
        let add = adder(2).unwrap();
        for n in 0..50u64 {
            assert!(add.accepts(&[n1(0), n1(n), n1(n)]).unwrap());
        }
        assert!(!add.accepts(&[n1(1), n1(1), n1(3)]).unwrap());
    }

    #[test]
    fn quantified_adder_gives_interval() {
        // ∃y (x + y = 10) over base 2 accepts exactly x ≤ 10.
        let add = adder(2).unwrap();
        let block = base2_block();
        let ten = Predicate::singleton(&block, &[BigUint::from(10u32)]).unwrap();
        let ten3 = ten
            .add_block(0, &block)
            .unwrap()
            .add_block(0, &block)
            .unwrap();
        let with_sum = add.combine(Connective::And, &ten3).unwrap();
        let xy = with_sum.quantify(Quantifier::Exists, 2).unwrap();
        let x_only = xy.quantify(Quantifier::Exists, 1).unwrap();
        for x in 0..30u64 {
            assert_eq!(x_only.accepts(&[n1(x)]).unwrap(), x <= 10, "x={x}");
        }
    }

    #[test]
    fn seq_equality_of_thue_morse() {
        let tm = crate::automatic::tests::thue_morse();
        let p = seq_equality(&tm).unwrap();
        let parity = |n: u64| n.count_ones() % 2;
        for a in 0..40u64 {
            for b in 0..40u64 {
                assert_eq!(
                    p.accepts(&[n1(a), n1(b)]).unwrap(),
                    parity(a) == parity(b),
                    "({a},{b})"
                );
            }
        }
    }

    #[test]
    fn seq_equality_of_constant_is_full() {
        let block = base2_block();
        let c = Dfao::constant(
            block.clone(),
            crate::semiring::SemiringTag::Nat,
            crate::semiring::SemiringTag::Nat.from_u64(2),
        )
        .unwrap();
        let p = seq_equality(&c).unwrap();
        assert!(p.dfa().lang_equal(p.multi().language()).unwrap());
    }

    #[test]
    fn enum_order_wraps() {
        let block = base2_block();
        let e = crate::numeration::EnumOrder::lexicographic(block.clone());
        let lt = enum_order_predicate(&e, OrderRel::Lt).unwrap();
        for a in 0..20u64 {
            for b in 0..20u64 {
                assert_eq!(lt.accepts(&[n1(a), n1(b)]).unwrap(), a < b);
            }
        }
    }

    #[test]
    fn infinitely_many_decision() {
        let block = base2_block();
        let lt = base_lt(&block).unwrap();
        // x < 5 holds for finitely many x.
        let five = Predicate::singleton(&block, &[BigUint::from(5u32)]).unwrap();
        let below_five = lt
            .combine(Connective::And, &five.add_block(0, &block).unwrap())
            .unwrap()
            .quantify(Quantifier::Exists, 1)
            .unwrap();
        assert!(below_five.decide(DecisionMode::Exists).unwrap());
        assert!(!below_five
            .decide(DecisionMode::ExistsInfinitelyMany)
            .unwrap());
        // x ≥ 5 holds for infinitely many x.
        let above = below_five.not().unwrap();
        assert!(above.decide(DecisionMode::ExistsInfinitelyMany).unwrap());
    }
}
