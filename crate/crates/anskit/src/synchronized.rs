//! Synchronized relations and sequences.
//!
//! A relation between words is synchronized when the language of its
//! jointly `$`-padded pairs is regular; a sequence ℕ^d → ℕ^d' is
//! synchronized when the padded representations of its graph form a
//! regular language. The two views are tied by the relabeling that swaps
//! the `$` padding of one side for the `#` padding of the corresponding
//! representation block.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;

use crate::automata::{Alphabet, Dfa, Letter, Nfa, PAD, RPAD};
use crate::automatic::Dfao;
use crate::error::{Error, Result};
use crate::logic::formula::{compile_text, Compiled, Compiler};
use crate::logic::{base_eq, Connective, DecisionMode, Predicate, Quantifier};
use crate::numeration::{Ans, MultiAns};
use crate::regular::RegularSequence;
use crate::semiring::{SemiringTag, SemiringValue};
use crate::series::{LinRep, WeightedAutomaton};

/// A synchronized relation between words over two tuple alphabets, given
/// by the automaton of its jointly `$`-padded graph. A letter of the
/// relation automaton is the flattened pair of a left-side letter (or the
/// all-`$` filler) and a right-side letter (or filler); the all-`$` row is
/// excluded.
#[derive(Debug, Clone)]
pub struct SyncRelation {
    left: Alphabet,
    right: Alphabet,
    dfa: Dfa,
}

/// The canonical alphabet of `$`-padded pairs over two sides.
pub fn relation_alphabet(left: &Alphabet, right: &Alphabet) -> Alphabet {
    let mut letters = Vec::new();
    let lefts: Vec<Letter> = std::iter::once(Letter::uniform(RPAD, left.arity()))
        .chain(left.letters().iter().cloned())
        .collect();
    let rights: Vec<Letter> = std::iter::once(Letter::uniform(RPAD, right.arity()))
        .chain(right.letters().iter().cloned())
        .collect();
    for l in &lefts {
        for r in &rights {
            let combined = l.concat(r);
            if !combined.is_uniform(RPAD) {
                letters.push(combined);
            }
        }
    }
    Alphabet::new(letters).expect("relation alphabet is well formed")
}

/// The automaton of canonically padded sides: on each side the filler
/// occurs only as a leading run.
fn sides_canonical(alphabet: &Alphabet, side_arities: &[usize]) -> Dfa {
    let sides = side_arities.len();
    let offsets: Vec<usize> = side_arities
        .iter()
        .scan(0usize, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    // States: bitmask of started sides.
    let n = 1usize << sides;
    let mut transitions = Vec::new();
    for (a, letter) in alphabet.letters().iter().enumerate() {
        let mut started_now = 0usize;
        for s in 0..sides {
            let part = letter.project(&(offsets[s]..offsets[s] + side_arities[s]).collect::<Vec<_>>());
            if !part.is_uniform(RPAD) {
                started_now |= 1 << s;
            }
        }
        for state in 0..n {
            // A side that has started may not read filler again.
            if state & !started_now != 0 {
                continue;
            }
            transitions.push((state, a, state | started_now));
        }
    }
    let finals: Vec<usize> = (0..n).collect();
    Dfa::from_parts(alphabet.clone(), n, 0, &finals, &transitions).unwrap()
}

impl SyncRelation {
    pub fn new(left: Alphabet, right: Alphabet, dfa: Dfa) -> Result<SyncRelation> {
        let expected = relation_alphabet(&left, &right);
        if !dfa.alphabet().same_as(&expected) {
            return Err(Error::AlphabetMismatch(
                "relation automaton must use the padded pair alphabet".into(),
            ));
        }
        // Normalize: intersect with the canonical padding discipline.
        let canon = sides_canonical(&expected, &[left.arity(), right.arity()]);
        let dfa = dfa.intersect(&canon)?.minimize();
        Ok(SyncRelation { left, right, dfa })
    }

    pub fn left_alphabet(&self) -> &Alphabet {
        &self.left
    }
    pub fn right_alphabet(&self) -> &Alphabet {
        &self.right
    }
    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    /// Membership of a `$`-padded pair given as (left word, right word).
    pub fn relates(&self, left: &[usize], right: &[usize]) -> bool {
        let len = left.len().max(right.len());
        let mut word = Vec::with_capacity(len);
        let alphabet = self.dfa.alphabet();
        for pos in 0..len {
            let l = if pos + left.len() < len {
                Letter::uniform(RPAD, self.left.arity())
            } else {
                self.left.letter(left[pos + left.len() - len]).clone()
            };
            let r = if pos + right.len() < len {
                Letter::uniform(RPAD, self.right.arity())
            } else {
                self.right.letter(right[pos + right.len() - len]).clone()
            };
            match alphabet.id_of(&l.concat(&r)) {
                Some(id) => word.push(id),
                None => return false,
            }
        }
        self.dfa.accepts_ids(&word)
    }

    /// Composition with another relation sharing the middle alphabet: the
    /// three-sided join is intersected with the padding discipline, the
    /// middle side is projected out and the result re-normalized.
    pub fn compose(&self, other: &SyncRelation) -> Result<SyncRelation> {
        if !self.right.same_as(&other.left) {
            return Err(Error::AlphabetMismatch(
                "composition needs a shared middle alphabet".into(),
            ));
        }
        let (da, db, dc) = (
            self.left.arity(),
            self.right.arity(),
            other.right.arity(),
        );
        // Joint alphabet on three sides.
        let mut letters = Vec::new();
        let fill = |d: usize| Letter::uniform(RPAD, d);
        let lefts: Vec<Letter> = std::iter::once(fill(da))
            .chain(self.left.letters().iter().cloned())
            .collect();
        let mids: Vec<Letter> = std::iter::once(fill(db))
            .chain(self.right.letters().iter().cloned())
            .collect();
        let rights: Vec<Letter> = std::iter::once(fill(dc))
            .chain(other.right.letters().iter().cloned())
            .collect();
        for l in &lefts {
            for m in &mids {
                for r in &rights {
                    let combined = l.concat(m).concat(r);
                    if !combined.is_uniform(RPAD) {
                        letters.push(combined);
                    }
                }
            }
        }
        let joint = Alphabet::new(letters)?;
        let lift = |dfa: &Dfa, own: &[usize], pad_own: &Letter| -> Result<Dfa> {
            // A fresh initial state loops on rows where the lifted
            // automaton's sides are still filler, then behaves like the
            // old initial state.
            let n = dfa.num_states();
            let fresh = n;
            let mut nfa = Nfa::new(joint.clone(), n + 1);
            nfa.add_initial(fresh);
            if dfa.is_final(dfa.initial()) {
                nfa.add_final(fresh);
            }
            for q in 0..n {
                if dfa.is_final(q) {
                    nfa.add_final(q);
                }
            }
            for (id, letter) in joint.letters().iter().enumerate() {
                if letter.project(own) == *pad_own {
                    nfa.add_transition(fresh, id, fresh);
                }
            }
            for (p, a, q) in dfa.transitions() {
                let own_letter = dfa.alphabet().letter(a).clone();
                for (id, letter) in joint.letters().iter().enumerate() {
                    if letter.project(own) == own_letter {
                        nfa.add_transition(p, id, q);
                        if p == dfa.initial() {
                            nfa.add_transition(fresh, id, q);
                        }
                    }
                }
            }
            Ok(nfa.determinize())
        };
        let own_ab: Vec<usize> = (0..da + db).collect();
        let own_bc: Vec<usize> = (da..da + db + dc).collect();
        let lifted_ab = lift(&self.dfa, &own_ab, &Letter::uniform(RPAD, da + db))?;
        let lifted_bc = lift(&other.dfa, &own_bc, &Letter::uniform(RPAD, db + dc))?;
        let canon = sides_canonical(&joint, &[da, db, dc]);
        let joined = lifted_ab.intersect(&lifted_bc)?.intersect(&canon)?;
        // Project the middle side away.
        let target = relation_alphabet(&self.left, &other.right);
        let keep: Vec<usize> = (0..da).chain(da + db..da + db + dc).collect();
        let erase = Letter::uniform(RPAD, da + dc);
        let nfa = joined.project_tapes(&keep, Some(&erase), &target)?;
        SyncRelation::new(self.left.clone(), other.right.clone(), nfa.determinize())
    }
}

/// A synchronized sequence: the recognizable graph of a (total, single
/// valued) map from input vectors to output vectors, stored as a
/// two-block predicate.
#[derive(Debug, Clone)]
pub struct SyncSequence {
    graph: Predicate,
}

impl SyncSequence {
    /// Wraps a two-block graph predicate.
    pub fn new(graph: Predicate) -> Result<SyncSequence> {
        if graph.arity() != 2 {
            return Err(Error::BlockMismatch(
                "a sequence graph has an input and an output block".into(),
            ));
        }
        Ok(SyncSequence { graph })
    }

    pub fn graph(&self) -> &Predicate {
        &self.graph
    }

    pub fn multi_in(&self) -> Result<MultiAns> {
        self.graph.block_system(0)
    }

    pub fn multi_out(&self) -> Result<MultiAns> {
        self.graph.block_system(1)
    }

    /// Every input has at least one output.
    pub fn is_total(&self) -> Result<bool> {
        self.graph
            .quantify(Quantifier::Exists, 1)?
            .decide(DecisionMode::Forall)
    }

    /// No input has two outputs.
    pub fn is_functional(&self) -> Result<bool> {
        let out = self.multi_out()?;
        // graph(x,y) ∧ graph(x,y') ∧ y ≠ y' is unsatisfiable. Inserting a
        // block at position 2 ties the graph to the middle block, at
        // position 1 to the last one.
        let g1 = self.graph.add_block(2, &out)?; // graph(x, y) over (x, y, y')
        let g2 = self.graph.add_block(1, &out)?; // graph(x, y') over (x, y, y')
        let neq = base_eq(&out)?.not()?;
        let neq3 = neq.add_block(0, &self.multi_in()?)?;
        let bad = g1
            .combine(Connective::And, &g2)?
            .combine(Connective::And, &neq3)?;
        Ok(bad.dfa().is_empty_language())
    }

    /// The value at n, for functional graphs.
    pub fn eval(&self, n: &[BigUint]) -> Result<Vec<BigUint>> {
        let input = self.multi_in()?;
        let output = self.multi_out()?;
        let pin = Predicate::singleton(&input, n)?.add_block(1, &output)?;
        let fiber = self
            .graph
            .combine(Connective::And, &pin)?
            .quantify(Quantifier::Exists, 0)?;
        let words = fiber.dfa().enumerate_finite(2)?;
        match words.as_slice() {
            [w] => output.val(w),
            [] => Err(Error::InvalidWord("no output for this input".into())),
            _ => Err(Error::InvalidWord("graph is not single-valued".into())),
        }
    }

    /// The `$`-padded relation behind the graph: representation blocks
    /// whose rows are still entirely `#` become side fillers.
    pub fn to_relation(&self) -> Result<SyncRelation> {
        let input = self.multi_in()?;
        let output = self.multi_out()?;
        let (d, d2) = (input.dim(), output.dim());
        let left = input.alphabet().clone();
        let right = output.alphabet().clone();
        let target = relation_alphabet(&left, &right);
        let in_range: Vec<usize> = (0..d).collect();
        let out_range: Vec<usize> = (d..d + d2).collect();
        let dfa = self.graph.dfa().map_letters(&target, |l| {
            let lp = l.project(&in_range);
            let rp = l.project(&out_range);
            let lp = if lp.is_uniform(PAD) {
                Letter::uniform(RPAD, d)
            } else {
                lp
            };
            let rp = if rp.is_uniform(PAD) {
                Letter::uniform(RPAD, d2)
            } else {
                rp
            };
            lp.concat(&rp)
        })?;
        SyncRelation::new(left, right, dfa)
    }

    /// Rebuilds a graph from a padded relation over the alphabets of the
    /// given systems. Rejects relations whose language is not a canonical
    /// graph language.
    pub fn from_relation(
        rel: &SyncRelation,
        input: &MultiAns,
        output: &MultiAns,
    ) -> Result<SyncSequence> {
        if !rel.left.same_as(input.alphabet()) || !rel.right.same_as(output.alphabet()) {
            return Err(Error::AlphabetMismatch(
                "relation alphabets do not match the systems".into(),
            ));
        }
        let (d, d2) = (input.dim(), output.dim());
        let joint = input.concat(output)?;
        let in_range: Vec<usize> = (0..d).collect();
        let out_range: Vec<usize> = (d..d + d2).collect();
        let mapped = rel.dfa.map_letters(joint.alphabet(), |l| {
            let lp = l.project(&in_range);
            let rp = l.project(&out_range);
            let lp = if lp.is_uniform(RPAD) {
                Letter::uniform(PAD, d)
            } else {
                lp
            };
            let rp = if rp.is_uniform(RPAD) {
                Letter::uniform(PAD, d2)
            } else {
                rp
            };
            lp.concat(&rp)
        })?;
        let graph = Predicate::from_dfa(joint, vec![d, d2], mapped.clone())?;
        // The relation must already be a language of canonical graphs.
        if !graph.dfa().lang_equal(&mapped.minimize())? {
            return Err(Error::InvalidWord(
                "relation carries words outside the canonical graph language".into(),
            ));
        }
        SyncSequence::new(graph)
    }

    /// The composition g ∘ self for a second synchronized sequence g whose
    /// input side matches this sequence's output side.
    pub fn compose(&self, g: &SyncSequence) -> Result<SyncSequence> {
        let r1 = self.to_relation()?;
        let r2 = g.to_relation()?;
        let rel = r1.compose(&r2)?;
        SyncSequence::from_relation(&rel, &self.multi_in()?, &g.multi_out()?)
    }

    /// Demotes a scalar-output synchronized sequence to a regular
    /// sequence over ℕ by counting X = {(n, ℓ) : ∃m graph(n, m) ∧ ℓ < m}.
    pub fn to_regular(&self) -> Result<RegularSequence> {
        let output = self.multi_out()?;
        if output.dim() != 1 {
            return Err(Error::BlockMismatch(
                "regular demotion needs a one-dimensional output".into(),
            ));
        }
        let input = self.multi_in()?;
        // Blocks (n, ℓ, m).
        let graph_nlm = self.graph.add_block(1, &output)?;
        let lt_out = crate::logic::base_lt(&output)?; // (ℓ, m)
        let lt_nlm = lt_out.add_block(0, &input)?;
        let x = graph_nlm
            .combine(Connective::And, &lt_nlm)?
            .quantify(Quantifier::Exists, 2)?;
        let counting = crate::counting::count_projection(&x, 1)?;
        counting.demote_to_nat()
    }

    /// Converts a finite-image synchronized sequence with scalar output
    /// into an output automaton.
    pub fn to_dfao(&self, budget: usize) -> Result<Dfao> {
        let output = self.multi_out()?;
        if output.dim() != 1 {
            return Err(Error::BlockMismatch(
                "automaton conversion needs a one-dimensional output".into(),
            ));
        }
        let input = self.multi_in()?;
        let image = self.graph.quantify(Quantifier::Exists, 0)?;
        let words = image.dfa().enumerate_finite(budget).map_err(|_| {
            Error::InfiniteImage("the output side takes infinitely many values".into())
        })?;
        // One fiber automaton per output value.
        let mut pieces: Vec<(SemiringValue, Dfa)> = Vec::new();
        for w in words {
            let value = output.val(&w)?.remove(0);
            let pin = Predicate::singleton(&output, &[value.clone()])?.add_block(0, &input)?;
            let fiber = self
                .graph
                .combine(Connective::And, &pin)?
                .quantify(Quantifier::Exists, 1)?;
            pieces.push((
                SemiringValue::Nat(value),
                fiber.dfa().complete(),
            ));
        }
        let k = input.alphabet().len();
        let tag = SemiringTag::Nat;
        let start: Vec<usize> = pieces.iter().map(|(_, d)| d.initial()).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut order = vec![start.clone()];
        index.insert(start, 0);
        let mut transitions = Vec::new();
        let mut tau = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let cur = order[i].clone();
            let mut value: Option<&SemiringValue> = None;
            for ((v, d), &q) in pieces.iter().zip(&cur) {
                if d.is_final(q) {
                    value = Some(v);
                }
            }
            tau.push(value.cloned().unwrap_or_else(|| tag.zero()));
            for a in 0..k {
                let next: Vec<usize> = pieces
                    .iter()
                    .zip(&cur)
                    .map(|((_, d), &q)| d.step(q, a).expect("completed"))
                    .collect();
                let len = index.len();
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    order.push(next);
                    len
                });
                transitions.push((i, a, id));
            }
            i += 1;
        }
        Dfao::new(input, tag, order.len(), 0, &transitions, tau)
    }
}

/// Builds the graph of an automaton's sequence as a synchronized sequence
/// with scalar natural outputs expressed in the given output system.
pub fn dfao_to_sync(machine: &Dfao, out_sys: &Ans) -> Result<SyncSequence> {
    let input = machine.multi().clone();
    let output = MultiAns::new(vec![out_sys.clone()])?;
    let mut acc: Option<Predicate> = None;
    for (value, fiber) in machine.fibers()? {
        let nat = value.to_nat().ok_or_else(|| Error::UnsupportedSemiring {
            tag: machine.tag().name(),
            hint: "graph outputs must be natural numbers".into(),
        })?;
        let fiber_pred = Predicate::from_dfa(input.clone(), vec![input.dim()], fiber)?;
        let piece = fiber_pred.add_block(1, &output)?.combine(
            Connective::And,
            &Predicate::singleton(&output, &[nat])?.add_block(0, &input)?,
        )?;
        acc = Some(match acc {
            None => piece,
            Some(p) => p.combine(Connective::Or, &piece)?,
        });
    }
    let graph = acc.ok_or_else(|| Error::InvalidWord("machine has no fibers".into()))?;
    SyncSequence::new(graph)
}

/// The successor sequence n ↦ n+1 of a numeration system, built from its
/// first-order characterization: v is the least word strictly above u in
/// the radix order of the language.
pub fn successor(sys: &Ans) -> Result<SyncSequence> {
    let block = MultiAns::new(vec![sys.clone()])?;
    let mut compiler = Compiler::new(block.clone());
    let text = "(and (lt u v) (not (exists x (and (lt u x) (lt x v)))))";
    let compiled = compile_text(&mut compiler, text)?;
    let Compiled::Pred { pred, vars } = compiled else {
        return Err(Error::BlockMismatch("successor formula closed".into()));
    };
    debug_assert_eq!(vars, vec!["u", "v"]);
    let seq = SyncSequence::new(pred)?;
    if !seq.is_total()? || !seq.is_functional()? {
        return Err(Error::InvalidWord(
            "successor construction is not a total function".into(),
        ));
    }
    Ok(seq)
}

/// The translation n ↦ n + k, as the k-fold composition of the successor.
pub fn plus_k(sys: &Ans, k: u64) -> Result<SyncSequence> {
    let block = MultiAns::new(vec![sys.clone()])?;
    if k == 0 {
        return SyncSequence::new(base_eq(&block)?);
    }
    let succ = successor(sys)?;
    let mut acc = succ.clone();
    for _ in 1..k {
        acc = acc.compose(&succ)?;
    }
    Ok(acc)
}

/// The componentwise translation n ↦ n + k on a product system: the
/// conjunction over coordinates of the scalar translation graphs, each
/// lifted into the 2d-tape space.
pub fn plus_vector(multi: &MultiAns, k: &[BigUint]) -> Result<SyncSequence> {
    if k.len() != multi.dim() {
        return Err(Error::BlockMismatch("offset arity mismatch".into()));
    }
    let d = multi.dim();
    let mut acc: Option<Predicate> = None;
    for (j, kj) in k.iter().enumerate() {
        let sys = &multi.systems()[j];
        let kj_u64 = u64::try_from(kj.clone()).map_err(|_| {
            Error::BlockMismatch("translation offsets larger than u64 are unsupported".into())
        })?;
        // Scalar graph on blocks (n_j, m_j), widened to
        // (n_0..n_{d-1}, m_0..m_{d-1}) as 2d scalar blocks.
        let mut lifted = plus_k(sys, kj_u64)?.graph().clone();
        for t in (0..d).filter(|&t| t != j) {
            let single = MultiAns::new(vec![multi.systems()[t].clone()])?;
            // All indices below t are already present on both sides, so
            // the new input tape goes to position t and the new output
            // tape right after the (now one larger) input half.
            lifted = lifted.with_block_dims(vec![1; lifted.multi().dim()])?;
            lifted = lifted.add_block(t, &single)?;
            lifted = lifted.with_block_dims(vec![1; lifted.multi().dim()])?;
            let half = lifted.multi().dim().div_ceil(2);
            lifted = lifted.add_block(half + t, &single)?;
        }
        let p = lifted.with_block_dims(vec![d, d])?;
        acc = Some(match acc {
            None => p,
            Some(q) => q.combine(Connective::And, &p)?,
        });
    }
    SyncSequence::new(acc.expect("at least one coordinate"))
}

impl Predicate {
    /// Reinterprets the block structure without touching the automaton.
    pub fn with_block_dims(&self, dims: Vec<usize>) -> Result<Predicate> {
        Predicate::from_dfa(self.multi().clone(), dims, self.dfa().clone())
    }
}

/// Whether, for every left word, only finitely many right words are
/// related: no useful cycle of transitions whose left side is filler.
fn right_fibers_finite(rel: &SyncRelation) -> bool {
    let trimmed = rel.dfa.trim();
    let da = rel.left.arity();
    let left_range: Vec<usize> = (0..da).collect();
    let pad = Letter::uniform(RPAD, da);
    // Cycle detection on the subgraph of left-filler transitions.
    let n = trimmed.num_states();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (p, a, q) in trimmed.transitions() {
        if trimmed.alphabet().letter(a).project(&left_range) == pad {
            adj[p].push(q);
        }
    }
    let mut color = vec![0u8; n];
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        color[start] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    true
}

/// Composes a recognizable series on the right alphabet with a
/// synchronized relation, yielding the series u ↦ Σ over uRv of (S, v).
///
/// The construction runs the relation automaton against the weighted
/// automaton of the series extended with a unit filler loop on a
/// normalized initial state; filler-prefixed paths are folded into the
/// initial weights, and the empty-word coefficient is patched to the
/// direct sum over the ε-related right words.
pub fn compose_series_relation(series: &LinRep, rel: &SyncRelation) -> Result<LinRep> {
    if !series.alphabet().same_as(&rel.right) {
        return Err(Error::AlphabetMismatch(
            "series alphabet must match the relation's right side".into(),
        ));
    }
    if !right_fibers_finite(rel) {
        return Err(Error::CompositionUndefined(
            "some left word relates to infinitely many right words".into(),
        ));
    }
    let tag = series.tag().clone();
    let da = rel.left.arity();
    let db = rel.right.arity();
    let left_range: Vec<usize> = (0..da).collect();
    let right_range: Vec<usize> = (da..da + db).collect();
    let left_pad = Letter::uniform(RPAD, da);
    let right_pad = Letter::uniform(RPAD, db);

    // Relation automaton with an initial state free of incoming
    // transitions.
    let a_dfa = {
        let d = rel.dfa.trim();
        let has_incoming = d.transitions().iter().any(|&(_, _, q)| q == d.initial());
        if !has_incoming {
            d
        } else {
            let n = d.num_states();
            let mut transitions = d.transitions();
            for (p, l, q) in d.transitions() {
                if p == d.initial() {
                    transitions.push((n, l, q));
                }
            }
            let mut finals = d.final_states();
            if d.is_final(d.initial()) {
                finals.push(n);
            }
            Dfa::from_parts(d.alphabet().clone(), n + 1, n, &finals, &transitions)?
        }
    };

    // Weighted automaton of the series with a unique fresh initial state.
    let wfa = WeightedAutomaton::from_linrep(series);
    let nb = wfa.num_states() + 1;
    let ib = wfa.num_states(); // fresh initial
    let mut b_final: Vec<SemiringValue> = wfa.final_weights().to_vec();
    // T(i) = λγ.
    let eps_coeff = series.coeff(&[])?;
    b_final.push(eps_coeff);
    // E(i, b, q) = (λ μ(b))_q; other transitions unchanged.
    let mut b_trans: Vec<(usize, usize, usize, SemiringValue)> = wfa.transitions().to_vec();
    for b in 0..rel.right.len() {
        let row = crate::series::row_mul(
            &tag,
            &crate::series::row_of(series.lambda()),
            series.mu(b),
        )?;
        for (q, wgt) in row.into_iter().enumerate() {
            if !wgt.is_zero() {
                b_trans.push((ib, b, q, wgt));
            }
        }
    }

    // Product states.
    let na = a_dfa.num_states();
    let pstate = |qa: usize, qb: usize| qa * nb + qb;
    let total = na * nb;
    let alpha = total;
    let init_pair = pstate(a_dfa.initial(), ib);

    // Adjacency by the relation letter split: for each relation letter,
    // its left part (None for filler) and right part (None for filler).
    let rel_alpha = a_dfa.alphabet().clone();
    let mut letter_split: Vec<(Option<usize>, Option<usize>)> =
        Vec::with_capacity(rel_alpha.len());
    for letter in rel_alpha.letters() {
        let lp = letter.project(&left_range);
        let rp = letter.project(&right_range);
        let l = if lp == left_pad {
            None
        } else {
            Some(rel.left.require_id(&lp)?)
        };
        let r = if rp == right_pad {
            None
        } else {
            Some(rel.right.require_id(&rp)?)
        };
        letter_split.push((l, r));
    }

    // Composed transitions, labeled by Some(a-letter) or None for the
    // filler label.
    let mut edges: HashMap<(usize, Option<usize>, usize), SemiringValue> = HashMap::new();
    for (qa1, l, qa2) in a_dfa.transitions() {
        let (la, lb) = letter_split[l];
        // The series automaton reads lb, or stays on the filler loop at
        // its fresh initial state.
        match lb {
            Some(b) => {
                for (p, bl, q, w) in &b_trans {
                    if *bl != b || w.is_zero() {
                        continue;
                    }
                    let key = (pstate(qa1, *p), la, pstate(qa2, *q));
                    let cur = edges.remove(&key).unwrap_or_else(|| tag.zero());
                    edges.insert(key.clone(), tag.add(&cur, w)?);
                }
            }
            None => {
                // Filler on the right side: weight-one loop at ib only.
                let key = (pstate(qa1, ib), la, pstate(qa2, ib));
                let cur = edges.remove(&key).unwrap_or_else(|| tag.zero());
                edges.insert(key, tag.add(&cur, &tag.one())?);
            }
        }
    }

    // Final weights on the product.
    let mut final_w = vec![tag.zero(); total + 1];
    for qa in 0..na {
        if !a_dfa.is_final(qa) {
            continue;
        }
        for qb in 0..nb {
            final_w[pstate(qa, qb)] = b_final[qb].clone();
        }
    }
    // Empty-word patch: the coefficient at ε must be Σ over εRv of (S,v).
    // Enumerate the right words reachable by filler-left rows.
    {
        let mut total_eps = tag.zero();
        // DFS over a_dfa restricted to filler-left letters, collecting
        // accepted right-side words; the finiteness check above bounds
        // this search.
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(a_dfa.initial(), Vec::new())];
        while let Some((q, v)) = stack.pop() {
            if a_dfa.is_final(q) {
                let c = series.coeff(&v)?;
                total_eps = tag.add(&total_eps, &c)?;
            }
            for (p, l, t) in a_dfa.transitions() {
                if p != q {
                    continue;
                }
                let (la, lb) = letter_split[l];
                if la.is_some() {
                    continue;
                }
                let mut v2 = v.clone();
                if let Some(b) = lb {
                    v2.push(b);
                }
                stack.push((t, v2));
            }
        }
        final_w[init_pair] = total_eps;
    }

    // Co-accessible product states (nonzero final weight reachable).
    let mut co = vec![false; total + 1];
    {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); total + 1];
        for (&(p, _, q), w) in &edges {
            if !w.is_zero() {
                preds[q].push(p);
            }
        }
        let mut queue: VecDeque<usize> = (0..total)
            .filter(|&s| !final_w[s].is_zero() && s != init_pair)
            .collect();
        // The ε-patched weight at the initial pair does not witness
        // co-accessibility for longer words, but any true final weight
        // there does.
        for qb in 0..nb {
            let s = pstate(a_dfa.initial(), qb);
            if a_dfa.is_final(a_dfa.initial()) && !b_final[qb].is_zero() {
                queue.push_back(s);
            }
        }
        for &s in &queue {
            co[s] = true;
        }
        while let Some(s) = queue.pop_front() {
            for &p in &preds[s] {
                if !co[p] {
                    co[p] = true;
                    queue.push_back(p);
                }
            }
        }
    }

    // Fold filler-prefixed paths into transitions out of the auxiliary
    // initial state α: weights of paths init =filler^ℓ=> followed by a
    // letter step, summed over ℓ ≥ 1.
    let mut alpha_edges: HashMap<(usize, usize), SemiringValue> = HashMap::new();
    {
        // Row vector over product states.
        let mut row = vec![tag.zero(); total];
        row[init_pair] = tag.one();
        // Iterate M_filler; the filler subgraph is acyclic on the useful
        // part, so the iteration empties out within |states| steps.
        for _ in 0..total {
            let mut next = vec![tag.zero(); total];
            let mut any = false;
            for (&(p, l, q), w) in &edges {
                if l.is_some() || row[p].is_zero() {
                    continue;
                }
                let prod = tag.mul(&row[p], w)?;
                next[q] = tag.add(&next[q], &prod)?;
                any = true;
            }
            if !any || next.iter().all(|v| v.is_zero()) {
                break;
            }
            // Letter steps out of the current filler depth.
            for (&(p, l, q), w) in &edges {
                let Some(a) = l else { continue };
                if next[p].is_zero() || !co[q] {
                    continue;
                }
                let prod = tag.mul(&next[p], w)?;
                let cur = alpha_edges
                    .remove(&(a, q))
                    .unwrap_or_else(|| tag.zero());
                alpha_edges.insert((a, q), tag.add(&cur, &prod)?);
            }
            row = next;
        }
    }

    // Assemble the weighted automaton over the left alphabet.
    let mut transitions: Vec<(usize, usize, usize, SemiringValue)> = Vec::new();
    for (&(p, l, q), w) in &edges {
        if let Some(a) = l {
            transitions.push((p, a, q, w.clone()));
        }
    }
    for (&(a, q), w) in &alpha_edges {
        transitions.push((alpha, a, q, w.clone()));
    }
    let mut initial = vec![tag.zero(); total + 1];
    initial[init_pair] = tag.one();
    initial[alpha] = tag.one();
    let wfa = WeightedAutomaton::new(
        tag,
        rel.left.clone(),
        total + 1,
        initial,
        final_w,
        transitions,
    )?;
    Ok(wfa.to_linrep())
}

/// Composes a synchronized sequence with a regular sequence on its output
/// system: n ↦ g(f(n)).
pub fn compose_sync_regular(
    f: &SyncSequence,
    g: &RegularSequence,
) -> Result<RegularSequence> {
    let out = f.multi_out()?;
    if !g.multi().alphabet().same_as(out.alphabet()) {
        return Err(Error::AlphabetMismatch(
            "the regular sequence must live on the output system".into(),
        ));
    }
    if !f.is_total()? {
        return Err(Error::InvalidWord("the synchronized sequence must be total".into()));
    }
    let rel = f.to_relation()?;
    let series = compose_series_relation(g.series(), &rel)?;
    Ok(RegularSequence::from_invariant_series(
        f.multi_in()?,
        series,
    ))
}
