//! Counting constructions: turning recognizable sets into counting
//! sequences over ℕ∞, and the factor-complexity and recurrence pipelines
//! for automatic sequences.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;

use crate::automata::{Letter, PAD};
use crate::automatic::Dfao;
use crate::error::{Error, Result};
use crate::logic::formula::{compile_text, Compiled, Compiler};
use crate::logic::{enum_order_predicate, seq_equality, Predicate};
#[cfg(test)]
use crate::logic::base_lt;
use crate::numeration::{EnumOrder, MultiAns, OrderRel};
use crate::regular::RegularSequence;
use crate::semiring::{Extended, Matrix, SemiringTag, SemiringValue};
use crate::series::{char_series, LinRep};

/// A counting sequence: for each kept vector n, the number (possibly ∞)
/// of completions n' with (n, n') in the underlying set, stored as a
/// series over ℕ∞ on the kept numeration language.
#[derive(Debug, Clone)]
pub struct CountingSeries {
    multi: MultiAns,
    linrep: LinRep,
}

impl CountingSeries {
    pub fn multi(&self) -> &MultiAns {
        &self.multi
    }

    pub fn linrep(&self) -> &LinRep {
        &self.linrep
    }

    /// The count at n.
    pub fn eval(&self, n: &[BigUint]) -> Result<SemiringValue> {
        let w = self.multi.rep(n)?;
        self.linrep.coeff(&w)
    }

    /// Demotes the coefficients to ℕ. This requires that no ∞ can appear:
    /// structurally, every state with an infinite initial weight must be
    /// unable to reach a nonzero final weight.
    pub fn demote_to_nat(&self) -> Result<RegularSequence> {
        let rep = &self.linrep;
        let n = rep.dim();
        let k = rep.alphabet().len();
        // Forward support graph on states.
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in 0..k {
            let m = rep.mu(a);
            for i in 0..n {
                for j in 0..n {
                    if !m.get(i, j).is_zero() {
                        succ[i].push(j);
                    }
                }
            }
        }
        // States that can reach a nonzero final weight.
        let mut co = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n)
            .filter(|&i| !rep.gamma().get(i, 0).is_zero())
            .collect();
        for &i in &queue {
            co[i] = true;
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, ts) in succ.iter().enumerate() {
            for &t in ts {
                preds[t].push(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &p in &preds[i] {
                if !co[p] {
                    co[p] = true;
                    queue.push_back(p);
                }
            }
        }
        for i in 0..n {
            if co[i] && rep.lambda().get(0, i).is_infinite() {
                return Err(Error::InfiniteCount(format!(
                    "state {i} has infinite multiplicity and reaches an accepting weight"
                )));
            }
        }
        // With the infinite entries confined to dead states, zero them and
        // convert.
        let tag = SemiringTag::NatInf;
        let mut lambda = rep.lambda().clone();
        for i in 0..n {
            if lambda.get(0, i).is_infinite() {
                lambda.set(0, i, tag.zero());
            }
        }
        let cleaned = LinRep::new(
            tag,
            rep.alphabet().clone(),
            lambda,
            (0..k).map(|a| rep.mu(a).clone()).collect(),
            rep.gamma().clone(),
        )?;
        let nat = cleaned.convert(&SemiringTag::Nat)?;
        Ok(RegularSequence::from_invariant_series(
            self.multi.clone(),
            nat,
        ))
    }
}

/// Counts, for every value of the first `kept_blocks` blocks, the number
/// of completions of the remaining blocks inside the predicate.
///
/// Transitions whose kept tapes read only padding become silent and are
/// folded into the initial weights as (possibly infinite) path counts; the
/// other transitions project to their kept letters with multiplicity one
/// per pre-image.
pub fn count_projection(x: &Predicate, kept_blocks: usize) -> Result<CountingSeries> {
    if kept_blocks == 0 || kept_blocks >= x.arity() {
        return Err(Error::BlockMismatch(
            "counting needs kept and counted blocks".into(),
        ));
    }
    let kept_tapes: usize = x.block_dims()[..kept_blocks].iter().sum();
    let keep: Vec<usize> = (0..kept_tapes).collect();
    let kept_multi = MultiAns::new(x.multi().systems()[..kept_tapes].to_vec())?;
    let alphabet = kept_multi.alphabet().clone();
    let dfa = x.dfa().trim();
    let n = dfa.num_states().max(1);
    let tag = SemiringTag::NatInf;

    // Split transitions into silent ones (kept part all padding) and
    // letter-labeled ones with multiplicities.
    let mut eps: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n]; // from -> (to, mult)
    let mut mu = vec![Matrix::zero(tag.clone(), n, n); alphabet.len()];
    let all_pad = Letter::uniform(PAD, kept_tapes);
    for (p, a, q) in dfa.transitions() {
        let projected = dfa.alphabet().letter(a).project(&keep);
        if projected == all_pad {
            eps[p].push((q, 1));
        } else {
            let id = alphabet.require_id(&projected)?;
            let cur = mu[id].get(p, q).clone();
            let one = tag.one();
            mu[id].set(p, q, tag.add(&cur, &one)?);
        }
    }

    // Initial silent-path counts from the initial state. Cycles among the
    // silently reachable states make the affected counts infinite.
    let init = dfa.initial();
    let mut reach = vec![false; n];
    reach[init] = true;
    let mut queue = VecDeque::from([init]);
    while let Some(p) = queue.pop_front() {
        for &(q, _) in &eps[p] {
            if !reach[q] {
                reach[q] = true;
                queue.push_back(q);
            }
        }
    }
    // Cycle detection restricted to silently reachable states.
    let mut on_cycle = vec![false; n];
    {
        let mut color = vec![0u8; n];
        let mut stack_nodes: Vec<usize> = Vec::new();
        for start in 0..n {
            if !reach[start] || color[start] != 0 {
                continue;
            }
            // Iterative DFS with explicit stack.
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            color[start] = 1;
            stack_nodes.push(start);
            while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
                if *idx < eps[v].len() {
                    let (w, _) = eps[v][*idx];
                    *idx += 1;
                    if !reach[w] {
                        continue;
                    }
                    match color[w] {
                        0 => {
                            color[w] = 1;
                            stack.push((w, 0));
                            stack_nodes.push(w);
                        }
                        1 => {
                            // Everything currently on the stack from w
                            // onward lies on a cycle.
                            let pos = stack_nodes.iter().position(|&x| x == w).unwrap();
                            for &node in &stack_nodes[pos..] {
                                on_cycle[node] = true;
                            }
                        }
                        _ => {}
                    }
                } else {
                    color[v] = 2;
                    stack.pop();
                    stack_nodes.pop();
                }
            }
        }
    }
    // States silently reachable from a cycle get infinite counts.
    let mut infinite = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| reach[i] && on_cycle[i]).collect();
    for &i in &queue {
        infinite[i] = true;
    }
    while let Some(p) = queue.pop_front() {
        for &(q, _) in &eps[p] {
            if !infinite[q] {
                infinite[q] = true;
                queue.push_back(q);
            }
        }
    }
    // Path counts on the acyclic remainder, in topological order.
    let mut count: Vec<BigUint> = vec![BigUint::from(0u32); n];
    count[init] = BigUint::from(1u32);
    {
        // Kahn ordering over finite reachable states.
        let finite: Vec<usize> = (0..n).filter(|&i| reach[i] && !infinite[i]).collect();
        let mut indeg: HashMap<usize, usize> = finite.iter().map(|&i| (i, 0)).collect();
        for &p in &finite {
            for &(q, _) in &eps[p] {
                if let Some(d) = indeg.get_mut(&q) {
                    *d += 1;
                }
            }
        }
        let mut ready: VecDeque<usize> = finite
            .iter()
            .copied()
            .filter(|i| indeg[i] == 0)
            .collect();
        while let Some(p) = ready.pop_front() {
            for &(q, mult) in &eps[p] {
                if infinite[q] || !reach[q] {
                    continue;
                }
                let add = &count[p] * BigUint::from(mult);
                count[q] += add;
                let d = indeg.get_mut(&q).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push_back(q);
                }
            }
        }
    }
    let mut lambda = Matrix::zero(tag.clone(), 1, n);
    for i in 0..n {
        if !reach[i] {
            continue;
        }
        let v = if infinite[i] {
            SemiringValue::NatInf(Extended::Infinity)
        } else {
            SemiringValue::NatInf(Extended::Finite(count[i].clone()))
        };
        lambda.set(0, i, v);
    }
    let mut gamma = Matrix::zero(tag.clone(), n, 1);
    if dfa.num_states() > 0 {
        for q in 0..dfa.num_states() {
            if dfa.is_final(q) {
                gamma.set(q, 0, tag.one());
            }
        }
    }
    let raw = LinRep::new(tag.clone(), alphabet, lambda, mu, gamma)?;
    let restricted = raw.hadamard(&char_series(kept_multi.language(), tag))?;
    Ok(CountingSeries {
        multi: kept_multi,
        linrep: restricted,
    })
}

fn require_same_scalar_systems(multi: &MultiAns) -> Result<()> {
    let first = &multi.systems()[0];
    for sys in &multi.systems()[1..] {
        let same = sys.alphabet().same_as(first.alphabet())
            && sys.language().lang_equal(first.language())?;
        if !same {
            return Err(Error::BlockMismatch(
                "this pipeline needs identical component systems".into(),
            ));
        }
    }
    Ok(())
}

/// The factor complexity of an automatic sequence: the number of distinct
/// size-s factors, as a regular sequence over ℕ.
///
/// A position p contributes when no earlier position (in the given
/// enumeration order) carries the same factor; the factor disagreement is
/// expressed through the supplied addition predicate.
pub fn factor_complexity(
    machine: &Dfao,
    addition: &Predicate,
    order: &EnumOrder,
) -> Result<RegularSequence> {
    let block = machine.multi().clone();
    let mut compiler = Compiler::new(block.clone()).with_adder(addition.clone());
    compiler.register("neq", seq_equality(machine)?.not()?);
    compiler.register("elt", enum_order_predicate(order, OrderRel::Lt)?);
    // X(s, p): every order-earlier position q disagrees with p somewhere
    // inside the factor: ∃i<s with f(q+i) ≠ f(p+i).
    let text = "(forall q (implies (pred elt q p) \
                 (exists i (and (lt i s) \
                   (exists u (exists v (and (add q i u) (and (add p i v) (pred neq u v)))))))))";
    let compiled = compile_text(&mut compiler, text)?;
    let Compiled::Pred { pred, vars } = compiled else {
        return Err(Error::BlockMismatch("complexity predicate closed".into()));
    };
    debug_assert_eq!(vars, vec!["p", "s"]);
    // Reorder to (s, p) and count over p.
    let sp = pred.permute_blocks(&[1, 0])?;
    let counting = count_projection(&sp, 1)?;
    counting.demote_to_nat()
}

/// The recurrence function of an automatic sequence: R(s) counts the
/// window sizes ℓ for which some size-(ℓ,…,ℓ) window misses a size-s
/// factor, as a counting sequence over ℕ∞.
pub fn recurrence_function(machine: &Dfao, addition: &Predicate) -> Result<CountingSeries> {
    let block = machine.multi().clone();
    require_same_scalar_systems(&block)?;
    let scalar = MultiAns::new(vec![block.systems()[0].clone()])?;
    let mut compiler = Compiler::new(block.clone()).with_adder(addition.clone());
    compiler.register("neq", seq_equality(machine)?.not()?);
    // bounded(k, s, l): k + s ≤ (l,…,l) componentwise. Expressed through
    // the vector sum u = k + s and a per-tape comparison against l.
    let within = all_components_le(&block, &scalar)?;
    compiler.register("wle", within);

    // X(s, l) = ∃p ∃q ∀k (bounded(k,s,l) → window at p of size l misses
    // the factor at q of size s, i.e. factors at p+k and q differ).
    let text = "(exists p (exists q (forall k \
                 (implies (exists u (and (add k s u) (pred wle u l))) \
                   (exists i (and (lt i s) \
                     (exists w (exists x (exists y (and (add p k w) \
                       (and (add w i x) (and (add q i y) (pred neq x y)))))))))))))";
    let compiled = compile_text(&mut compiler, text)?;
    let Compiled::Pred { pred, vars } = compiled else {
        return Err(Error::BlockMismatch("recurrence predicate closed".into()));
    };
    debug_assert_eq!(vars, vec!["l", "s"]);
    let sl = pred.permute_blocks(&[1, 0])?;
    count_projection(&sl, 1)
}

/// The predicate over (u: d tapes, l: one tape) stating that every
/// component of u is ≤ l in radix order. All tapes must share one system.
fn all_components_le(block: &MultiAns, scalar: &MultiAns) -> Result<Predicate> {
    let d = block.dim();
    let joint = block.concat(scalar)?;
    let alphabet = joint.alphabet().clone();
    let sys = &block.systems()[0];
    let key = |sym: &str| -> usize {
        if sym == PAD {
            0
        } else {
            1 + sys
                .alphabet()
                .id_of(&Letter::scalar(sym))
                .expect("symbol belongs to the system")
        }
    };
    // One comparison cell per component of u against l.
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let start = vec![0u8; d];
    let mut order = vec![start.clone()];
    index.insert(start, 0);
    let mut transitions = Vec::new();
    let mut finals = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let cur = order[i].clone();
        if cur.iter().all(|&c| c == 0 || c == 2) {
            finals.push(i);
        }
        for (a, letter) in alphabet.letters().iter().enumerate() {
            let kr = key(letter.part(d));
            let mut next = cur.clone();
            for (t, cell) in next.iter_mut().enumerate() {
                if *cell != 0 {
                    continue;
                }
                let kl = key(letter.part(t));
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
    let dfa = crate::automata::Dfa::from_parts(alphabet, order.len(), 0, &finals, &transitions)?;
    Predicate::from_dfa(joint, vec![d, 1], dfa)
}
