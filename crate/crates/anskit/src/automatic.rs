//! Automatic sequences, generated by deterministic finite automata with
//! output (DFAOs) reading padded representations.
//!
//! The transition table may be partial: a run that leaves the table
//! outputs the zero of the output semiring. This mirrors the usual
//! presentation where transitions that cannot occur on any representation
//! are omitted, and it keeps minimized machines free of an explicit sink.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use num_bigint::BigUint;

use crate::automata::{Alphabet, Dfa};
use crate::error::{Error, Result};
use crate::numeration::MultiAns;
use crate::regular::RegularSequence;
use crate::semiring::{Matrix, SemiringTag, SemiringValue};
use crate::series::{col_mul, col_of, dot, row_mul, row_of, LinRep};

/// A deterministic automaton with an output value per state, evaluating a
/// sequence at n as the output reached by the representation of n.
#[derive(Debug, Clone)]
pub struct Dfao {
    multi: MultiAns,
    tag: SemiringTag,
    initial: usize,
    delta: Vec<Vec<Option<u32>>>,
    tau: Vec<SemiringValue>,
}

impl Dfao {
    pub fn new(
        multi: MultiAns,
        tag: SemiringTag,
        num_states: usize,
        initial: usize,
        transitions: &[(usize, usize, usize)],
        tau: Vec<SemiringValue>,
    ) -> Result<Dfao> {
        if num_states == 0 || initial >= num_states || tau.len() != num_states {
            return Err(Error::InvalidDocument(
                "output automaton states are inconsistent".into(),
            ));
        }
        for v in &tau {
            tag.validate(v)?;
        }
        let k = multi.alphabet().len();
        let mut delta = vec![vec![None; k]; num_states];
        for &(p, a, q) in transitions {
            if p >= num_states || q >= num_states || a >= k {
                return Err(Error::InvalidDocument(format!(
                    "transition ({p},{a},{q}) out of range"
                )));
            }
            if delta[p][a].is_some() && delta[p][a] != Some(q as u32) {
                return Err(Error::InvalidDocument(format!(
                    "nondeterministic transitions from state {p} on letter {a}"
                )));
            }
            delta[p][a] = Some(q as u32);
        }
        Ok(Dfao {
            multi,
            tag,
            initial,
            delta,
            tau,
        })
    }

    /// The one-state machine outputting `value` everywhere.
    pub fn constant(multi: MultiAns, tag: SemiringTag, value: SemiringValue) -> Result<Dfao> {
        tag.validate(&value)?;
        let k = multi.alphabet().len();
        let transitions: Vec<(usize, usize, usize)> = (0..k).map(|a| (0, a, 0)).collect();
        Dfao::new(multi, tag, 1, 0, &transitions, vec![value])
    }

    pub fn multi(&self) -> &MultiAns {
        &self.multi
    }
    pub fn tag(&self) -> &SemiringTag {
        &self.tag
    }
    pub fn alphabet(&self) -> &Alphabet {
        self.multi.alphabet()
    }
    pub fn num_states(&self) -> usize {
        self.delta.len()
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn output(&self, q: usize) -> &SemiringValue {
        &self.tau[q]
    }
    pub fn step(&self, q: usize, a: usize) -> Option<usize> {
        self.delta[q][a].map(|x| x as usize)
    }

    pub fn transitions(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (p, row) in self.delta.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                if let Some(q) = t {
                    out.push((p, a, *q as usize));
                }
            }
        }
        out
    }

    /// The distinct output values, including the implicit zero when the
    /// table is partial.
    pub fn outputs(&self) -> Vec<SemiringValue> {
        let mut set: BTreeSet<SemiringValue> = self.tau.iter().cloned().collect();
        if self
            .delta
            .iter()
            .any(|row| row.iter().any(|t| t.is_none()))
        {
            set.insert(self.tag.zero());
        }
        set.into_iter().collect()
    }

    /// The zero-masked total output on an arbitrary word.
    pub fn output_on_word(&self, word: &[usize]) -> SemiringValue {
        let mut q = self.initial;
        for &a in word {
            match self.step(q, a) {
                Some(t) => q = t,
                None => return self.tag.zero(),
            }
        }
        self.tau[q].clone()
    }

    /// The sequence value at n.
    pub fn eval(&self, n: &[BigUint]) -> Result<SemiringValue> {
        let w = self.multi.rep(n)?;
        Ok(self.output_on_word(&w))
    }

    /// Totalizes the table with an explicit zero-output sink.
    fn complete_sink(&self) -> Dfao {
        let needs = self
            .delta
            .iter()
            .any(|row| row.iter().any(|t| t.is_none()));
        if !needs {
            return self.clone();
        }
        let mut out = self.clone();
        let sink = out.delta.len();
        out.tau.push(out.tag.zero());
        out.delta
            .push(vec![Some(sink as u32); self.alphabet().len()]);
        for row in out.delta.iter_mut().take(sink) {
            for t in row.iter_mut() {
                if t.is_none() {
                    *t = Some(sink as u32);
                }
            }
        }
        out
    }

    /// Product with the minimal automaton of the numeration language:
    /// outputs are unchanged on the language and zero elsewhere.
    pub fn complete_with_zero(&self) -> Dfao {
        let total = self.complete_sink();
        let lang = self.multi.language().minimize().complete();
        let k = self.alphabet().len();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut order = vec![(total.initial, lang.initial())];
        index.insert(order[0], 0);
        let mut transitions = Vec::new();
        let mut tau = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (q, l) = order[i];
            tau.push(if lang.is_final(l) {
                total.tau[q].clone()
            } else {
                self.tag.zero()
            });
            for a in 0..k {
                let t = (
                    total.step(q, a).expect("totalized"),
                    lang.step(l, a).expect("complete"),
                );
                let len = index.len();
                let id = *index.entry(t).or_insert_with(|| {
                    order.push(t);
                    len
                });
                transitions.push((i, a, id));
            }
            i += 1;
        }
        Dfao::new(
            self.multi.clone(),
            self.tag.clone(),
            order.len(),
            0,
            &transitions,
            tau,
        )
        .expect("product is well formed")
    }

    /// Per output value, the automaton of representations mapped to it.
    /// The fibers partition the numeration language.
    pub fn fibers(&self) -> Result<BTreeMap<SemiringValue, Dfa>> {
        self.fibers_inner(true)
    }

    /// Fibers of the zero-masked total function over all words, used by
    /// the reversal construction.
    fn total_fibers(&self) -> Result<BTreeMap<SemiringValue, Dfa>> {
        self.fibers_inner(false)
    }

    fn fibers_inner(&self, restrict: bool) -> Result<BTreeMap<SemiringValue, Dfa>> {
        let total = self.complete_sink();
        let alphabet = self.alphabet().clone();
        let transitions = total.transitions();
        let mut out = BTreeMap::new();
        let values: BTreeSet<SemiringValue> = total.tau.iter().cloned().collect();
        for v in values {
            let finals: Vec<usize> = (0..total.num_states())
                .filter(|&q| total.tau[q] == v)
                .collect();
            let dfa = Dfa::from_parts(
                alphabet.clone(),
                total.num_states(),
                total.initial,
                &finals,
                &transitions,
            )?;
            let fiber = if restrict {
                dfa.intersect(self.multi.language())?.minimize()
            } else {
                dfa.trim()
            };
            if !fiber.is_empty_language() {
                out.insert(v, fiber);
            }
        }
        Ok(out)
    }

    /// The machine computing w ↦ output of self on the reversed word,
    /// built from the reversed fiber languages: each fiber is reversed and
    /// re-determinized, and the product of the fiber automata carries the
    /// outputs.
    pub fn reverse(&self) -> Result<Dfao> {
        let fibers = self.total_fibers()?;
        let pieces: Vec<(SemiringValue, Dfa)> = fibers
            .into_iter()
            .map(|(v, dfa)| (v, dfa.reverse().determinize().complete()))
            .collect();
        let k = self.alphabet().len();
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
                    debug_assert!(value.is_none(), "fibers must partition all words");
                    value = Some(v);
                }
            }
            tau.push(value.cloned().unwrap_or_else(|| self.tag.zero()));
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
        Dfao::new(
            self.multi.clone(),
            self.tag.clone(),
            order.len(),
            0,
            &transitions,
            tau,
        )
    }

    /// The fewest-state machine with the same evaluation on all
    /// representations: zero-masked Moore refinement, after which the
    /// class whose every future output is zero is dropped from the table.
    pub fn minimize(&self) -> Dfao {
        let total = self.complete_sink();
        let n = total.num_states();
        let k = total.alphabet().len();
        // Initial partition by output value.
        let mut value_ids: HashMap<&SemiringValue, usize> = HashMap::new();
        let mut class: Vec<usize> = Vec::with_capacity(n);
        for v in &total.tau {
            let len = value_ids.len();
            class.push(*value_ids.entry(v).or_insert(len));
        }
        loop {
            let mut sig_map: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for q in 0..n {
                let sig: Vec<usize> = (0..k)
                    .map(|a| class[total.step(q, a).expect("total")])
                    .collect();
                let len = sig_map.len();
                next[q] = *sig_map.entry((class[q], sig)).or_insert(len);
            }
            if next == class {
                break;
            }
            class = next;
        }
        let num_classes = class.iter().max().map(|m| m + 1).unwrap_or(0);
        let mut ctau = vec![self.tag.zero(); num_classes];
        let mut cdelta = vec![vec![0usize; k]; num_classes];
        for q in 0..n {
            ctau[class[q]] = total.tau[q].clone();
            for a in 0..k {
                cdelta[class[q]][a] = class[total.step(q, a).unwrap()];
            }
        }
        // Classes from which no nonzero output is ever reachable.
        let mut live = vec![false; num_classes];
        let mut queue: VecDeque<usize> = (0..num_classes)
            .filter(|&c| !ctau[c].is_zero())
            .collect();
        for &c in &queue {
            live[c] = true;
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
        for (c, row) in cdelta.iter().enumerate() {
            for &t in row {
                preds[t].push(c);
            }
        }
        while let Some(c) = queue.pop_front() {
            for &p in &preds[c] {
                if !live[p] {
                    live[p] = true;
                    queue.push_back(p);
                }
            }
        }
        let init_class = class[total.initial];
        if !live[init_class] {
            // The whole sequence is zero.
            return Dfao::new(
                self.multi.clone(),
                self.tag.clone(),
                1,
                0,
                &[],
                vec![self.tag.zero()],
            )
            .unwrap();
        }
        // Renumber live classes in breadth-first order from the initial.
        let mut renum: Vec<Option<usize>> = vec![None; num_classes];
        let mut order = vec![init_class];
        renum[init_class] = Some(0);
        let mut qi = 0;
        while qi < order.len() {
            let c = order[qi];
            for a in 0..k {
                let t = cdelta[c][a];
                if live[t] && renum[t].is_none() {
                    renum[t] = Some(order.len());
                    order.push(t);
                }
            }
            qi += 1;
        }
        let mut transitions = Vec::new();
        let mut tau = Vec::with_capacity(order.len());
        for (new_c, &old_c) in order.iter().enumerate() {
            tau.push(ctau[old_c].clone());
            for a in 0..k {
                let t = cdelta[old_c][a];
                if let Some(new_t) = renum[t] {
                    transitions.push((new_c, a, new_t));
                }
            }
        }
        Dfao::new(
            self.multi.clone(),
            self.tag.clone(),
            order.len(),
            0,
            &transitions,
            tau,
        )
        .unwrap()
    }

    /// The regular sequence generated by this machine: after zero
    /// completion, λ marks the initial state, μ carries the transition
    /// indicators and γ the outputs.
    pub fn to_regular_sequence(&self) -> Result<RegularSequence> {
        let z = self.complete_with_zero();
        let n = z.num_states();
        let tag = z.tag.clone();
        let alphabet = z.alphabet().clone();
        let mut lambda = Matrix::zero(tag.clone(), 1, n);
        lambda.set(0, z.initial, tag.one());
        let mut gamma = Matrix::zero(tag.clone(), n, 1);
        for (q, v) in z.tau.iter().enumerate() {
            gamma.set(q, 0, v.clone());
        }
        let mut mu = vec![Matrix::zero(tag.clone(), n, n); alphabet.len()];
        for (p, a, q) in z.transitions() {
            mu[a].set(p, q, tag.one());
        }
        let series = LinRep::new(tag, alphabet, lambda, mu, gamma)?;
        Ok(RegularSequence::from_invariant_series(
            self.multi.clone(),
            series,
        ))
    }
}

/// Builds a machine generating a regular sequence with a finite kernel.
///
/// States of the intermediate machine are pairs of a right quotient of the
/// numeration language (a subset of the states of its minimal automaton)
/// and a kernel element up to observational equivalence; the intermediate
/// machine reads representations reversed, so the result is reversed once
/// more before returning. No final minimization is applied.
pub fn kernel_to_dfao(f: &RegularSequence, budget: usize) -> Result<Dfao> {
    if !f.multi().is_prefix_closed() {
        return Err(Error::NotPrefixClosed);
    }
    let tag = f.tag().clone();
    let multi = f.multi().clone();
    let k = multi.alphabet().len();
    let series = f.series();

    // Forward observation rows: all distinct λμ(u).
    let mut rows: Vec<Vec<SemiringValue>> = Vec::new();
    let mut seen: HashSet<Vec<SemiringValue>> = HashSet::new();
    let mut queue = VecDeque::from([row_of(series.lambda())]);
    while let Some(v) = queue.pop_front() {
        if !seen.insert(v.clone()) {
            continue;
        }
        if rows.len() >= budget {
            return Err(Error::BudgetExceeded {
                budget,
                during: "kernel is not finite within budget (forward rows)".into(),
            });
        }
        rows.push(v.clone());
        for a in 0..k {
            queue.push_back(row_mul(&tag, &v, series.mu(a))?);
        }
    }
    let observe = |col: &[SemiringValue]| -> Result<Vec<SemiringValue>> {
        let gamma_like = Matrix::from_rows(
            tag.clone(),
            col.iter().map(|v| vec![v.clone()]).collect(),
        )?;
        rows.iter().map(|r| dot(&tag, r, &gamma_like)).collect()
    };

    // Minimal complete automaton of the numeration language; right
    // quotients of the language are tracked as final-state sets.
    let lang = multi.language().minimize().complete();
    let m = lang.num_states();
    let lambda_row = row_of(series.lambda());

    type Key = (Vec<usize>, Vec<SemiringValue>);
    let f0: Vec<usize> = (0..m).filter(|&q| lang.is_final(q)).collect();
    let col0 = col_of(series.gamma());
    let start: Key = (f0.clone(), observe(&col0)?);
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut cols: Vec<Vec<SemiringValue>> = vec![col0];
    let mut fsets: Vec<Vec<usize>> = vec![f0];
    index.insert(start, 0);
    let mut transitions = Vec::new();
    let mut tau = Vec::new();
    let mut i = 0;
    while i < cols.len() {
        if cols.len() > budget {
            return Err(Error::BudgetExceeded {
                budget,
                during: "kernel is not finite within budget (pair machine)".into(),
            });
        }
        let fset = fsets[i].clone();
        let col = cols[i].clone();
        let in_lang = fset.binary_search(&lang.initial()).is_ok();
        tau.push(if in_lang {
            let gamma_like =
                Matrix::from_rows(tag.clone(), col.iter().map(|v| vec![v.clone()]).collect())?;
            dot(&tag, &lambda_row, &gamma_like)?
        } else {
            tag.zero()
        });
        let in_f: Vec<bool> = {
            let mut b = vec![false; m];
            for &q in &fset {
                b[q] = true;
            }
            b
        };
        for a in 0..k {
            let next_f: Vec<usize> = (0..m)
                .filter(|&q| in_f[lang.step(q, a).expect("complete")])
                .collect();
            let next_col = col_mul(&tag, series.mu(a), &col)?;
            let key: Key = (next_f.clone(), observe(&next_col)?);
            let len = index.len();
            let id = *index.entry(key).or_insert_with(|| {
                fsets.push(next_f);
                cols.push(next_col);
                len
            });
            transitions.push((i, a, id));
        }
        i += 1;
    }
    let reversed = Dfao::new(multi, tag, cols.len(), 0, &transitions, tau)?;
    reversed.reverse()
}

/// The machine generating f mod m, obtained by reducing the linear
/// representation modulo m and running the kernel construction; the
/// result is minimized.
pub fn mod_m(f: &RegularSequence, m: u64) -> Result<Dfao> {
    if m < 2 {
        return Err(Error::Parse("modulus must be at least 2".into()));
    }
    match f.tag() {
        SemiringTag::Nat | SemiringTag::Int | SemiringTag::IntMod(_) => {}
        t => {
            return Err(Error::UnsupportedSemiring {
                tag: t.name(),
                hint: "modular reduction needs integer coefficients".into(),
            })
        }
    }
    let reduced = f.convert(&SemiringTag::int_mod(m))?;
    let dfao = kernel_to_dfao(&reduced, crate::default_budget())?;
    Ok(dfao.minimize())
}
