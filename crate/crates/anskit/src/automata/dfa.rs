use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{Alphabet, Letter, Nfa};
use crate::error::{Error, Result};

/// A deterministic finite automaton with a possibly partial transition
/// table. Missing transitions reject.
#[derive(Debug, Clone)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: usize,
    finals: Vec<bool>,
    /// `delta[state][letter]`.
    delta: Vec<Vec<Option<u32>>>,
}

impl Dfa {
    pub fn from_parts(
        alphabet: Alphabet,
        num_states: usize,
        initial: usize,
        finals: &[usize],
        transitions: &[(usize, usize, usize)],
    ) -> Result<Dfa> {
        if num_states == 0 || initial >= num_states {
            return Err(Error::InvalidDocument(
                "automaton needs at least an initial state".into(),
            ));
        }
        let mut fin = vec![false; num_states];
        for &f in finals {
            if f >= num_states {
                return Err(Error::InvalidDocument(format!("final state {f} out of range")));
            }
            fin[f] = true;
        }
        let mut delta = vec![vec![None; alphabet.len()]; num_states];
        for &(p, a, q) in transitions {
            if p >= num_states || q >= num_states || a >= alphabet.len() {
                return Err(Error::InvalidDocument(format!(
                    "transition ({p},{a},{q}) out of range"
                )));
            }
            if let Some(old) = delta[p][a] {
                if old as usize != q {
                    return Err(Error::InvalidDocument(format!(
                        "nondeterministic transitions from state {p} on letter {a}"
                    )));
                }
            }
            delta[p][a] = Some(q as u32);
        }
        Ok(Dfa {
            alphabet,
            initial,
            finals: fin,
            delta,
        })
    }

    /// The automaton with a single non-accepting state: the empty language.
    pub fn empty(alphabet: Alphabet) -> Dfa {
        Dfa {
            alphabet,
            initial: 0,
            finals: vec![false],
            delta: vec![vec![None; 0]; 1],
        }
        .fix_width()
    }

    /// Accepts every word over the alphabet.
    pub fn universal(alphabet: Alphabet) -> Dfa {
        let k = alphabet.len();
        Dfa {
            alphabet,
            initial: 0,
            finals: vec![true],
            delta: vec![vec![Some(0); k]],
        }
    }

    /// Accepts exactly the given word.
    pub fn single_word(alphabet: Alphabet, word: &[usize]) -> Dfa {
        let n = word.len() + 1;
        let mut delta = vec![vec![None; alphabet.len()]; n];
        for (i, &a) in word.iter().enumerate() {
            delta[i][a] = Some((i + 1) as u32);
        }
        let mut finals = vec![false; n];
        finals[n - 1] = true;
        Dfa {
            alphabet,
            initial: 0,
            finals,
            delta,
        }
    }

    fn fix_width(mut self) -> Dfa {
        let k = self.alphabet.len();
        for row in &mut self.delta {
            row.resize(k, None);
        }
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn num_states(&self) -> usize {
        self.delta.len()
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }
    pub fn final_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.finals[q]).collect()
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

    /// Runs the automaton from `q` over letter ids; `None` when the run dies.
    pub fn run_ids(&self, q: usize, word: &[usize]) -> Option<usize> {
        let mut cur = q;
        for &a in word {
            cur = self.step(cur, a)?;
        }
        Some(cur)
    }

    pub fn accepts_ids(&self, word: &[usize]) -> bool {
        self.run_ids(self.initial, word)
            .map(|q| self.finals[q])
            .unwrap_or(false)
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        match self.alphabet.encode(word) {
            Ok(ids) => self.accepts_ids(&ids),
            Err(_) => false,
        }
    }

    fn check_alphabet(&self, other: &Dfa) -> Result<()> {
        if !self.alphabet.same_as(&other.alphabet) {
            return Err(Error::AlphabetMismatch(
                "operands use different alphabets".into(),
            ));
        }
        Ok(())
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            for a in 0..self.alphabet.len() {
                if let Some(t) = self.step(q, a) {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    fn co_accessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (p, a, q) in self.transitions() {
            let _ = a;
            rev[q].push(p);
        }
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&q| self.finals[q]).collect();
        for &q in &queue {
            seen[q] = true;
        }
        while let Some(q) = queue.pop_front() {
            for &p in &rev[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// States that are both reachable and able to reach a final state.
    pub fn useful_states(&self) -> Vec<bool> {
        let r = self.reachable();
        let c = self.co_accessible();
        r.iter().zip(&c).map(|(&a, &b)| a && b).collect()
    }

    /// Drops useless states and renumbers the rest in breadth-first
    /// discovery order (letters visited in alphabet order), which makes the
    /// state numbering canonical for a given language and alphabet.
    pub fn trim(&self) -> Dfa {
        let useful = self.useful_states();
        if !useful[self.initial] {
            return Dfa::empty(self.alphabet.clone());
        }
        let n = self.num_states();
        let mut renum: Vec<Option<usize>> = vec![None; n];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        renum[self.initial] = Some(0);
        order.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for a in 0..self.alphabet.len() {
                if let Some(t) = self.step(q, a) {
                    if useful[t] && renum[t].is_none() {
                        renum[t] = Some(order.len());
                        order.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }
        let m = order.len();
        let mut delta = vec![vec![None; self.alphabet.len()]; m];
        let mut finals = vec![false; m];
        for (new_p, &old_p) in order.iter().enumerate() {
            finals[new_p] = self.finals[old_p];
            for a in 0..self.alphabet.len() {
                if let Some(t) = self.step(old_p, a) {
                    if let Some(new_t) = renum[t] {
                        delta[new_p][a] = Some(new_t as u32);
                    }
                }
            }
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            finals,
            delta,
        }
    }

    /// Totalizes the transition table, adding a sink when needed. Returns
    /// the completed automaton (sink is the last state if one was added).
    pub fn complete(&self) -> Dfa {
        let n = self.num_states();
        let needs = self
            .delta
            .iter()
            .any(|row| row.iter().any(|t| t.is_none()));
        if !needs {
            return self.clone();
        }
        let mut out = self.clone();
        out.finals.push(false);
        out.delta.push(vec![Some(n as u32); self.alphabet.len()]);
        for row in out.delta.iter_mut().take(n) {
            for t in row.iter_mut() {
                if t.is_none() {
                    *t = Some(n as u32);
                }
            }
        }
        out
    }

    /// Moore partition refinement on the completed automaton, then trim.
    /// The result is the unique minimal trimmed DFA in canonical numbering.
    pub fn minimize(&self) -> Dfa {
        let c = self.trim().complete();
        let n = c.num_states();
        let k = c.alphabet.len();
        let mut class: Vec<usize> = c.finals.iter().map(|&f| usize::from(f)).collect();
        loop {
            let mut sig_map: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for q in 0..n {
                let sig: Vec<usize> = (0..k)
                    .map(|a| class[c.step(q, a).expect("complete")])
                    .collect();
                let len = sig_map.len();
                let id = *sig_map.entry((class[q], sig)).or_insert(len);
                next[q] = id;
            }
            if next == class {
                break;
            }
            class = next;
        }
        let num_classes = class.iter().max().map(|m| m + 1).unwrap_or(0);
        let mut delta = vec![vec![None; k]; num_classes];
        let mut finals = vec![false; num_classes];
        for q in 0..n {
            finals[class[q]] = c.finals[q];
            for a in 0..k {
                delta[class[q]][a] = Some(class[c.step(q, a).unwrap()] as u32);
            }
        }
        Dfa {
            alphabet: c.alphabet.clone(),
            initial: class[c.initial],
            finals,
            delta,
        }
        .trim()
    }

    /// Product construction combining finality with `f`.
    fn product(&self, other: &Dfa, f: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        self.check_alphabet(other)?;
        let a = self.complete();
        let b = other.complete();
        let k = a.alphabet.len();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut order = Vec::new();
        let start = (a.initial, b.initial);
        index.insert(start, 0);
        order.push(start);
        let mut delta: Vec<Vec<Option<u32>>> = Vec::new();
        let mut finals = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (p, q) = order[i];
            finals.push(f(a.finals[p], b.finals[q]));
            let mut row = vec![None; k];
            for l in 0..k {
                let t = (a.step(p, l).unwrap(), b.step(q, l).unwrap());
                let len = index.len();
                let id = *index.entry(t).or_insert_with(|| {
                    order.push(t);
                    len
                });
                row[l] = Some(id as u32);
            }
            delta.push(row);
            i += 1;
        }
        Ok(Dfa {
            alphabet: a.alphabet.clone(),
            initial: 0,
            finals,
            delta,
        }
        .trim())
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |x, y| x && y)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |x, y| x || y)
    }

    pub fn difference(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |x, y| x && !y)
    }

    /// Complement with respect to the full alphabet.
    pub fn complement(&self) -> Dfa {
        let mut c = self.complete();
        for f in c.finals.iter_mut() {
            *f = !*f;
        }
        c.trim()
    }

    pub fn is_empty_language(&self) -> bool {
        let t = self.trim();
        !t.finals.iter().any(|&f| f)
    }

    /// True when the language is infinite: the trimmed automaton has a
    /// cycle through a useful state.
    pub fn is_infinite(&self) -> bool {
        let t = self.trim();
        if t.is_empty_language() {
            return false;
        }
        // DFS cycle detection on useful states.
        let n = t.num_states();
        let mut state = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
        let mut stack = vec![(t.initial, 0usize)];
        state[t.initial] = 1;
        while let Some(&mut (q, ref mut next)) = stack.last_mut() {
            if *next < t.alphabet.len() {
                let a = *next;
                *next += 1;
                if let Some(to) = t.step(q, a) {
                    match state[to] {
                        0 => {
                            state[to] = 1;
                            stack.push((to, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                }
            } else {
                state[q] = 2;
                stack.pop();
            }
        }
        false
    }

    pub fn lang_equal(&self, other: &Dfa) -> Result<bool> {
        Ok(self.difference(other)?.is_empty_language()
            && other.difference(self)?.is_empty_language())
    }

    /// Accepts `{ u : uw ∈ L }`: finals are re-marked as the states from
    /// which `w` reaches a final state.
    pub fn right_quotient(&self, w: &[usize]) -> Dfa {
        let mut out = self.clone();
        for q in 0..self.num_states() {
            out.finals[q] = self
                .run_ids(q, w)
                .map(|t| self.finals[t])
                .unwrap_or(false);
        }
        out.trim()
    }

    /// Number of words of exactly the given length accepted when starting
    /// from `from`.
    pub fn count_words(&self, from: usize, length: usize) -> BigUint {
        let table = self.count_table(length);
        table[length][from].clone()
    }

    /// `table[l][q]` = number of accepted words of length exactly `l`
    /// starting from state `q`.
    pub fn count_table(&self, max_len: usize) -> Vec<Vec<BigUint>> {
        let n = self.num_states();
        let mut table = Vec::with_capacity(max_len + 1);
        table.push(
            (0..n)
                .map(|q| {
                    if self.finals[q] {
                        BigUint::one()
                    } else {
                        BigUint::zero()
                    }
                })
                .collect::<Vec<_>>(),
        );
        for l in 1..=max_len {
            let prev = &table[l - 1];
            let mut cur = vec![BigUint::zero(); n];
            for q in 0..n {
                let mut acc = BigUint::zero();
                for a in 0..self.alphabet.len() {
                    if let Some(t) = self.step(q, a) {
                        acc += &prev[t];
                    }
                }
                cur[q] = acc;
            }
            table.push(cur);
        }
        table
    }

    /// All accepted words (as letter-id vectors) in radix order, up to and
    /// including `max_len`. Intended for small slices and test oracles.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut layer: Vec<(usize, Vec<usize>)> = vec![(self.initial, Vec::new())];
        if self.finals[self.initial] {
            out.push(Vec::new());
        }
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (q, w) in &layer {
                for a in 0..self.alphabet.len() {
                    if let Some(t) = self.step(*q, a) {
                        let mut w2 = w.clone();
                        w2.push(a);
                        if self.finals[t] {
                            out.push(w2.clone());
                        }
                        next.push((t, w2));
                    }
                }
            }
            layer = next;
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// Enumerates the complete language when it is finite and has at most
    /// `limit` words.
    pub fn enumerate_finite(&self, limit: usize) -> Result<Vec<Vec<usize>>> {
        if self.is_infinite() {
            return Err(Error::InfiniteImage("language is infinite".into()));
        }
        let t = self.trim();
        // In a trimmed acyclic automaton accepted words are shorter than
        // the state count.
        let words = t.words_up_to(t.num_states());
        if words.len() > limit {
            return Err(Error::BudgetExceeded {
                budget: limit,
                during: "finite language enumeration".into(),
            });
        }
        Ok(words)
    }

    /// Rebuilds the automaton over a reordered copy of its alphabet.
    /// `order[k]` names the current letter id that becomes letter `k`.
    pub fn with_letter_order(&self, order: &[usize]) -> Result<Dfa> {
        let alphabet = self.alphabet.reorder(order)?;
        let mut delta = vec![vec![None; order.len()]; self.num_states()];
        for (new_a, &old_a) in order.iter().enumerate() {
            for p in 0..self.num_states() {
                delta[p][new_a] = self.delta[p][old_a];
            }
        }
        Ok(Dfa {
            alphabet,
            initial: self.initial,
            finals: self.finals.clone(),
            delta,
        })
    }

    /// Maps every letter through `f` into `target`. The map must be
    /// injective on this automaton's alphabet.
    pub fn map_letters(
        &self,
        target: &Alphabet,
        f: impl Fn(&Letter) -> Letter,
    ) -> Result<Dfa> {
        let mut seen = HashMap::new();
        let mut letter_map = vec![0usize; self.alphabet.len()];
        for (i, l) in self.alphabet.letters().iter().enumerate() {
            let img = f(l);
            let id = target.require_id(&img)?;
            if seen.insert(id, i).is_some() {
                return Err(Error::AlphabetMismatch(format!(
                    "letter map is not injective at {img}"
                )));
            }
            letter_map[i] = id;
        }
        let mut delta = vec![vec![None; target.len()]; self.num_states()];
        for (p, a, q) in self.transitions() {
            delta[p][letter_map[a]] = Some(q as u32);
        }
        Ok(Dfa {
            alphabet: target.clone(),
            initial: self.initial,
            finals: self.finals.clone(),
            delta,
        })
    }

    /// Permutes the tuple components of every letter. `perm[i]` gives the
    /// old component index that moves to position `i`.
    pub fn permute_tapes(&self, perm: &[usize], target: &Alphabet) -> Result<Dfa> {
        if perm.len() != self.alphabet.arity() {
            return Err(Error::TapeOutOfRange {
                index: perm.len(),
                arity: self.alphabet.arity(),
            });
        }
        self.map_letters(target, |l| l.project(perm))
    }

    /// Componentwise projection onto the kept tape indices. Transitions
    /// whose kept components equal `erase` become ε-moves of the resulting
    /// NFA. The target alphabet fixes the letter identity and order of the
    /// projected automaton.
    pub fn project_tapes(
        &self,
        keep: &[usize],
        erase: Option<&Letter>,
        target: &Alphabet,
    ) -> Result<Nfa> {
        for &i in keep {
            if i >= self.alphabet.arity() {
                return Err(Error::TapeOutOfRange {
                    index: i,
                    arity: self.alphabet.arity(),
                });
            }
        }
        if keep.is_empty() {
            return Err(Error::TapeOutOfRange {
                index: 0,
                arity: self.alphabet.arity(),
            });
        }
        let mut nfa = Nfa::new(target.clone(), self.num_states());
        nfa.add_initial(self.initial);
        for q in 0..self.num_states() {
            if self.finals[q] {
                nfa.add_final(q);
            }
        }
        for (p, a, q) in self.transitions() {
            let proj = self.alphabet.letter(a).project(keep);
            if erase.map(|e| *e == proj).unwrap_or(false) {
                nfa.add_epsilon(p, q);
            } else {
                let id = target.require_id(&proj)?;
                nfa.add_transition(p, id, q);
            }
        }
        Ok(nfa)
    }

    /// The reversal language automaton, as an NFA.
    pub fn reverse(&self) -> Nfa {
        let mut nfa = Nfa::new(self.alphabet.clone(), self.num_states());
        nfa.add_final(self.initial);
        for q in 0..self.num_states() {
            if self.finals[q] {
                nfa.add_initial(q);
            }
        }
        for (p, a, q) in self.transitions() {
            nfa.add_transition(q, a, p);
        }
        nfa
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// a*b* over {a,b}: 0 --a--> 0, 0 --b--> 1, 1 --b--> 1.
    pub(crate) fn ab_star() -> Dfa {
        let alphabet = Alphabet::from_strs(&["a", "b"]);
        Dfa::from_parts(alphabet, 2, 0, &[0, 1], &[(0, 0, 0), (0, 1, 1), (1, 1, 1)]).unwrap()
    }

    fn ids(d: &Dfa, s: &str) -> Vec<usize> {
        s.chars()
            .map(|c| d.alphabet().id_of(&Letter::scalar(&c.to_string())).unwrap())
            .collect()
    }

    #[test]
    fn ab_star_membership() {
        let d = ab_star();
        for (w, want) in [("", true), ("aab", true), ("ba", false), ("abab", false)] {
            assert_eq!(d.accepts_ids(&ids(&d, w)), want, "word {w:?}");
        }
    }

    #[test]
    fn minimize_is_idempotent_and_small() {
        let d = ab_star().minimize();
        assert_eq!(d.num_states(), 2);
        assert_eq!(d.minimize().num_states(), 2);
    }

    #[test]
    fn boolean_algebra_against_enumeration() {
        let d = ab_star();
        let comp = d.complement();
        let inter = d.intersect(&comp).unwrap();
        assert!(inter.is_empty_language());
        assert!(d.difference(&d).unwrap().is_empty_language());
        // Words up to length 4: membership in the union of L and its
        // complement covers everything.
        let u = d.union(&comp).unwrap();
        let all = Dfa::universal(d.alphabet().clone());
        assert!(u.lang_equal(&all).unwrap());
    }

    #[test]
    fn right_quotient_examples() {
        let d = ab_star();
        let b = ids(&d, "b");
        let q = d.right_quotient(&b);
        assert!(q.lang_equal(&d).unwrap(), "a*b* / b = a*b*");
        let eps: Vec<usize> = vec![];
        assert!(d.right_quotient(&eps).lang_equal(&d).unwrap());
        let ba = ids(&d, "ba");
        assert!(d.right_quotient(&ba).is_empty_language());
    }

    #[test]
    fn count_words_matches_formula() {
        // v(l) = cumulative count = (l+1)(l+2)/2 for a*b*.
        let d = ab_star();
        let mut cum = BigUint::zero();
        for l in 0..=6usize {
            cum += d.count_words(d.initial(), l);
            let expect = BigUint::from((l + 1) * (l + 2) / 2);
            assert_eq!(cum, expect, "length {l}");
        }
    }

    #[test]
    fn count_words_against_enumeration() {
        let d = ab_star();
        let words = d.words_up_to(6);
        for l in 0..=6usize {
            let n = words.iter().filter(|w| w.len() == l).count();
            assert_eq!(d.count_words(d.initial(), l), BigUint::from(n));
        }
    }

    #[test]
    fn infinite_and_empty_checks() {
        let d = ab_star();
        assert!(d.is_infinite());
        assert!(!d.is_empty_language());
        let single = Dfa::single_word(d.alphabet().clone(), &ids(&d, "ab"));
        assert!(!single.is_infinite());
        assert!(Dfa::empty(d.alphabet().clone()).is_empty_language());
    }
}
