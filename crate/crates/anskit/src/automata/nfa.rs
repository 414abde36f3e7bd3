use std::collections::{BTreeSet, HashMap};

use super::{Alphabet, Dfa};

/// A nondeterministic automaton with ε-moves, the intermediate form of
/// projections and reversals.
#[derive(Debug, Clone)]
pub struct Nfa {
    alphabet: Alphabet,
    num_states: usize,
    initials: BTreeSet<usize>,
    finals: BTreeSet<usize>,
    trans: Vec<HashMap<usize, BTreeSet<usize>>>,
    eps: Vec<BTreeSet<usize>>,
}

impl Nfa {
    pub fn new(alphabet: Alphabet, num_states: usize) -> Nfa {
        Nfa {
            alphabet,
            num_states,
            initials: BTreeSet::new(),
            finals: BTreeSet::new(),
            trans: vec![HashMap::new(); num_states],
            eps: vec![BTreeSet::new(); num_states],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn add_state(&mut self) -> usize {
        self.num_states += 1;
        self.trans.push(HashMap::new());
        self.eps.push(BTreeSet::new());
        self.num_states - 1
    }

    pub fn add_initial(&mut self, q: usize) {
        self.initials.insert(q);
    }

    pub fn add_final(&mut self, q: usize) {
        self.finals.insert(q);
    }

    pub fn add_transition(&mut self, p: usize, a: usize, q: usize) {
        self.trans[p].entry(a).or_default().insert(q);
    }

    pub fn add_epsilon(&mut self, p: usize, q: usize) {
        if p != q {
            self.eps[p].insert(q);
        }
    }

    fn eps_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if out.insert(t) {
                    stack.push(t);
                }
            }
        }
        out
    }

    /// Subset construction with ε-closure; the result is trimmed and in
    /// canonical numbering.
    pub fn determinize(&self) -> Dfa {
        let k = self.alphabet.len();
        let start = self.eps_closure(&self.initials);
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut order: Vec<BTreeSet<usize>> = Vec::new();
        index.insert(start.clone(), 0);
        order.push(start);
        let mut delta: Vec<Vec<Option<u32>>> = Vec::new();
        let mut finals: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let cur = order[i].clone();
            if cur.iter().any(|q| self.finals.contains(q)) {
                finals.push(i);
            }
            let mut row = vec![None; k];
            for a in 0..k {
                let mut next = BTreeSet::new();
                for &q in &cur {
                    if let Some(ts) = self.trans[q].get(&a) {
                        next.extend(ts.iter().copied());
                    }
                }
                if next.is_empty() {
                    continue;
                }
                let next = self.eps_closure(&next);
                let len = index.len();
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    order.push(next);
                    len
                });
                row[a] = Some(id as u32);
            }
            delta.push(row);
            i += 1;
        }
        let transitions: Vec<(usize, usize, usize)> = delta
            .iter()
            .enumerate()
            .flat_map(|(p, row)| {
                row.iter()
                    .enumerate()
                    .filter_map(move |(a, t)| t.map(|q| (p, a, q as usize)))
            })
            .collect();
        Dfa::from_parts(self.alphabet.clone(), order.len(), 0, &finals, &transitions)
            .expect("subset construction is well formed")
            .trim()
    }
}
