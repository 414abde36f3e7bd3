//! Abstract numeration systems.
//!
//! A system is an infinite regular language over an ordered alphabet; the
//! n-th word of the language in radix order represents the integer n.
//! Vectors of integers are represented by tuples of words, left-padded with
//! `#` to a common length, read as words over a product alphabet that
//! excludes the all-`#` tuple.

use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::automata::{Alphabet, Dfa, Letter, PAD};
use crate::error::{Error, Result};

/// Radix-order ranking and unranking over a fixed DFA, with a shared
/// per-(length, state) count table. All operations are exact.
#[derive(Debug)]
pub struct RadixRanker {
    dfa: Dfa,
    /// `cache[l][q]` counts accepted words of length l from state q.
    cache: Mutex<Vec<Vec<BigUint>>>,
}

impl RadixRanker {
    pub fn new(dfa: Dfa) -> RadixRanker {
        RadixRanker {
            dfa,
            cache: Mutex::new(Vec::new()),
        }
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    fn ensure(&self, len: usize) -> Vec<Vec<BigUint>> {
        let mut cache = self.cache.lock().unwrap();
        let n = self.dfa.num_states();
        if cache.is_empty() {
            cache.push(
                (0..n)
                    .map(|q| {
                        if self.dfa.is_final(q) {
                            BigUint::one()
                        } else {
                            BigUint::zero()
                        }
                    })
                    .collect(),
            );
        }
        while cache.len() <= len {
            let prev = cache.last().unwrap();
            let mut cur = vec![BigUint::zero(); n];
            for (q, slot) in cur.iter_mut().enumerate() {
                let mut acc = BigUint::zero();
                for a in 0..self.dfa.alphabet().len() {
                    if let Some(t) = self.dfa.step(q, a) {
                        acc += &prev[t];
                    }
                }
                *slot = acc;
            }
            cache.push(cur);
        }
        cache[..=len].to_vec()
    }

    /// Number of accepted words of length exactly `len`.
    pub fn count_exact(&self, len: usize) -> BigUint {
        let table = self.ensure(len);
        table[len][self.dfa.initial()].clone()
    }

    /// The index of an accepted word in radix order.
    pub fn rank(&self, word: &[usize]) -> Result<BigUint> {
        if !self.dfa.accepts_ids(word) {
            return Err(Error::InvalidWord(
                "word is not in the numeration language".into(),
            ));
        }
        let table = self.ensure(word.len());
        let mut acc = BigUint::zero();
        for l in 0..word.len() {
            acc += &table[l][self.dfa.initial()];
        }
        let mut q = self.dfa.initial();
        for (i, &a) in word.iter().enumerate() {
            let rem = word.len() - i - 1;
            for b in 0..a {
                if let Some(t) = self.dfa.step(q, b) {
                    acc += &table[rem][t];
                }
            }
            q = self.dfa.step(q, a).expect("word accepted above");
        }
        Ok(acc)
    }

    /// The n-th accepted word in radix order.
    pub fn unrank(&self, n: &BigUint) -> Vec<usize> {
        let mut len = 0usize;
        let mut rest = n.clone();
        loop {
            let c = self.count_exact(len);
            if rest < c {
                break;
            }
            rest -= c;
            len += 1;
        }
        let table = self.ensure(len);
        let mut word = Vec::with_capacity(len);
        let mut q = self.dfa.initial();
        for i in 0..len {
            let rem = len - i - 1;
            for a in 0..self.dfa.alphabet().len() {
                if let Some(t) = self.dfa.step(q, a) {
                    let c = &table[rem][t];
                    if rest < *c {
                        word.push(a);
                        q = t;
                        break;
                    }
                    rest -= c;
                }
            }
        }
        debug_assert_eq!(word.len(), len);
        word
    }
}

#[derive(Debug)]
struct AnsInner {
    dfa: Dfa,
    ranker: RadixRanker,
    prefix_closed: OnceLock<bool>,
}

/// An abstract numeration system: an infinite regular language over an
/// ordered one-tape alphabet, ranked in radix order.
#[derive(Debug, Clone)]
pub struct Ans(Arc<AnsInner>);

impl Ans {
    pub fn new(language: Dfa) -> Result<Ans> {
        if language.alphabet().arity() != 1 {
            return Err(Error::AlphabetMismatch(
                "numeration systems use one-tape alphabets".into(),
            ));
        }
        let dfa = language.trim();
        if !dfa.is_infinite() {
            return Err(Error::FiniteLanguage);
        }
        Ok(Ans(Arc::new(AnsInner {
            ranker: RadixRanker::new(dfa.clone()),
            dfa,
            prefix_closed: OnceLock::new(),
        })))
    }

    pub fn language(&self) -> &Dfa {
        &self.0.dfa
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.0.dfa.alphabet()
    }

    /// Scalar symbols of the alphabet, in order.
    pub fn symbols(&self) -> Vec<String> {
        self.alphabet()
            .letters()
            .iter()
            .map(|l| l.part(0).to_string())
            .collect()
    }

    /// The representation of n: the n-th word in radix order, as letter ids.
    pub fn rep(&self, n: &BigUint) -> Vec<usize> {
        self.0.ranker.unrank(n)
    }

    /// The value of a word of the numeration language.
    pub fn val(&self, word: &[usize]) -> Result<BigUint> {
        self.0.ranker.rank(word)
    }

    pub fn ranker(&self) -> &RadixRanker {
        &self.0.ranker
    }

    /// A language is prefix-closed exactly when every state of its trimmed
    /// minimal automaton is final.
    pub fn is_prefix_closed(&self) -> bool {
        *self.0.prefix_closed.get_or_init(|| {
            let m = self.0.dfa.minimize();
            (0..m.num_states()).all(|q| m.is_final(q))
        })
    }

    /// Formats a word of letter ids as a plain string of symbols.
    pub fn format_word(&self, word: &[usize]) -> String {
        word.iter()
            .map(|&a| self.alphabet().letter(a).part(0))
            .collect()
    }
}

/// Builds the canonical product alphabet over the given per-tape symbol
/// lists: every combination of a tape symbol or `#`, except the all-`#`
/// tuple, ordered lexicographically with `#` least on every tape.
pub fn product_alphabet(tape_symbols: &[Vec<String>]) -> Alphabet {
    let mut letters = vec![Vec::<String>::new()];
    for symbols in tape_symbols {
        let mut next = Vec::with_capacity(letters.len() * (symbols.len() + 1));
        for prefix in &letters {
            let mut with = |s: &str| {
                let mut p = prefix.clone();
                p.push(s.to_string());
                next.push(p);
            };
            with(PAD);
            for s in symbols {
                with(s);
            }
        }
        letters = next;
    }
    let letters: Vec<Letter> = letters
        .into_iter()
        .map(Letter::new)
        .filter(|l| !l.is_uniform(PAD))
        .collect();
    Alphabet::new(letters).expect("product alphabet is well formed")
}

/// The language of canonically `#`-padded tuples whose components, after
/// stripping the padding, belong to the respective component languages.
/// The component automata must be one-tape.
pub fn padded_product(components: &[&Dfa], alphabet: &Alphabet) -> Result<Dfa> {
    let d = components.len();
    if alphabet.arity() != d {
        return Err(Error::AlphabetMismatch(
            "alphabet arity must match component count".into(),
        ));
    }
    // Per tape: symbol -> component letter id.
    let mut symbol_ids: Vec<std::collections::HashMap<&str, usize>> = Vec::with_capacity(d);
    for dfa in components {
        let mut map = std::collections::HashMap::new();
        for (i, l) in dfa.alphabet().letters().iter().enumerate() {
            map.insert(l.part(0), i);
        }
        symbol_ids.push(map);
    }

    // A component is either still inside the leading padding or running.
    #[derive(Clone, PartialEq, Eq, Hash)]
    enum Comp {
        Pad,
        In(usize),
    }
    let start: Vec<Comp> = vec![Comp::Pad; d];
    let mut index = std::collections::HashMap::new();
    let mut order = vec![start.clone()];
    index.insert(start, 0usize);
    let mut delta: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut finals: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let cur = order[i].clone();
        let accepting = cur.iter().enumerate().all(|(t, c)| match c {
            Comp::Pad => components[t].is_final(components[t].initial()),
            Comp::In(q) => components[t].is_final(*q),
        });
        if accepting {
            finals.push(i);
        }
        let mut row: Vec<(usize, usize)> = Vec::new();
        'letters: for (a, letter) in alphabet.letters().iter().enumerate() {
            let mut next = Vec::with_capacity(d);
            for t in 0..d {
                let sym = letter.part(t);
                if sym == PAD {
                    match cur[t] {
                        Comp::Pad => next.push(Comp::Pad),
                        Comp::In(_) => continue 'letters,
                    }
                } else {
                    let Some(&lid) = symbol_ids[t].get(sym) else {
                        continue 'letters;
                    };
                    let from = match cur[t] {
                        Comp::Pad => components[t].initial(),
                        Comp::In(q) => q,
                    };
                    match components[t].step(from, lid) {
                        Some(q) => next.push(Comp::In(q)),
                        None => continue 'letters,
                    }
                }
            }
            let len = index.len();
            let id = *index.entry(next.clone()).or_insert_with(|| {
                order.push(next);
                len
            });
            row.push((a, id));
        }
        delta.push(row);
        i += 1;
    }
    let transitions: Vec<(usize, usize, usize)> = delta
        .iter()
        .enumerate()
        .flat_map(|(p, row)| row.iter().map(move |&(a, q)| (p, a, q)))
        .collect();
    Ok(
        Dfa::from_parts(alphabet.clone(), order.len(), 0, &finals, &transitions)?
            .trim(),
    )
}

#[derive(Debug)]
struct MultiAnsInner {
    systems: Vec<Ans>,
    alphabet: Alphabet,
    language: Dfa,
    prefix_closed: OnceLock<bool>,
}

/// A tuple of abstract numeration systems with the padded product
/// machinery: the product alphabet, the numeration language of padded
/// tuples and the mutually inverse representation and value maps.
#[derive(Debug, Clone)]
pub struct MultiAns(Arc<MultiAnsInner>);

impl MultiAns {
    pub fn new(systems: Vec<Ans>) -> Result<MultiAns> {
        if systems.is_empty() {
            return Err(Error::AlphabetMismatch(
                "a system needs at least one dimension".into(),
            ));
        }
        let tape_symbols: Vec<Vec<String>> = systems.iter().map(|s| s.symbols()).collect();
        let alphabet = product_alphabet(&tape_symbols);
        let components: Vec<&Dfa> = systems.iter().map(|s| s.language()).collect();
        let language = padded_product(&components, &alphabet)?;
        Ok(MultiAns(Arc::new(MultiAnsInner {
            systems,
            alphabet,
            language,
            prefix_closed: OnceLock::new(),
        })))
    }

    /// d identical copies of one system.
    pub fn power(system: &Ans, d: usize) -> Result<MultiAns> {
        MultiAns::new(vec![system.clone(); d])
    }

    pub fn dim(&self) -> usize {
        self.0.systems.len()
    }

    pub fn systems(&self) -> &[Ans] {
        &self.0.systems
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.0.alphabet
    }

    /// The numeration language of canonically padded tuples.
    pub fn language(&self) -> &Dfa {
        &self.0.language
    }

    /// The concatenated system on the disjoint union of the tapes.
    pub fn concat(&self, other: &MultiAns) -> Result<MultiAns> {
        let mut systems = self.0.systems.clone();
        systems.extend(other.0.systems.iter().cloned());
        MultiAns::new(systems)
    }

    /// The system with the given tapes removed.
    pub fn without_tapes(&self, drop: &[usize]) -> Result<MultiAns> {
        let keep: Vec<Ans> = self
            .0
            .systems
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, s)| s.clone())
            .collect();
        MultiAns::new(keep)
    }

    /// True when every component language is prefix-closed.
    pub fn is_prefix_closed(&self) -> bool {
        *self
            .0
            .prefix_closed
            .get_or_init(|| self.0.systems.iter().all(|s| s.is_prefix_closed()))
    }

    /// The padded representation of a vector, as product-alphabet ids.
    pub fn rep(&self, n: &[BigUint]) -> Result<Vec<usize>> {
        if n.len() != self.dim() {
            return Err(Error::BlockMismatch(format!(
                "expected {} components, got {}",
                self.dim(),
                n.len()
            )));
        }
        let comps: Vec<Vec<usize>> = self
            .0
            .systems
            .iter()
            .zip(n)
            .map(|(s, v)| s.rep(v))
            .collect();
        let len = comps.iter().map(|w| w.len()).max().unwrap_or(0);
        let mut out = Vec::with_capacity(len);
        for pos in 0..len {
            let parts: Vec<String> = comps
                .iter()
                .zip(&self.0.systems)
                .map(|(w, s)| {
                    let offset = len - w.len();
                    if pos < offset {
                        PAD.to_string()
                    } else {
                        s.alphabet().letter(w[pos - offset]).part(0).to_string()
                    }
                })
                .collect();
            let letter = Letter::new(parts);
            out.push(self.0.alphabet.require_id(&letter)?);
        }
        Ok(out)
    }

    /// The value of a word of the numeration language; rejects anything
    /// outside it, including non-canonical padding.
    pub fn val(&self, word: &[usize]) -> Result<Vec<BigUint>> {
        if !self.0.language.accepts_ids(word) {
            return Err(Error::InvalidWord(
                "word is not in the numeration language".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.dim());
        for (t, sys) in self.0.systems.iter().enumerate() {
            let mut comp = Vec::new();
            for &a in word {
                let sym = self.0.alphabet.letter(a).part(t);
                if sym != PAD {
                    comp.push(sys.alphabet().require_id(&Letter::scalar(sym))?);
                }
            }
            out.push(sys.val(&comp)?);
        }
        Ok(out)
    }

    /// Formats a word as comma-separated component strings.
    pub fn format_word(&self, word: &[usize]) -> String {
        (0..self.dim())
            .map(|t| {
                word.iter()
                    .map(|&a| self.0.alphabet.letter(a).part(t))
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses comma-separated component strings into a word. Components
    /// must come already padded to a common length.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>> {
        let comps: Vec<&str> = if self.dim() == 1 {
            vec![text]
        } else {
            text.split(',').collect()
        };
        if comps.len() != self.dim() {
            return Err(Error::InvalidWord(format!(
                "expected {} comma-separated components",
                self.dim()
            )));
        }
        let mut tokenized: Vec<Vec<String>> = Vec::with_capacity(self.dim());
        for (t, comp) in comps.iter().enumerate() {
            let mut symbols: Vec<String> = self.0.systems[t].symbols();
            symbols.push(PAD.to_string());
            symbols.sort_by_key(|s| std::cmp::Reverse(s.len()));
            let mut rest = *comp;
            let mut toks = Vec::new();
            while !rest.is_empty() {
                let Some(s) = symbols.iter().find(|s| rest.starts_with(s.as_str())) else {
                    return Err(Error::InvalidWord(format!("cannot tokenize {comp:?}")));
                };
                toks.push(s.clone());
                rest = &rest[s.len()..];
            }
            tokenized.push(toks);
        }
        let len = tokenized[0].len();
        if tokenized.iter().any(|t| t.len() != len) {
            return Err(Error::InvalidWord(
                "components must have equal length".into(),
            ));
        }
        let mut out = Vec::with_capacity(len);
        for pos in 0..len {
            let letter = Letter::new(tokenized.iter().map(|t| t[pos].clone()).collect());
            out.push(self.0.alphabet.require_id(&letter)?);
        }
        Ok(out)
    }
}

/// A total order on ℕ^d induced by the radix order of padded
/// representations under an explicit product-letter order.
#[derive(Debug, Clone)]
pub struct EnumOrder {
    multi: MultiAns,
    /// `order[k]` is the product-alphabet id of the k-th smallest letter.
    order: Vec<usize>,
    ranker: Arc<RadixRanker>,
    /// Inverse permutation: alphabet id -> position in the order.
    position: Vec<usize>,
}

impl EnumOrder {
    /// The lexicographic letter order: the product alphabet of a
    /// [`MultiAns`] is already sorted lexicographically with `#` least.
    pub fn lexicographic(multi: MultiAns) -> EnumOrder {
        let order: Vec<usize> = (0..multi.alphabet().len()).collect();
        EnumOrder::with_order(multi, order).expect("identity order is valid")
    }

    /// An explicit total order on the product letters.
    pub fn with_order(multi: MultiAns, order: Vec<usize>) -> Result<EnumOrder> {
        let k = multi.alphabet().len();
        if order.len() != k {
            return Err(Error::AlphabetMismatch(
                "letter order must cover the whole alphabet".into(),
            ));
        }
        let mut position = vec![usize::MAX; k];
        for (pos, &id) in order.iter().enumerate() {
            if id >= k || position[id] != usize::MAX {
                return Err(Error::AlphabetMismatch(
                    "letter order must be a permutation".into(),
                ));
            }
            position[id] = pos;
        }
        let reordered = multi.language().with_letter_order(&order)?;
        Ok(EnumOrder {
            multi,
            order,
            ranker: Arc::new(RadixRanker::new(reordered)),
            position,
        })
    }

    pub fn multi(&self) -> &MultiAns {
        &self.multi
    }

    /// Order key of a product letter: position in the letter order, with
    /// the all-`#` tuple (None) least.
    fn key(&self, id: Option<usize>) -> usize {
        match id {
            None => 0,
            Some(a) => 1 + self.position[a],
        }
    }

    /// The index of a vector in the induced total order on ℕ^d.
    pub fn index(&self, n: &[BigUint]) -> Result<BigUint> {
        let word = self.multi.rep(n)?;
        let reordered: Vec<usize> = word.iter().map(|&a| self.position[a]).collect();
        self.ranker.rank(&reordered)
    }

    /// The i-th vector in the induced total order.
    pub fn unindex(&self, i: &BigUint) -> Result<Vec<BigUint>> {
        let reordered = self.ranker.unrank(i);
        let word: Vec<usize> = reordered.iter().map(|&p| self.order[p]).collect();
        self.multi.val(&word)
    }

    /// A DFA over 2d-tuples recognizing the padded representations of the
    /// pairs (m, n) whose enumeration indices satisfy the relation. Built
    /// as a three-state comparator with the all-`#` tuple least,
    /// intersected with the pair numeration language.
    pub fn order_predicate(&self, rel: OrderRel) -> Result<Dfa> {
        let pair = self.multi.concat(&self.multi)?;
        let d = self.multi.dim();
        let split: Vec<usize> = (0..d).collect();
        let split_hi: Vec<usize> = (d..2 * d).collect();
        let alphabet = pair.alphabet().clone();
        let mut transitions = Vec::new();
        for (a, letter) in alphabet.letters().iter().enumerate() {
            let lo = letter.project(&split);
            let hi = letter.project(&split_hi);
            let klo = self.key(self.multi.alphabet().id_of(&lo));
            let khi = self.key(self.multi.alphabet().id_of(&hi));
            let from_eq = match klo.cmp(&khi) {
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => 2,
            };
            transitions.push((0, a, from_eq));
            transitions.push((1, a, 1));
            transitions.push((2, a, 2));
        }
        let final_state = match rel {
            OrderRel::Eq => 0,
            OrderRel::Gt => 1,
            OrderRel::Lt => 2,
        };
        let comparator = Dfa::from_parts(alphabet, 3, 0, &[final_state], &transitions)?;
        comparator.intersect(pair.language())
    }
}

/// Comparison selectors for [`EnumOrder::order_predicate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderRel {
    Eq,
    Gt,
    Lt,
}

/// The base-b positional system: nonzero leading digit or the empty word.
pub fn integer_base(b: u32) -> Result<Ans> {
    if b < 2 {
        return Err(Error::Parse("base must be at least 2".into()));
    }
    let symbols: Vec<String> = (0..b).map(|d| d.to_string()).collect();
    let refs: Vec<&str> = symbols.iter().map(|s| s.as_str()).collect();
    let alphabet = Alphabet::from_strs(&refs);
    let mut transitions = Vec::new();
    for d in 1..b as usize {
        transitions.push((0, d, 1));
    }
    for d in 0..b as usize {
        transitions.push((1, d, 1));
    }
    Ans::new(Dfa::from_parts(alphabet, 2, 0, &[0, 1], &transitions)?)
}

/// The Fibonacci (Zeckendorf) system: words over 0 < 1 starting with 1 and
/// avoiding consecutive 1s, plus the empty word.
pub fn zeckendorf() -> Ans {
    let alphabet = Alphabet::from_strs(&["0", "1"]);
    let dfa = Dfa::from_parts(
        alphabet,
        3,
        0,
        &[0, 1, 2],
        &[(0, 1, 1), (1, 0, 2), (2, 0, 2), (2, 1, 1)],
    )
    .unwrap();
    Ans::new(dfa).unwrap()
}

/// The unary system c*.
pub fn unary() -> Ans {
    let alphabet = Alphabet::from_strs(&["c"]);
    let dfa = Dfa::from_parts(alphabet, 1, 0, &[0], &[(0, 0, 0)]).unwrap();
    Ans::new(dfa).unwrap()
}

/// The system on a*b* with a < b.
pub fn ab_star() -> Ans {
    let alphabet = Alphabet::from_strs(&["a", "b"]);
    let dfa =
        Dfa::from_parts(alphabet, 2, 0, &[0, 1], &[(0, 0, 0), (0, 1, 1), (1, 1, 1)]).unwrap();
    Ans::new(dfa).unwrap()
}

/// Builds a system from an arbitrary one-tape automaton; the alphabet
/// order of the automaton is the digit order.
pub fn from_dfa(dfa: Dfa) -> Result<Ans> {
    Ans::new(dfa)
}

/// Resolves a named preset: `base:<b>`, `zeckendorf`, `unary` or `ab-star`.
pub fn preset(name: &str) -> Result<Ans> {
    match name {
        "zeckendorf" => Ok(zeckendorf()),
        "unary" => Ok(unary()),
        "ab-star" => Ok(ab_star()),
        _ => {
            if let Some(b) = name.strip_prefix("base:") {
                let b: u32 = b
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad base in {name:?}")))?;
                integer_base(b)
            } else {
                Err(Error::Parse(format!("unknown system preset {name:?}")))
            }
        }
    }
}

/// Base-b digits of n, most significant first; empty for 0.
fn base_digits(b: u32, n: &BigUint) -> Vec<u32> {
    let mut digits = Vec::new();
    let mut rest = n.clone();
    let base = BigUint::from(b);
    while !rest.is_zero() {
        let d = (&rest % &base).to_u32_digits();
        digits.push(d.first().copied().unwrap_or(0));
        rest /= &base;
    }
    digits.reverse();
    digits
}

/// The closed-formula enumeration index for d copies of the base-b system
/// under the lexicographic letter order: the perfect shuffle of the padded
/// representations, with `#` read as digit 0, evaluated in base b.
pub fn shuffle_value(b: u32, n: &[BigUint]) -> Result<BigUint> {
    if b < 2 {
        return Err(Error::Parse("base must be at least 2".into()));
    }
    let digit_words: Vec<Vec<u32>> = n.iter().map(|x| base_digits(b, x)).collect();
    let len = digit_words.iter().map(|w| w.len()).max().unwrap_or(0);
    let mut value = BigUint::zero();
    let base = BigUint::from(b);
    for pos in 0..len {
        for w in &digit_words {
            let offset = len - w.len();
            let digit = if pos < offset { 0 } else { w[pos - offset] };
            value = &value * &base + BigUint::from(digit);
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn word_str(ans: &Ans, s: &str) -> Vec<usize> {
        s.chars()
            .map(|c| {
                ans.alphabet()
                    .require_id(&Letter::scalar(&c.to_string()))
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn ab_star_rep_and_val() {
        let s = ab_star();
        assert_eq!(s.format_word(&s.rep(&n(7))), "aab");
        assert_eq!(s.val(&word_str(&s, "aaa")).unwrap(), n(6));
        assert!(s.val(&word_str(&s, "ba")).is_err());
        // val(a^m b^k) = (m+k)(m+k+1)/2 + k
        for m in 0..=20u64 {
            for k in 0..=20u64 {
                let w: String = "a".repeat(m as usize) + &"b".repeat(k as usize);
                let got = s.val(&word_str(&s, &w)).unwrap();
                assert_eq!(got, n((m + k) * (m + k + 1) / 2 + k));
            }
        }
    }

    #[test]
    fn round_trip_all_presets() {
        for sys in [
            integer_base(2).unwrap(),
            integer_base(3).unwrap(),
            zeckendorf(),
            unary(),
            ab_star(),
        ] {
            for i in 0..500u64 {
                let w = sys.rep(&n(i));
                assert_eq!(sys.val(&w).unwrap(), n(i));
            }
        }
    }

    #[test]
    fn rep_monotone_in_radix_order() {
        let s = zeckendorf();
        let mut prev: Option<Vec<usize>> = None;
        for i in 0..200u64 {
            let w = s.rep(&n(i));
            if let Some(p) = prev {
                let lt = p.len() < w.len() || (p.len() == w.len() && p < w);
                assert!(lt, "radix order violated at {i}");
            }
            prev = Some(w);
        }
    }

    #[test]
    fn known_representations() {
        let b2 = integer_base(2).unwrap();
        assert_eq!(b2.format_word(&b2.rep(&n(6))), "110");
        let z = zeckendorf();
        assert_eq!(z.format_word(&z.rep(&n(4))), "101");
        let u = unary();
        assert_eq!(u.format_word(&u.rep(&n(3))), "ccc");
        let first: Vec<String> = (0..6).map(|i| z.format_word(&z.rep(&n(i)))).collect();
        assert_eq!(first, vec!["", "1", "10", "100", "101", "1000"]);
    }

    #[test]
    fn prefix_closure_checks() {
        assert!(ab_star().is_prefix_closed());
        assert!(integer_base(2).unwrap().is_prefix_closed());
        assert!(zeckendorf().is_prefix_closed());
        assert!(unary().is_prefix_closed());
        // ab* without the empty word is not prefix-closed.
        let alphabet = Alphabet::from_strs(&["a", "b"]);
        let dfa = Dfa::from_parts(alphabet, 2, 0, &[1], &[(0, 0, 1), (1, 1, 1)]).unwrap();
        assert!(!Ans::new(dfa).unwrap().is_prefix_closed());
    }

    #[test]
    fn systems_without_the_empty_word() {
        // When ε is not in the language, 0 is represented by the
        // radix-least word. Cross-checked against a brute-force
        // enumeration of the language slice.
        let alphabet = Alphabet::from_strs(&["a", "b"]);
        let dfa = Dfa::from_parts(alphabet, 2, 0, &[1], &[(0, 0, 1), (1, 1, 1)]).unwrap();
        let sys = Ans::new(dfa).unwrap();
        let mut slice = sys.language().words_up_to(8);
        slice.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for (i, w) in slice.iter().enumerate() {
            assert_eq!(&sys.rep(&n(i as u64)), w, "word {i}");
            assert_eq!(sys.val(w).unwrap(), n(i as u64));
        }
        assert_eq!(sys.format_word(&sys.rep(&n(0))), "a");
    }

    #[test]
    fn finite_language_rejected() {
        let alphabet = Alphabet::from_strs(&["a"]);
        let dfa = Dfa::from_parts(alphabet, 2, 0, &[1], &[(0, 0, 1)]).unwrap();
        assert!(matches!(Ans::new(dfa), Err(Error::FiniteLanguage)));
    }

    #[test]
    fn pair_representation_matches_known_values() {
        let s = ab_star();
        let multi = MultiAns::new(vec![s.clone(), s]).unwrap();
        let w = multi.rep(&[n(4), n(9)]).unwrap();
        assert_eq!(multi.format_word(&w), "#ab,bbb");
        let v = multi.val(&multi.parse_word("aab,##a").unwrap()).unwrap();
        assert_eq!(v, vec![n(7), n(1)]);
        // Non-canonical padding and off-language words are rejected.
        assert!(multi
            .parse_word("ab#,#a#")
            .and_then(|w| multi.val(&w))
            .is_err());
        assert!(multi
            .parse_word("#ba,aaa")
            .and_then(|w| multi.val(&w))
            .is_err());
    }

    #[test]
    fn multi_round_trip() {
        let multi = MultiAns::new(vec![integer_base(2).unwrap(), zeckendorf()]).unwrap();
        for a in 0..30u64 {
            for b in 0..30u64 {
                let w = multi.rep(&[n(a), n(b)]).unwrap();
                assert_eq!(multi.val(&w).unwrap(), vec![n(a), n(b)]);
            }
        }
    }

    #[test]
    fn recognizable_diagonal_like_set() {
        // X = { n(n+1)/2 * (1,1) + (0,n) } is represented by (a,b)*.
        let s = ab_star();
        let multi = MultiAns::new(vec![s.clone(), s]).unwrap();
        let ab = multi
            .alphabet()
            .require_id(&Letter::from_strs(&["a", "b"]))
            .unwrap();
        for k in 0..=5u64 {
            let tri = k * (k + 1) / 2;
            let w = multi.rep(&[n(tri), n(tri + k)]).unwrap();
            assert_eq!(w, vec![ab; k as usize], "k={k}");
        }
    }

    #[test]
    fn enumeration_grid_running_example() {
        let s = ab_star();
        let multi = MultiAns::new(vec![s.clone(), s]).unwrap();
        let e = EnumOrder::lexicographic(multi);
        // Frozen from the 6x6 enumeration grid of the two-dimensional
        // system on a*b*: entry [x][y] is the index of (x, y).
        let grid: [[u64; 6]; 6] = [
            [0, 1, 2, 9, 10, 15],
            [3, 4, 5, 11, 12, 16],
            [6, 7, 8, 13, 14, 17],
            [18, 19, 20, 24, 25, 28],
            [21, 22, 23, 26, 27, 29],
            [30, 31, 32, 33, 34, 35],
        ];
        for (x, row) in grid.iter().enumerate() {
            for (y, &idx) in row.iter().enumerate() {
                let got = e.index(&[n(x as u64), n(y as u64)]).unwrap();
                assert_eq!(got, n(idx), "index of ({x},{y})");
                let back = e.unindex(&n(idx)).unwrap();
                assert_eq!(back, vec![n(x as u64), n(y as u64)]);
            }
        }
    }

    #[test]
    fn shuffle_closed_formula() {
        assert_eq!(shuffle_value(2, &[n(1), n(6)]).unwrap(), n(22));
        assert_eq!(shuffle_value(2, &[n(0), n(0)]).unwrap(), n(0));
        // Agreement with the automaton-based enumeration under the
        // lexicographic order.
        let b2 = integer_base(2).unwrap();
        let multi = MultiAns::new(vec![b2.clone(), b2]).unwrap();
        let e = EnumOrder::lexicographic(multi);
        for i in 0..64u64 {
            let v = e.unindex(&n(i)).unwrap();
            assert_eq!(shuffle_value(2, &v).unwrap(), n(i), "index {i}");
        }
    }

    #[test]
    fn order_predicate_gt_on_pairs() {
        // E(1,2) = 5 and E(0,2) = 2 in the two-dimensional system, so the
        // pair ((1,2),(0,2)) satisfies the strict greater-than relation.
        let s = ab_star();
        let multi = MultiAns::new(vec![s.clone(), s]).unwrap();
        let e = EnumOrder::lexicographic(multi.clone());
        assert_eq!(e.index(&[n(1), n(2)]).unwrap(), n(5));
        assert_eq!(e.index(&[n(0), n(2)]).unwrap(), n(2));
        let gt = e.order_predicate(OrderRel::Gt).unwrap();
        let quad = multi.concat(&multi).unwrap();
        let w = quad.rep(&[n(1), n(2), n(0), n(2)]).unwrap();
        assert!(gt.accepts_ids(&w));
        let w = quad.rep(&[n(0), n(2), n(1), n(2)]).unwrap();
        assert!(!gt.accepts_ids(&w));
    }

    #[test]
    fn order_predicate_matches_numeric_order() {
        let s = ab_star();
        let multi = MultiAns::new(vec![s]).unwrap();
        let e = EnumOrder::lexicographic(multi.clone());
        let lt = e.order_predicate(OrderRel::Lt).unwrap();
        let eq = e.order_predicate(OrderRel::Eq).unwrap();
        let pair = multi.concat(&multi).unwrap();
        for a in 0..30u64 {
            for b in 0..30u64 {
                let w = pair.rep(&[n(a), n(b)]).unwrap();
                assert_eq!(lt.accepts_ids(&w), a < b, "{a} < {b}");
                assert_eq!(eq.accepts_ids(&w), a == b, "{a} = {b}");
            }
        }
    }
}
