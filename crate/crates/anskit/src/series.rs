//! Formal series with coefficients in a semiring, given by linear
//! representations (λ, μ, γ) or equivalently by weighted automata.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::Zero;

use crate::automata::{Alphabet, Dfa, Letter};
use crate::error::{Error, Result};
use crate::linalg::RationalBasis;
use crate::semiring::{Matrix, SemiringTag, SemiringValue};

/// A linear representation: a row vector λ, a monoid morphism μ into
/// square matrices (one per letter) and a column vector γ. The coefficient
/// of a word w is λ·μ(w)·γ.
#[derive(Debug, Clone)]
pub struct LinRep {
    tag: SemiringTag,
    alphabet: Alphabet,
    dim: usize,
    lambda: Matrix,
    mu: Vec<Matrix>,
    gamma: Matrix,
}

impl LinRep {
    pub fn new(
        tag: SemiringTag,
        alphabet: Alphabet,
        lambda: Matrix,
        mu: Vec<Matrix>,
        gamma: Matrix,
    ) -> Result<LinRep> {
        let dim = lambda.cols();
        if lambda.rows() != 1 || gamma.cols() != 1 || gamma.rows() != dim {
            return Err(Error::DimensionMismatch(
                "lambda must be 1xr and gamma rx1".into(),
            ));
        }
        if mu.len() != alphabet.len() {
            return Err(Error::AlphabetMismatch(
                "one transition matrix per letter is required".into(),
            ));
        }
        for m in &mu {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch("mu matrices must be rxr".into()));
            }
            if *m.tag() != tag {
                return Err(Error::TagMismatch {
                    expected: tag.name(),
                    got: m.tag().name(),
                });
            }
        }
        if *lambda.tag() != tag || *gamma.tag() != tag {
            return Err(Error::TagMismatch {
                expected: tag.name(),
                got: lambda.tag().name(),
            });
        }
        Ok(LinRep {
            tag,
            alphabet,
            dim,
            lambda,
            mu,
            gamma,
        })
    }

    /// The everywhere-zero series.
    pub fn zero(tag: SemiringTag, alphabet: Alphabet) -> LinRep {
        let lambda = Matrix::zero(tag.clone(), 1, 1);
        let gamma = Matrix::zero(tag.clone(), 1, 1);
        let mu = vec![Matrix::zero(tag.clone(), 1, 1); alphabet.len()];
        LinRep::new(tag, alphabet, lambda, mu, gamma).unwrap()
    }

    /// The constant series w ↦ k.
    pub fn constant(tag: SemiringTag, alphabet: Alphabet, k: SemiringValue) -> Result<LinRep> {
        tag.validate(&k)?;
        let mut lambda = Matrix::zero(tag.clone(), 1, 1);
        lambda.set(0, 0, k);
        let mut gamma = Matrix::zero(tag.clone(), 1, 1);
        gamma.set(0, 0, tag.one());
        let mu = vec![Matrix::identity(tag.clone(), 1); alphabet.len()];
        LinRep::new(tag, alphabet, lambda, mu, gamma)
    }

    /// The polynomial series with the given finite support, built on the
    /// word trie.
    pub fn polynomial(
        tag: SemiringTag,
        alphabet: Alphabet,
        items: &[(Vec<usize>, SemiringValue)],
    ) -> Result<LinRep> {
        // Trie over letter ids; node 0 is the root.
        let mut children: Vec<HashMap<usize, usize>> = vec![HashMap::new()];
        let mut values: Vec<SemiringValue> = vec![tag.zero()];
        for (word, value) in items {
            tag.validate(value)?;
            let mut node = 0usize;
            for &a in word {
                if a >= alphabet.len() {
                    return Err(Error::UnknownLetter(format!("letter id {a}")));
                }
                node = match children[node].get(&a) {
                    Some(&c) => c,
                    None => {
                        let c = children.len();
                        children.push(HashMap::new());
                        values.push(tag.zero());
                        children[node].insert(a, c);
                        c
                    }
                };
            }
            values[node] = tag.add(&values[node], value)?;
        }
        let n = children.len();
        let mut lambda = Matrix::zero(tag.clone(), 1, n);
        lambda.set(0, 0, tag.one());
        let mut gamma = Matrix::zero(tag.clone(), n, 1);
        for (i, v) in values.into_iter().enumerate() {
            gamma.set(i, 0, v);
        }
        let mut mu = vec![Matrix::zero(tag.clone(), n, n); alphabet.len()];
        for (p, cs) in children.iter().enumerate() {
            for (&a, &q) in cs {
                mu[a].set(p, q, tag.one());
            }
        }
        LinRep::new(tag, alphabet, lambda, mu, gamma)
    }

    pub fn tag(&self) -> &SemiringTag {
        &self.tag
    }
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn lambda(&self) -> &Matrix {
        &self.lambda
    }
    pub fn mu(&self, a: usize) -> &Matrix {
        &self.mu[a]
    }
    pub fn gamma(&self) -> &Matrix {
        &self.gamma
    }

    fn check_compatible(&self, other: &LinRep) -> Result<()> {
        if self.tag != other.tag {
            return Err(Error::TagMismatch {
                expected: self.tag.name(),
                got: other.tag.name(),
            });
        }
        if !self.alphabet.same_as(&other.alphabet) {
            return Err(Error::AlphabetMismatch(
                "series use different alphabets".into(),
            ));
        }
        Ok(())
    }

    /// The coefficient of a word given by letter ids.
    pub fn coeff(&self, word: &[usize]) -> Result<SemiringValue> {
        let mut row = self.lambda.clone();
        for &a in word {
            if a >= self.alphabet.len() {
                return Err(Error::UnknownLetter(format!("letter id {a}")));
            }
            row = row.mul(&self.mu[a])?;
        }
        Ok(row.mul(&self.gamma)?.get(0, 0).clone())
    }

    /// The coefficient of a word given by letters.
    pub fn coeff_letters(&self, word: &[Letter]) -> Result<SemiringValue> {
        let ids = self.alphabet.encode(word)?;
        self.coeff(&ids)
    }

    /// The forward row λ, for incremental coefficient walks.
    pub fn initial_row(&self) -> Vec<SemiringValue> {
        row_of(&self.lambda)
    }

    /// One letter step of a forward row: row·μ(a).
    pub fn step_row(&self, row: &[SemiringValue], a: usize) -> Result<Vec<SemiringValue>> {
        if a >= self.alphabet.len() {
            return Err(Error::UnknownLetter(format!("letter id {a}")));
        }
        row_mul(&self.tag, row, &self.mu[a])
    }

    /// Completes a forward row against γ.
    pub fn finish_row(&self, row: &[SemiringValue]) -> Result<SemiringValue> {
        dot(&self.tag, row, &self.gamma)
    }

    /// Pointwise sum, by direct sum of representations.
    pub fn add(&self, other: &LinRep) -> Result<LinRep> {
        self.check_compatible(other)?;
        let lambda = self.lambda.hconcat(&other.lambda)?;
        let gamma = self.gamma.vconcat(&other.gamma)?;
        let mu = self
            .mu
            .iter()
            .zip(&other.mu)
            .map(|(a, b)| a.direct_sum(b))
            .collect::<Result<Vec<_>>>()?;
        LinRep::new(self.tag.clone(), self.alphabet.clone(), lambda, mu, gamma)
    }

    /// Left multiplication by a scalar.
    pub fn scalar(&self, k: &SemiringValue) -> Result<LinRep> {
        let lambda = self.lambda.scalar_mul(k)?;
        LinRep::new(
            self.tag.clone(),
            self.alphabet.clone(),
            lambda,
            self.mu.clone(),
            self.gamma.clone(),
        )
    }

    /// Hadamard (pointwise) product, by Kronecker product of the
    /// representations. Requires commutative multiplication, which holds
    /// for every supported semiring.
    pub fn hadamard(&self, other: &LinRep) -> Result<LinRep> {
        self.check_compatible(other)?;
        let lambda = self.lambda.kronecker(&other.lambda)?;
        let gamma = self.gamma.kronecker(&other.gamma)?;
        let mu = self
            .mu
            .iter()
            .zip(&other.mu)
            .map(|(a, b)| a.kronecker(b))
            .collect::<Result<Vec<_>>>()?;
        LinRep::new(self.tag.clone(), self.alphabet.clone(), lambda, mu, gamma)
    }

    /// The series w ↦ (S, wu): replaces γ by μ(u)γ.
    pub fn right_quotient(&self, u: &[usize]) -> Result<LinRep> {
        let mut gamma = self.gamma.clone();
        for &a in u.iter().rev() {
            if a >= self.alphabet.len() {
                return Err(Error::UnknownLetter(format!("letter id {a}")));
            }
            gamma = self.mu[a].mul(&gamma)?;
        }
        LinRep::new(
            self.tag.clone(),
            self.alphabet.clone(),
            self.lambda.clone(),
            self.mu.clone(),
            gamma,
        )
    }

    /// Entry-wise conversion into another coefficient semiring.
    pub fn convert(&self, target: &SemiringTag) -> Result<LinRep> {
        LinRep::new(
            target.clone(),
            self.alphabet.clone(),
            self.lambda.convert(target)?,
            self.mu
                .iter()
                .map(|m| m.convert(target))
                .collect::<Result<Vec<_>>>()?,
            self.gamma.convert(target)?,
        )
    }

    /// Exact equivalence with `other`; `Ok(None)` means equal, otherwise a
    /// witness word with differing coefficients is returned.
    ///
    /// Over ℚ-embeddable semirings this explores the forward row space
    /// with a basis bound of r1+r2; over finite semirings it walks the
    /// reachable pairs of forward vectors.
    pub fn equivalence_witness(&self, other: &LinRep) -> Result<Option<Vec<usize>>> {
        self.check_compatible(other)?;
        if self.tag.embeds_in_rationals() {
            return self.equivalence_witness_rational(other);
        }
        if self.tag.is_finite() {
            return self.equivalence_witness_finite(other);
        }
        Err(Error::UnsupportedSemiring {
            tag: self.tag.name(),
            hint: "series equivalence needs a ℚ-embeddable or finite semiring".into(),
        })
    }

    pub fn equal(&self, other: &LinRep) -> Result<bool> {
        Ok(self.equivalence_witness(other)?.is_none())
    }

    fn equivalence_witness_rational(&self, other: &LinRep) -> Result<Option<Vec<usize>>> {
        let a = RationalRep::from(self)?;
        let b = RationalRep::from(other)?;
        let k = self.alphabet.len();
        let joint = |va: &[BigRational], vb: &[BigRational]| {
            let mut v = va.to_vec();
            v.extend_from_slice(vb);
            v
        };
        let mut basis = RationalBasis::new();
        let mut queue: VecDeque<(Vec<BigRational>, Vec<BigRational>, Vec<usize>)> =
            VecDeque::new();
        queue.push_back((a.lambda.clone(), b.lambda.clone(), Vec::new()));
        while let Some((va, vb, word)) = queue.pop_front() {
            if !basis.insert(joint(&va, &vb)) {
                continue;
            }
            let ca = a.dot(&va);
            let cb = b.dot(&vb);
            if ca != cb {
                return Ok(Some(word));
            }
            for l in 0..k {
                let na = a.step(&va, l);
                let nb = b.step(&vb, l);
                let mut w = word.clone();
                w.push(l);
                queue.push_back((na, nb, w));
            }
        }
        Ok(None)
    }

    fn equivalence_witness_finite(&self, other: &LinRep) -> Result<Option<Vec<usize>>> {
        let k = self.alphabet.len();
        let mut seen: HashSet<(Vec<SemiringValue>, Vec<SemiringValue>)> = HashSet::new();
        let mut queue: VecDeque<(Vec<SemiringValue>, Vec<SemiringValue>, Vec<usize>)> =
            VecDeque::new();
        queue.push_back((
            row_of(&self.lambda),
            row_of(&other.lambda),
            Vec::new(),
        ));
        while let Some((va, vb, word)) = queue.pop_front() {
            if !seen.insert((va.clone(), vb.clone())) {
                continue;
            }
            let ca = dot(&self.tag, &va, &self.gamma)?;
            let cb = dot(&self.tag, &vb, &other.gamma)?;
            if ca != cb {
                return Ok(Some(word));
            }
            for l in 0..k {
                let na = row_mul(&self.tag, &va, &self.mu[l])?;
                let nb = row_mul(&self.tag, &vb, &other.mu[l])?;
                let mut w = word.clone();
                w.push(l);
                queue.push_back((na, nb, w));
            }
        }
        Ok(None)
    }

    /// The language of words whose coefficient equals `k`, built by
    /// breadth-first search over the forward row vectors λμ(w). Errors out
    /// when more than `budget` distinct vectors appear, which certifies
    /// nothing about finiteness of the image.
    pub fn fiber_language(&self, k: &SemiringValue, budget: usize) -> Result<Dfa> {
        self.tag.validate(k)?;
        let kcount = self.alphabet.len();
        let mut index: HashMap<Vec<SemiringValue>, usize> = HashMap::new();
        let mut order: Vec<Vec<SemiringValue>> = Vec::new();
        let start = row_of(&self.lambda);
        index.insert(start.clone(), 0);
        order.push(start);
        let mut transitions = Vec::new();
        let mut finals = Vec::new();
        let mut i = 0;
        while i < order.len() {
            if order.len() > budget {
                return Err(Error::BudgetExceeded {
                    budget,
                    during: "fiber language construction (image not verified finite)".into(),
                });
            }
            let cur = order[i].clone();
            if dot(&self.tag, &cur, &self.gamma)? == *k {
                finals.push(i);
            }
            for a in 0..kcount {
                let next = row_mul(&self.tag, &cur, &self.mu[a])?;
                let len = index.len();
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    order.push(next);
                    len
                });
                transitions.push((i, a, id));
            }
            i += 1;
        }
        Ok(Dfa::from_parts(
            self.alphabet.clone(),
            order.len(),
            0,
            &finals,
            &transitions,
        )?
        .trim())
    }
}

/// A rational-entry copy of a representation, used by the equivalence and
/// kernel computations.
pub(crate) struct RationalRep {
    pub lambda: Vec<BigRational>,
    pub mu: Vec<Vec<Vec<BigRational>>>,
    pub gamma: Vec<BigRational>,
}

impl RationalRep {
    pub fn from(rep: &LinRep) -> Result<RationalRep> {
        let conv = |v: &SemiringValue| {
            v.to_rational().ok_or_else(|| Error::UnsupportedSemiring {
                tag: rep.tag.name(),
                hint: "value does not embed into ℚ".into(),
            })
        };
        let lambda = (0..rep.dim)
            .map(|j| conv(rep.lambda.get(0, j)))
            .collect::<Result<Vec<_>>>()?;
        let gamma = (0..rep.dim)
            .map(|i| conv(rep.gamma.get(i, 0)))
            .collect::<Result<Vec<_>>>()?;
        let mu = rep
            .mu
            .iter()
            .map(|m| {
                (0..rep.dim)
                    .map(|i| {
                        (0..rep.dim)
                            .map(|j| conv(m.get(i, j)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalRep { lambda, mu, gamma })
    }

    pub fn dot(&self, row: &[BigRational]) -> BigRational {
        row.iter()
            .zip(&self.gamma)
            .map(|(a, b)| a * b)
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    pub fn step(&self, row: &[BigRational], letter: usize) -> Vec<BigRational> {
        let m = &self.mu[letter];
        let n = row.len();
        let mut out = vec![BigRational::zero(); n];
        for (i, r) in row.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            for (j, x) in m[i].iter().enumerate() {
                if !x.is_zero() {
                    out[j] += r * x;
                }
            }
        }
        out
    }

    /// Column action v ↦ μ(a)·v.
    pub fn col_step(&self, col: &[BigRational], letter: usize) -> Vec<BigRational> {
        let m = &self.mu[letter];
        let n = col.len();
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            let mut acc = BigRational::zero();
            for (j, c) in col.iter().enumerate() {
                if !m[i][j].is_zero() && !c.is_zero() {
                    acc += &m[i][j] * c;
                }
            }
            out[i] = acc;
        }
        out
    }
}

pub(crate) fn row_of(m: &Matrix) -> Vec<SemiringValue> {
    (0..m.cols()).map(|j| m.get(0, j).clone()).collect()
}

pub(crate) fn col_of(m: &Matrix) -> Vec<SemiringValue> {
    (0..m.rows()).map(|i| m.get(i, 0).clone()).collect()
}

pub(crate) fn row_mul(
    tag: &SemiringTag,
    row: &[SemiringValue],
    m: &Matrix,
) -> Result<Vec<SemiringValue>> {
    let mut out = vec![tag.zero(); m.cols()];
    for (i, r) in row.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        for (j, slot) in out.iter_mut().enumerate() {
            let x = m.get(i, j);
            if x.is_zero() {
                continue;
            }
            let prod = tag.mul(r, x)?;
            *slot = tag.add(slot, &prod)?;
        }
    }
    Ok(out)
}

pub(crate) fn col_mul(
    tag: &SemiringTag,
    m: &Matrix,
    col: &[SemiringValue],
) -> Result<Vec<SemiringValue>> {
    let mut out = vec![tag.zero(); m.rows()];
    for (i, slot) in out.iter_mut().enumerate() {
        for (j, c) in col.iter().enumerate() {
            let x = m.get(i, j);
            if x.is_zero() || c.is_zero() {
                continue;
            }
            let prod = tag.mul(x, c)?;
            *slot = tag.add(slot, &prod)?;
        }
    }
    Ok(out)
}

pub(crate) fn dot(
    tag: &SemiringTag,
    row: &[SemiringValue],
    gamma: &Matrix,
) -> Result<SemiringValue> {
    let mut acc = tag.zero();
    for (i, r) in row.iter().enumerate() {
        let g = gamma.get(i, 0);
        if r.is_zero() || g.is_zero() {
            continue;
        }
        let prod = tag.mul(r, g)?;
        acc = tag.add(&acc, &prod)?;
    }
    Ok(acc)
}

/// The characteristic series of a regular language: coefficient 1 on the
/// language and 0 elsewhere.
pub fn char_series(language: &Dfa, tag: SemiringTag) -> LinRep {
    let c = language.trim().complete();
    let n = c.num_states();
    let mut lambda = Matrix::zero(tag.clone(), 1, n);
    lambda.set(0, c.initial(), tag.one());
    let mut gamma = Matrix::zero(tag.clone(), n, 1);
    for q in 0..n {
        if c.is_final(q) {
            gamma.set(q, 0, tag.one());
        }
    }
    let mut mu = vec![Matrix::zero(tag.clone(), n, n); c.alphabet().len()];
    for (p, a, q) in c.transitions() {
        mu[a].set(p, q, tag.one());
    }
    LinRep::new(tag, c.alphabet().clone(), lambda, mu, gamma).unwrap()
}

/// A weighted finite automaton: initial, final and transition weight maps.
/// Zero-weight transitions are not stored.
#[derive(Debug, Clone)]
pub struct WeightedAutomaton {
    tag: SemiringTag,
    alphabet: Alphabet,
    num_states: usize,
    initial: Vec<SemiringValue>,
    final_: Vec<SemiringValue>,
    transitions: Vec<(usize, usize, usize, SemiringValue)>,
}

impl WeightedAutomaton {
    pub fn new(
        tag: SemiringTag,
        alphabet: Alphabet,
        num_states: usize,
        initial: Vec<SemiringValue>,
        final_: Vec<SemiringValue>,
        transitions: Vec<(usize, usize, usize, SemiringValue)>,
    ) -> Result<WeightedAutomaton> {
        if initial.len() != num_states || final_.len() != num_states {
            return Err(Error::DimensionMismatch(
                "weight vectors must cover all states".into(),
            ));
        }
        for v in initial.iter().chain(final_.iter()) {
            tag.validate(v)?;
        }
        let transitions: Vec<_> = transitions
            .into_iter()
            .filter(|(_, _, _, w)| !w.is_zero())
            .collect();
        for (p, a, q, w) in &transitions {
            if *p >= num_states || *q >= num_states || *a >= alphabet.len() {
                return Err(Error::InvalidDocument("transition out of range".into()));
            }
            tag.validate(w)?;
        }
        Ok(WeightedAutomaton {
            tag,
            alphabet,
            num_states,
            initial,
            final_,
            transitions,
        })
    }

    pub fn tag(&self) -> &SemiringTag {
        &self.tag
    }
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn num_states(&self) -> usize {
        self.num_states
    }
    pub fn initial_weights(&self) -> &[SemiringValue] {
        &self.initial
    }
    pub fn final_weights(&self) -> &[SemiringValue] {
        &self.final_
    }
    pub fn transitions(&self) -> &[(usize, usize, usize, SemiringValue)] {
        &self.transitions
    }

    /// Sum over accepting paths labeled by the word of the path weights.
    pub fn weight(&self, word: &[usize]) -> Result<SemiringValue> {
        let mut row = self.initial.clone();
        for &a in word {
            if a >= self.alphabet.len() {
                return Err(Error::UnknownLetter(format!("letter id {a}")));
            }
            let mut next = vec![self.tag.zero(); self.num_states];
            for (p, l, q, w) in &self.transitions {
                if *l != a || row[*p].is_zero() {
                    continue;
                }
                let prod = self.tag.mul(&row[*p], w)?;
                next[*q] = self.tag.add(&next[*q], &prod)?;
            }
            row = next;
        }
        let mut acc = self.tag.zero();
        for (r, f) in row.iter().zip(&self.final_) {
            if r.is_zero() || f.is_zero() {
                continue;
            }
            let prod = self.tag.mul(r, f)?;
            acc = self.tag.add(&acc, &prod)?;
        }
        Ok(acc)
    }

    /// The linear representation with the same word weights.
    pub fn to_linrep(&self) -> LinRep {
        let n = self.num_states;
        let mut lambda = Matrix::zero(self.tag.clone(), 1, n);
        for (q, v) in self.initial.iter().enumerate() {
            lambda.set(0, q, v.clone());
        }
        let mut gamma = Matrix::zero(self.tag.clone(), n, 1);
        for (q, v) in self.final_.iter().enumerate() {
            gamma.set(q, 0, v.clone());
        }
        let mut mu = vec![Matrix::zero(self.tag.clone(), n, n); self.alphabet.len()];
        for (p, a, q, w) in &self.transitions {
            let cur = mu[*a].get(*p, *q).clone();
            let sum = self.tag.add(&cur, w).unwrap();
            mu[*a].set(*p, *q, sum);
        }
        LinRep::new(
            self.tag.clone(),
            self.alphabet.clone(),
            lambda,
            mu,
            gamma,
        )
        .unwrap()
    }

    /// Reads a linear representation as a weighted automaton on r states.
    pub fn from_linrep(rep: &LinRep) -> WeightedAutomaton {
        let n = rep.dim();
        let initial = row_of(&rep.lambda);
        let final_ = col_of(&rep.gamma);
        let mut transitions = Vec::new();
        for a in 0..rep.alphabet.len() {
            for p in 0..n {
                for q in 0..n {
                    let w = rep.mu[a].get(p, q);
                    if !w.is_zero() {
                        transitions.push((p, a, q, w.clone()));
                    }
                }
            }
        }
        WeightedAutomaton {
            tag: rep.tag.clone(),
            alphabet: rep.alphabet.clone(),
            num_states: n,
            initial,
            final_,
            transitions,
        }
    }
}
