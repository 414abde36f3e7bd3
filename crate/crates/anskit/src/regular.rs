//! Regular sequences: ℕ^d → K maps whose associated series on the
//! numeration language is recognizable.
//!
//! The series of a sequence carries coefficient f(val(w)) on every word w
//! of the numeration language and 0 everywhere else. The kernel operation
//! f∘w appends w to representations; under a prefix-closed numeration
//! language it coincides with the right quotient of the series.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::linalg::RationalBasis;
use crate::numeration::{padded_product, MultiAns};
use crate::semiring::{Matrix, SemiringTag, SemiringValue};
use crate::series::{char_series, col_mul, col_of, dot, row_mul, row_of, LinRep, RationalRep};

/// A sequence ℕ^d → K together with its numeration system, stored through
/// the recognizable series supported on the numeration language.
#[derive(Debug, Clone)]
pub struct RegularSequence {
    multi: MultiAns,
    series: LinRep,
}

impl RegularSequence {
    /// Wraps an arbitrary series: the result evaluates like `series` on
    /// representations and is restricted to coefficient 0 off the
    /// numeration language.
    pub fn from_series(multi: MultiAns, series: LinRep) -> Result<RegularSequence> {
        if !series.alphabet().same_as(multi.alphabet()) {
            return Err(Error::AlphabetMismatch(
                "series alphabet must match the numeration alphabet".into(),
            ));
        }
        let chi = char_series(multi.language(), series.tag().clone());
        let restricted = series.hadamard(&chi)?;
        Ok(RegularSequence {
            multi,
            series: restricted,
        })
    }

    /// Wraps a series already known to vanish off the numeration language.
    pub(crate) fn from_invariant_series(multi: MultiAns, series: LinRep) -> RegularSequence {
        debug_assert!(series.alphabet().same_as(multi.alphabet()));
        RegularSequence { multi, series }
    }

    /// The zero sequence.
    pub fn zero(multi: MultiAns, tag: SemiringTag) -> RegularSequence {
        let series = LinRep::zero(tag, multi.alphabet().clone());
        RegularSequence { multi, series }
    }

    /// The constant sequence n ↦ k.
    pub fn constant(multi: MultiAns, tag: SemiringTag, k: SemiringValue) -> Result<RegularSequence> {
        let series = LinRep::constant(tag, multi.alphabet().clone(), k)?;
        RegularSequence::from_series(multi, series)
    }

    pub fn multi(&self) -> &MultiAns {
        &self.multi
    }

    pub fn series(&self) -> &LinRep {
        &self.series
    }

    pub fn tag(&self) -> &SemiringTag {
        self.series.tag()
    }

    /// The value f(n) = (S, rep(n)).
    pub fn eval(&self, n: &[BigUint]) -> Result<SemiringValue> {
        let w = self.multi.rep(n)?;
        self.series.coeff(&w)
    }

    fn require_prefix_closed(&self) -> Result<()> {
        if !self.multi.is_prefix_closed() {
            return Err(Error::NotPrefixClosed);
        }
        Ok(())
    }

    /// The kernel operation: (f∘w)(n) = f(val(rep(n)·w)), and 0 when the
    /// extended word leaves the numeration language. Requires a
    /// prefix-closed numeration language, under which the series of f∘w is
    /// the right quotient of the series of f.
    pub fn circ(&self, w: &[usize]) -> Result<RegularSequence> {
        self.require_prefix_closed()?;
        let series = self.series.right_quotient(w)?;
        Ok(RegularSequence {
            multi: self.multi.clone(),
            series,
        })
    }

    fn check_same_space(&self, other: &RegularSequence) -> Result<()> {
        if !self
            .multi
            .alphabet()
            .same_as(other.multi.alphabet())
        {
            return Err(Error::AlphabetMismatch(
                "sequences live over different numeration systems".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &RegularSequence) -> Result<RegularSequence> {
        self.check_same_space(other)?;
        Ok(RegularSequence {
            multi: self.multi.clone(),
            series: self.series.add(&other.series)?,
        })
    }

    pub fn scalar(&self, k: &SemiringValue) -> Result<RegularSequence> {
        Ok(RegularSequence {
            multi: self.multi.clone(),
            series: self.series.scalar(k)?,
        })
    }

    pub fn hadamard(&self, other: &RegularSequence) -> Result<RegularSequence> {
        self.check_same_space(other)?;
        Ok(RegularSequence {
            multi: self.multi.clone(),
            series: self.series.hadamard(&other.series)?,
        })
    }

    /// Entry-wise semiring conversion, e.g. reduction of an integer
    /// sequence modulo m.
    pub fn convert(&self, target: &SemiringTag) -> Result<RegularSequence> {
        Ok(RegularSequence {
            multi: self.multi.clone(),
            series: self.series.convert(target)?,
        })
    }

    /// Sequence equality, decided as series equality (both series vanish
    /// off the numeration language).
    pub fn equal(&self, other: &RegularSequence) -> Result<bool> {
        self.check_same_space(other)?;
        self.series.equal(&other.series)
    }

    /// Changes finitely many values of the sequence.
    pub fn finite_modify(
        &self,
        patch: &[(Vec<BigUint>, SemiringValue)],
    ) -> Result<RegularSequence> {
        if patch.is_empty() {
            return Ok(self.clone());
        }
        let tag = self.tag().clone();
        let alphabet = self.multi.alphabet().clone();
        let mut words = Vec::with_capacity(patch.len());
        let mut poly_items = Vec::with_capacity(patch.len());
        for (n, v) in patch {
            tag.validate(v)?;
            let w = self.multi.rep(n)?;
            poly_items.push((w.clone(), v.clone()));
            words.push(w);
        }
        // Characteristic automaton of the patched words.
        let mut patched = Dfa::single_word(alphabet.clone(), &words[0]);
        for w in &words[1..] {
            patched = patched.union(&Dfa::single_word(alphabet.clone(), w))?;
        }
        let keep = char_series(&patched.complement(), tag.clone());
        let base = self.series.hadamard(&keep)?;
        let poly = LinRep::polynomial(tag, alphabet, &poly_items)?;
        Ok(RegularSequence {
            multi: self.multi.clone(),
            series: base.add(&poly)?,
        })
    }

    /// The (d-1)-dimensional sequence obtained by pinning axis `axis` to
    /// the value k: n̂ ↦ f(n̂ with k inserted at `axis`).
    pub fn project(&self, axis: usize, k: &BigUint) -> Result<RegularSequence> {
        let d = self.multi.dim();
        if d < 2 {
            return Err(Error::TapeOutOfRange { index: axis, arity: d });
        }
        if axis >= d {
            return Err(Error::TapeOutOfRange { index: axis, arity: d });
        }
        let tag = self.tag().clone();
        // Restrict the series to representations whose pinned component
        // spells rep(k).
        let pinned_sys = &self.multi.systems()[axis];
        let rep_k = pinned_sys.rep(k);
        let pinned_dfa = Dfa::single_word(pinned_sys.alphabet().clone(), &rep_k);
        let components: Vec<&Dfa> = self
            .multi
            .systems()
            .iter()
            .enumerate()
            .map(|(i, s)| if i == axis { &pinned_dfa } else { s.language() })
            .collect();
        let x_ik = padded_product(&components, self.multi.alphabet())?;
        let restricted = self.series.hadamard(&char_series(&x_ik, tag.clone()))?;

        // Sum the transition matrices over all lifts of each projected
        // letter.
        let new_multi = self.multi.without_tapes(&[axis])?;
        let new_alphabet = new_multi.alphabet().clone();
        let keep: Vec<usize> = (0..d).filter(|&i| i != axis).collect();
        let dim = restricted.dim();
        let mut mu: Vec<Matrix> = vec![Matrix::zero(tag.clone(), dim, dim); new_alphabet.len()];
        for (a, letter) in self.multi.alphabet().letters().iter().enumerate() {
            let b = letter.project(&keep);
            if let Some(bid) = new_alphabet.id_of(&b) {
                mu[bid] = mu[bid].add(restricted.mu(a))?;
            }
        }
        let base_series = LinRep::new(
            tag.clone(),
            new_alphabet,
            restricted.lambda().clone(),
            mu,
            restricted.gamma().clone(),
        )?;
        let base = RegularSequence {
            multi: new_multi.clone(),
            series: base_series,
        };

        // The letter-sum representation is correct on all representations
        // at least as long as rep(k); shorter vectors are patched.
        if rep_k.is_empty() {
            return Ok(base);
        }
        let mut short_ranks: Vec<BigUint> = Vec::new();
        for sys in new_multi.systems() {
            let mut count = BigUint::zero();
            for l in 0..rep_k.len() {
                count += sys.ranker().count_exact(l);
            }
            short_ranks.push(count);
        }
        let mut patch = Vec::new();
        let mut stack: Vec<Vec<BigUint>> = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == new_multi.dim() {
                let mut full: Vec<BigUint> = Vec::with_capacity(d);
                let mut it = prefix.iter();
                for i in 0..d {
                    if i == axis {
                        full.push(k.clone());
                    } else {
                        full.push(it.next().unwrap().clone());
                    }
                }
                patch.push((prefix, self.eval(&full)?));
                continue;
            }
            let bound = &short_ranks[prefix.len()];
            let mut i = BigUint::zero();
            while &i < bound {
                let mut next = prefix.clone();
                next.push(i.clone());
                stack.push(next);
                i += 1u32;
            }
        }
        base.finite_modify(&patch)
    }

    /// A growth certificate: the maximum of the max-row-sum norms of λ,
    /// the μ matrices and γ. The value of the sequence at n is bounded in
    /// absolute value by c^(|rep(n)|+2).
    pub fn growth_bound(&self) -> Result<BigRational> {
        let mut c = self.series.lambda().max_row_sum_norm()?;
        let g = self.series.gamma().max_row_sum_norm()?;
        if g > c {
            c = g;
        }
        for a in 0..self.multi.alphabet().len() {
            let m = self.series.mu(a).max_row_sum_norm()?;
            if m > c {
                c = m;
            }
        }
        Ok(c)
    }

    /// Closure of the kernel of f under the span machinery appropriate to
    /// the coefficient semiring. See [`KernelReport`].
    pub fn kernel_closure(&self, budget: usize) -> Result<KernelReport> {
        self.require_prefix_closed()?;
        match self.tag() {
            SemiringTag::Int | SemiringTag::Rat => self.kernel_closure_rational(budget),
            SemiringTag::IntMod(_) | SemiringTag::Bool => self.kernel_closure_finite(budget),
            t => Err(Error::UnsupportedSemiring {
                tag: t.name(),
                hint: "kernel closure needs ℤ, ℚ or a finite semiring; over ℕ use \
                       verify_practical_criterion with explicit generators"
                    .into(),
            }),
        }
    }

    /// Kernel closure over a ℚ-embeddable ring: kernel elements are the
    /// column vectors μ(w)γ compared through the forward observation map,
    /// so the reported rank is the dimension of the module spanned by the
    /// kernel sequences.
    fn kernel_closure_rational(&self, budget: usize) -> Result<KernelReport> {
        let rep = RationalRep::from(&self.series)?;
        let k = self.multi.alphabet().len();
        // Forward row-space basis: the observation map.
        let mut rows = RationalBasis::new();
        let mut row_basis: Vec<Vec<BigRational>> = Vec::new();
        let mut queue = VecDeque::from([rep.lambda.clone()]);
        while let Some(v) = queue.pop_front() {
            if rows.insert(v.clone()) {
                row_basis.push(v.clone());
                for a in 0..k {
                    queue.push_back(rep.step(&v, a));
                }
            }
        }
        let observe = |col: &[BigRational]| -> Vec<BigRational> {
            row_basis
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(col)
                        .map(|(a, b)| a * b)
                        .fold(BigRational::zero(), |acc, x| acc + x)
                })
                .collect()
        };
        let mut obs_basis = RationalBasis::new();
        let mut generators = Vec::new();
        let mut closed = true;
        // Columns are tracked exactly in the original semiring.
        let gamma0 = col_of(self.series.gamma());
        let mut col_queue: VecDeque<(Vec<SemiringValue>, Vec<BigRational>, Vec<usize>)> =
            VecDeque::new();
        let to_q = |v: &[SemiringValue]| -> Vec<BigRational> {
            v.iter().map(|x| x.to_rational().unwrap()).collect()
        };
        let q0 = to_q(&gamma0);
        col_queue.push_back((gamma0, q0, Vec::new()));
        while let Some((col, colq, word)) = col_queue.pop_front() {
            if !obs_basis.insert(observe(&colq)) {
                continue;
            }
            if generators.len() >= budget {
                closed = false;
                break;
            }
            generators.push((word.clone(), col.clone()));
            for a in 0..k {
                let next = col_mul(self.tag(), self.series.mu(a), &col)?;
                let nextq = rep.col_step(&colq, a);
                let mut w = vec![a];
                w.extend_from_slice(&word);
                col_queue.push_back((next, nextq, w));
            }
        }
        let dimension = obs_basis.rank();
        Ok(KernelReport {
            generators,
            closed,
            dimension_or_size: dimension,
            tag: self.tag().clone(),
        })
    }

    /// Kernel closure over a finite semiring: the kernel is the set of
    /// sequences f∘w, collected up to observational equivalence under the
    /// (finite) set of forward row vectors.
    fn kernel_closure_finite(&self, budget: usize) -> Result<KernelReport> {
        let tag = self.tag().clone();
        let k = self.multi.alphabet().len();
        // All reachable forward rows.
        let mut rows: Vec<Vec<SemiringValue>> = Vec::new();
        let mut seen: HashSet<Vec<SemiringValue>> = HashSet::new();
        let mut queue = VecDeque::from([row_of(self.series.lambda())]);
        while let Some(v) = queue.pop_front() {
            if !seen.insert(v.clone()) {
                continue;
            }
            if rows.len() >= budget {
                return Err(Error::BudgetExceeded {
                    budget,
                    during: "forward row enumeration in kernel closure".into(),
                });
            }
            rows.push(v.clone());
            for a in 0..k {
                queue.push_back(row_mul(&tag, &v, self.series.mu(a))?);
            }
        }
        let observe = |col: &[SemiringValue]| -> Result<Vec<SemiringValue>> {
            let gamma_like = Matrix::from_rows(
                tag.clone(),
                col.iter().map(|v| vec![v.clone()]).collect(),
            )?;
            rows.iter().map(|r| dot(&tag, r, &gamma_like)).collect()
        };
        let mut signatures: HashSet<Vec<SemiringValue>> = HashSet::new();
        let mut generators = Vec::new();
        let mut closed = true;
        let mut col_queue: VecDeque<(Vec<SemiringValue>, Vec<usize>)> = VecDeque::new();
        col_queue.push_back((col_of(self.series.gamma()), Vec::new()));
        while let Some((col, word)) = col_queue.pop_front() {
            let sig = observe(&col)?;
            if !signatures.insert(sig) {
                continue;
            }
            if generators.len() >= budget {
                closed = false;
                break;
            }
            generators.push((word.clone(), col.clone()));
            for a in 0..k {
                let next = col_mul(&tag, self.series.mu(a), &col)?;
                let mut w = vec![a];
                w.extend_from_slice(&word);
                col_queue.push_back((next, w));
            }
        }
        let size = generators.len();
        Ok(KernelReport {
            generators,
            closed,
            dimension_or_size: size,
            tag,
        })
    }
}

/// Result of a kernel closure: one generator per basis element (over ℚ)
/// or per kernel sequence (over finite semirings), each given by the word
/// w and the vector μ(w)γ.
#[derive(Debug, Clone)]
pub struct KernelReport {
    pub generators: Vec<(Vec<usize>, Vec<SemiringValue>)>,
    pub closed: bool,
    pub dimension_or_size: usize,
    pub tag: SemiringTag,
}

/// Outcome of [`verify_practical_criterion`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriterionOutcome {
    Verified,
    /// The relation for f_index ∘ letter fails; the witness word has
    /// different coefficients on the two sides.
    CounterExample {
        letter: usize,
        index: usize,
        witness: Vec<usize>,
    },
}

/// Checks a family f_1..f_r against claimed one-letter kernel relations
/// `f_i ∘ a = Σ_j coeffs[(a,i)][j] · f_j`. Missing table entries claim the
/// zero combination. Verification is exact series equivalence.
pub fn verify_practical_criterion(
    fs: &[RegularSequence],
    coeffs: &HashMap<(usize, usize), Vec<SemiringValue>>,
) -> Result<CriterionOutcome> {
    if fs.is_empty() {
        return Ok(CriterionOutcome::Verified);
    }
    let alphabet = fs[0].multi().alphabet().clone();
    let tag = fs[0].tag().clone();
    for f in fs {
        if !f.multi().alphabet().same_as(&alphabet) || *f.tag() != tag {
            return Err(Error::AlphabetMismatch(
                "criterion family must share system and semiring".into(),
            ));
        }
        f.require_prefix_closed()?;
    }
    for a in 0..alphabet.len() {
        for (i, f) in fs.iter().enumerate() {
            let lhs = f.series().right_quotient(&[a])?;
            let mut rhs = LinRep::zero(tag.clone(), alphabet.clone());
            if let Some(row) = coeffs.get(&(a, i)) {
                if row.len() != fs.len() {
                    return Err(Error::BlockMismatch(format!(
                        "coefficient row for letter {a}, sequence {i} has wrong length"
                    )));
                }
                for (j, kj) in row.iter().enumerate() {
                    if kj.is_zero() {
                        continue;
                    }
                    rhs = rhs.add(&fs[j].series().scalar(kj)?)?;
                }
            }
            if let Some(witness) = lhs.equivalence_witness(&rhs)? {
                return Ok(CriterionOutcome::CounterExample {
                    letter: a,
                    index: i,
                    witness,
                });
            }
        }
    }
    Ok(CriterionOutcome::Verified)
}
