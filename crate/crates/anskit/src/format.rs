//! The textual interchange format: one JSON document per object, with a
//! `kind` discriminator. Serialization is canonical: states are numbered
//! in breadth-first discovery order from the initial state and transition
//! lists are sorted, so saving the same object twice yields identical
//! bytes.

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Dfa, Letter};
use crate::automatic::Dfao;
use crate::error::{Error, Result};
use crate::logic::Predicate;
use crate::numeration::{self, Ans, MultiAns};
use crate::semiring::{Matrix, SemiringTag, SemiringValue};
use crate::series::{LinRep, WeightedAutomaton};
use crate::synchronized::{relation_alphabet, SyncRelation};

/// A named preset or an inline automaton defining a numeration system.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemRef {
    Preset(String),
    Inline(AnsDoc),
}

impl SystemRef {
    pub fn resolve(&self) -> Result<Ans> {
        match self {
            SystemRef::Preset(name) => numeration::preset(name),
            SystemRef::Inline(doc) => doc.to_ans(),
        }
    }

    /// A reference for an existing system: presets stay by name when they
    /// round-trip, otherwise the automaton is inlined.
    pub fn of(ans: &Ans) -> SystemRef {
        for name in ["base:2", "base:3", "base:10", "zeckendorf", "unary", "ab-star"] {
            if let Ok(preset) = numeration::preset(name) {
                if preset.alphabet().same_as(ans.alphabet())
                    && preset
                        .language()
                        .lang_equal(ans.language())
                        .unwrap_or(false)
                {
                    return SystemRef::Preset(name.to_string());
                }
            }
        }
        SystemRef::Inline(AnsDoc::of(ans))
    }
}

pub fn resolve_systems(refs: &[SystemRef]) -> Result<MultiAns> {
    let systems = refs
        .iter()
        .map(|r| r.resolve())
        .collect::<Result<Vec<_>>>()?;
    MultiAns::new(systems)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Document {
    Dfa(DfaDoc),
    Dfao(DfaoDoc),
    Linrep(LinRepDoc),
    Wfa(WfaDoc),
    Ans(AnsDoc),
    Predicate(PredicateDoc),
    SyncRelation(SyncRelationDoc),
}

impl Document {
    pub fn from_slice(bytes: &[u8]) -> Result<Document> {
        serde_json::from_slice(bytes).map_err(|e| Error::InvalidDocument(e.to_string()))
    }

    pub fn parse_str(text: &str) -> Result<Document> {
        Document::from_slice(text.as_bytes())
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("documents serialize");
        out.push('\n');
        out
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::Dfa(_) => "dfa",
            Document::Dfao(_) => "dfao",
            Document::Linrep(_) => "linrep",
            Document::Wfa(_) => "wfa",
            Document::Ans(_) => "ans",
            Document::Predicate(_) => "predicate",
            Document::SyncRelation(_) => "sync-relation",
        }
    }

    /// Parses and validates, returning the kind.
    pub fn validate(bytes: &[u8]) -> Result<&'static str> {
        let doc = Document::from_slice(bytes)?;
        match &doc {
            Document::Dfa(d) => {
                d.to_dfa()?;
            }
            Document::Dfao(d) => {
                d.to_dfao()?;
            }
            Document::Linrep(d) => {
                d.to_linrep()?;
            }
            Document::Wfa(d) => {
                d.to_wfa()?;
            }
            Document::Ans(d) => {
                d.to_ans()?;
            }
            Document::Predicate(d) => {
                d.to_predicate()?;
            }
            Document::SyncRelation(d) => {
                d.to_relation()?;
            }
        }
        Ok(match doc {
            Document::Dfa(_) => "dfa",
            Document::Dfao(_) => "dfao",
            Document::Linrep(_) => "linrep",
            Document::Wfa(_) => "wfa",
            Document::Ans(_) => "ans",
            Document::Predicate(_) => "predicate",
            Document::SyncRelation(_) => "sync-relation",
        })
    }
}

fn letters_of(alphabet: &[Vec<String>]) -> Result<Alphabet> {
    Alphabet::new(alphabet.iter().map(|p| Letter::new(p.clone())).collect())
}

fn alphabet_doc(alphabet: &Alphabet) -> Vec<Vec<String>> {
    alphabet
        .letters()
        .iter()
        .map(|l| l.parts().to_vec())
        .collect()
}

/// Canonical state order: breadth-first discovery from the initial state,
/// visiting letters in alphabet order. Unreachable states are dropped.
fn canonical_order(
    num_states: usize,
    initial: usize,
    k: usize,
    step: impl Fn(usize, usize) -> Option<usize>,
) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut renum = vec![None; num_states];
    let mut order = vec![initial];
    renum[initial] = Some(0);
    let mut i = 0;
    while i < order.len() {
        let q = order[i];
        for a in 0..k {
            if let Some(t) = step(q, a) {
                if renum[t].is_none() {
                    renum[t] = Some(order.len());
                    order.push(t);
                }
            }
        }
        i += 1;
    }
    (order, renum)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaDoc {
    pub alphabet: Vec<Vec<String>>,
    pub states: usize,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub transitions: Vec<(usize, usize, usize)>,
}

impl DfaDoc {
    pub fn of(dfa: &Dfa) -> DfaDoc {
        let k = dfa.alphabet().len();
        let (order, renum) =
            canonical_order(dfa.num_states(), dfa.initial(), k, |q, a| dfa.step(q, a));
        let mut finals = Vec::new();
        let mut transitions = Vec::new();
        for (new_q, &old_q) in order.iter().enumerate() {
            if dfa.is_final(old_q) {
                finals.push(new_q);
            }
            for a in 0..k {
                if let Some(t) = dfa.step(old_q, a) {
                    if let Some(new_t) = renum[t] {
                        transitions.push((new_q, a, new_t));
                    }
                }
            }
        }
        transitions.sort();
        DfaDoc {
            alphabet: alphabet_doc(dfa.alphabet()),
            states: order.len(),
            initial: 0,
            finals,
            transitions,
        }
    }

    pub fn to_dfa(&self) -> Result<Dfa> {
        let alphabet = letters_of(&self.alphabet)?;
        Dfa::from_parts(
            alphabet,
            self.states,
            self.initial,
            &self.finals,
            &self.transitions,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsDoc {
    pub alphabet: Vec<Vec<String>>,
    pub states: usize,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub transitions: Vec<(usize, usize, usize)>,
}

impl AnsDoc {
    pub fn of(ans: &Ans) -> AnsDoc {
        let d = DfaDoc::of(ans.language());
        AnsDoc {
            alphabet: d.alphabet,
            states: d.states,
            initial: d.initial,
            finals: d.finals,
            transitions: d.transitions,
        }
    }

    pub fn to_ans(&self) -> Result<Ans> {
        let dfa = DfaDoc {
            alphabet: self.alphabet.clone(),
            states: self.states,
            initial: self.initial,
            finals: self.finals.clone(),
            transitions: self.transitions.clone(),
        }
        .to_dfa()?;
        Ans::new(dfa)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaoDoc {
    pub systems: Vec<SystemRef>,
    pub semiring: String,
    pub states: usize,
    pub initial: usize,
    pub outputs: Vec<String>,
    pub transitions: Vec<(usize, usize, usize)>,
}

impl DfaoDoc {
    pub fn of(dfao: &Dfao) -> DfaoDoc {
        let k = dfao.alphabet().len();
        let (order, renum) = canonical_order(dfao.num_states(), dfao.initial(), k, |q, a| {
            dfao.step(q, a)
        });
        let mut outputs = Vec::new();
        let mut transitions = Vec::new();
        for (new_q, &old_q) in order.iter().enumerate() {
            outputs.push(dfao.output(old_q).to_string());
            for a in 0..k {
                if let Some(t) = dfao.step(old_q, a) {
                    if let Some(new_t) = renum[t] {
                        transitions.push((new_q, a, new_t));
                    }
                }
            }
        }
        transitions.sort();
        DfaoDoc {
            systems: dfao.multi().systems().iter().map(SystemRef::of).collect(),
            semiring: dfao.tag().name(),
            states: order.len(),
            initial: 0,
            outputs,
            transitions,
        }
    }

    pub fn to_dfao(&self) -> Result<Dfao> {
        let multi = resolve_systems(&self.systems)?;
        let tag = SemiringTag::parse_tag(&self.semiring)?;
        if self.outputs.len() != self.states {
            return Err(Error::InvalidDocument(
                "one output per state is required".into(),
            ));
        }
        let tau = self
            .outputs
            .iter()
            .map(|s| tag.parse_value(s))
            .collect::<Result<Vec<_>>>()?;
        Dfao::new(
            multi,
            tag,
            self.states,
            self.initial,
            &self.transitions,
            tau,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinRepDoc {
    pub semiring: String,
    pub alphabet: Vec<Vec<String>>,
    pub dim: usize,
    pub lambda: Vec<String>,
    /// One row-major r×r matrix per letter.
    pub mu: Vec<Vec<String>>,
    pub gamma: Vec<String>,
}

impl LinRepDoc {
    pub fn of(rep: &LinRep) -> LinRepDoc {
        let r = rep.dim();
        let fmt_matrix = |m: &Matrix| -> Vec<String> {
            let mut out = Vec::with_capacity(r * r);
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    out.push(m.get(i, j).to_string());
                }
            }
            out
        };
        LinRepDoc {
            semiring: rep.tag().name(),
            alphabet: alphabet_doc(rep.alphabet()),
            dim: r,
            lambda: (0..r).map(|j| rep.lambda().get(0, j).to_string()).collect(),
            mu: (0..rep.alphabet().len())
                .map(|a| fmt_matrix(rep.mu(a)))
                .collect(),
            gamma: (0..r).map(|i| rep.gamma().get(i, 0).to_string()).collect(),
        }
    }

    pub fn to_linrep(&self) -> Result<LinRep> {
        let tag = SemiringTag::parse_tag(&self.semiring)?;
        let alphabet = letters_of(&self.alphabet)?;
        let r = self.dim;
        if r == 0 {
            return Err(Error::InvalidDocument("dimension must be positive".into()));
        }
        let parse_vec = |v: &[String]| -> Result<Vec<SemiringValue>> {
            v.iter().map(|s| tag.parse_value(s)).collect()
        };
        if self.lambda.len() != r || self.gamma.len() != r || self.mu.len() != alphabet.len() {
            return Err(Error::InvalidDocument(
                "vector and matrix sizes must match the dimension".into(),
            ));
        }
        let lambda = Matrix::from_rows(tag.clone(), vec![parse_vec(&self.lambda)?])?;
        let gamma = Matrix::from_rows(
            tag.clone(),
            parse_vec(&self.gamma)?.into_iter().map(|v| vec![v]).collect(),
        )?;
        let mut mu = Vec::with_capacity(self.mu.len());
        for rows in &self.mu {
            if rows.len() != r * r {
                return Err(Error::InvalidDocument(
                    "each matrix needs dim × dim entries".into(),
                ));
            }
            let vals = parse_vec(rows)?;
            let rows: Vec<Vec<SemiringValue>> =
                vals.chunks(r).map(|c| c.to_vec()).collect();
            mu.push(Matrix::from_rows(tag.clone(), rows)?);
        }
        LinRep::new(tag, alphabet, lambda, mu, gamma)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfaDoc {
    pub semiring: String,
    pub alphabet: Vec<Vec<String>>,
    pub states: usize,
    pub initial_weights: Vec<String>,
    pub final_weights: Vec<String>,
    pub transitions: Vec<(usize, usize, usize, String)>,
}

impl WfaDoc {
    pub fn of(wfa: &WeightedAutomaton) -> WfaDoc {
        let mut transitions: Vec<(usize, usize, usize, String)> = wfa
            .transitions()
            .iter()
            .map(|(p, a, q, w)| (*p, *a, *q, w.to_string()))
            .collect();
        transitions.sort();
        WfaDoc {
            semiring: wfa.tag().name(),
            alphabet: alphabet_doc(wfa.alphabet()),
            states: wfa.num_states(),
            initial_weights: wfa.initial_weights().iter().map(|w| w.to_string()).collect(),
            final_weights: wfa.final_weights().iter().map(|w| w.to_string()).collect(),
            transitions,
        }
    }

    pub fn to_wfa(&self) -> Result<WeightedAutomaton> {
        let tag = SemiringTag::parse_tag(&self.semiring)?;
        let alphabet = letters_of(&self.alphabet)?;
        let parse_vec = |v: &[String]| -> Result<Vec<SemiringValue>> {
            v.iter().map(|s| tag.parse_value(s)).collect()
        };
        let transitions = self
            .transitions
            .iter()
            .map(|(p, a, q, w)| Ok((*p, *a, *q, tag.parse_value(w)?)))
            .collect::<Result<Vec<_>>>()?;
        WeightedAutomaton::new(
            tag.clone(),
            alphabet,
            self.states,
            parse_vec(&self.initial_weights)?,
            parse_vec(&self.final_weights)?,
            transitions,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateDoc {
    pub systems: Vec<SystemRef>,
    pub block_dims: Vec<usize>,
    pub states: usize,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub transitions: Vec<(usize, usize, usize)>,
}

impl PredicateDoc {
    pub fn of(pred: &Predicate) -> PredicateDoc {
        let d = DfaDoc::of(pred.dfa());
        PredicateDoc {
            systems: pred.multi().systems().iter().map(SystemRef::of).collect(),
            block_dims: pred.block_dims().to_vec(),
            states: d.states,
            initial: d.initial,
            finals: d.finals,
            transitions: d.transitions,
        }
    }

    pub fn to_predicate(&self) -> Result<Predicate> {
        let multi = resolve_systems(&self.systems)?;
        let dfa = Dfa::from_parts(
            multi.alphabet().clone(),
            self.states,
            self.initial,
            &self.finals,
            &self.transitions,
        )?;
        Predicate::from_dfa(multi, self.block_dims.clone(), dfa)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncRelationDoc {
    pub left_alphabet: Vec<Vec<String>>,
    pub right_alphabet: Vec<Vec<String>>,
    pub states: usize,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub transitions: Vec<(usize, usize, usize)>,
}

impl SyncRelationDoc {
    pub fn of(rel: &SyncRelation) -> SyncRelationDoc {
        let d = DfaDoc::of(rel.dfa());
        SyncRelationDoc {
            left_alphabet: alphabet_doc(rel.left_alphabet()),
            right_alphabet: alphabet_doc(rel.right_alphabet()),
            states: d.states,
            initial: d.initial,
            finals: d.finals,
            transitions: d.transitions,
        }
    }

    pub fn to_relation(&self) -> Result<SyncRelation> {
        let left = letters_of(&self.left_alphabet)?;
        let right = letters_of(&self.right_alphabet)?;
        let alphabet = relation_alphabet(&left, &right);
        let dfa = Dfa::from_parts(
            alphabet,
            self.states,
            self.initial,
            &self.finals,
            &self.transitions,
        )?;
        SyncRelation::new(left, right, dfa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeration::{integer_base, zeckendorf};
    use crate::series::char_series;

    #[test]
    fn dfa_document_round_trip_is_stable() {
        let sys = zeckendorf();
        let doc = Document::Dfa(DfaDoc::of(sys.language()));
        let json = doc.to_json();
        let parsed = Document::parse_str(&json).unwrap();
        let json2 = parsed.to_json();
        assert_eq!(json, json2);
        let Document::Dfa(d) = parsed else { panic!() };
        assert!(d.to_dfa().unwrap().lang_equal(sys.language()).unwrap());
    }

    #[test]
    fn linrep_document_round_trip() {
        let multi = crate::series::tests::pair_system();
        let rep = crate::series::tests::suffix_series(&multi);
        let doc = Document::Linrep(LinRepDoc::of(&rep));
        let json = doc.to_json();
        let Document::Linrep(d) = Document::parse_str(&json).unwrap() else {
            panic!()
        };
        let back = d.to_linrep().unwrap();
        assert!(back.equal(&rep).unwrap());
        assert_eq!(Document::Linrep(LinRepDoc::of(&back)).to_json(), json);
    }

    #[test]
    fn dfao_document_round_trip() {
        let f = crate::automatic::tests::suffix_sequence_int();
        let machine = crate::automatic::mod_m(&f, 2).unwrap();
        let doc = Document::Dfao(DfaoDoc::of(&machine));
        let json = doc.to_json();
        let Document::Dfao(d) = Document::parse_str(&json).unwrap() else {
            panic!()
        };
        let back = d.to_dfao().unwrap();
        assert_eq!(back.num_states(), machine.num_states());
        for a in 0..6u64 {
            for b in 0..6u64 {
                let n = vec![num_bigint::BigUint::from(a), num_bigint::BigUint::from(b)];
                assert_eq!(back.eval(&n).unwrap(), machine.eval(&n).unwrap());
            }
        }
    }

    #[test]
    fn preset_systems_round_trip_by_name() {
        let b2 = integer_base(2).unwrap();
        let r = SystemRef::of(&b2);
        assert!(matches!(&r, SystemRef::Preset(name) if name == "base:2"));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, "\"base:2\"");
    }

    #[test]
    fn unknown_fields_rejected() {
        let json = r#"{"kind":"dfa","alphabet":[["a"]],"states":1,"initial":0,
                       "finals":[0],"transitions":[],"bogus":1}"#;
        assert!(Document::parse_str(json).is_err());
        let json = r#"{"kind":"nonsense"}"#;
        assert!(Document::parse_str(json).is_err());
    }

    #[test]
    fn invalid_documents_are_rejected_not_panicking() {
        for bad in [
            r#"{"kind":"dfa","alphabet":[],"states":1,"initial":0,"finals":[],"transitions":[]}"#,
            r#"{"kind":"dfa","alphabet":[["a"]],"states":0,"initial":0,"finals":[],"transitions":[]}"#,
            r#"{"kind":"dfa","alphabet":[["a"]],"states":1,"initial":5,"finals":[],"transitions":[]}"#,
            r#"{"kind":"dfa","alphabet":[["a"]],"states":1,"initial":0,"finals":[9],"transitions":[]}"#,
            r#"{"kind":"dfa","alphabet":[["a"]],"states":2,"initial":0,"finals":[0],"transitions":[[0,0,0],[0,0,1]]}"#,
            r#"{"kind":"linrep","semiring":"wat","alphabet":[["a"]],"dim":1,"lambda":["1"],"mu":[["1"]],"gamma":["1"]}"#,
            r#"{"kind":"ans","alphabet":[["a"]],"states":1,"initial":0,"finals":[],"transitions":[]}"#,
        ] {
            assert!(Document::validate(bad.as_bytes()).is_err(), "{bad}");
        }
    }

    #[test]
    fn wfa_document_round_trip() {
        let multi = crate::series::tests::pair_system();
        let chi = char_series(multi.language(), SemiringTag::Nat);
        let wfa = WeightedAutomaton::from_linrep(&chi);
        let doc = Document::Wfa(WfaDoc::of(&wfa));
        let Document::Wfa(d) = Document::parse_str(&doc.to_json()).unwrap() else {
            panic!()
        };
        let back = d.to_wfa().unwrap();
        for text in ["#ab,aab", "ba,ba"] {
            let w = multi.parse_word(text).unwrap();
            assert_eq!(back.weight(&w).unwrap(), wfa.weight(&w).unwrap());
        }
    }

    #[test]
    fn relation_document_round_trip() {
        let succ = crate::synchronized::successor(&zeckendorf()).unwrap();
        let rel = succ.to_relation().unwrap();
        let doc = Document::SyncRelation(SyncRelationDoc::of(&rel));
        let json = doc.to_json();
        let Document::SyncRelation(d) = Document::parse_str(&json).unwrap() else {
            panic!()
        };
        let back = d.to_relation().unwrap();
        assert!(back.dfa().lang_equal(rel.dfa()).unwrap());
        assert_eq!(Document::SyncRelation(SyncRelationDoc::of(&back)).to_json(), json);
    }
}
