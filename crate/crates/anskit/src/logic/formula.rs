//! A small prefix-notation formula language over recognizable predicates.
//!
//! Grammar (s-expressions):
//!
//! ```text
//! formula := (and f g) | (or f g) | (implies f g) | (iff f g) | (not f)
//!          | (exists x f) | (forall x f)
//!          | (eq x y) | (lt x y) | (add x y z) | (pred NAME x ...)
//! ```
//!
//! Variables name blocks of dimension d (the dimension of the ambient
//! system); `lt` is the componentwise strict order; `add` needs an
//! addition predicate, available for the integer-base presets; `pred`
//! refers to a user-supplied predicate registered under a name.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::logic::{adder, base_eq, base_lt, Connective, DecisionMode, Predicate, Quantifier};
use crate::numeration::MultiAns;

const MAX_DEPTH: usize = 64;

/// Parsed formula tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    Bin(Connective, Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Eq(String, String),
    Lt(String, String),
    Add(String, String, String),
    Named(String, Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !word.is_empty() {
                    out.push(Token::Word(std::mem::take(&mut word)));
                }
                out.push(if c == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => {
                if !word.is_empty() {
                    out.push(Token::Word(std::mem::take(&mut word)));
                }
            }
            c if c.is_alphanumeric() || c == '_' || c == '-' || c == ':' || c == '.' => {
                word.push(c)
            }
            c => return Err(Error::Parse(format!("unexpected character {c:?}"))),
        }
    }
    if !word.is_empty() {
        out.push(Token::Word(word));
    }
    Ok(out)
}

/// Parses a formula in prefix notation.
pub fn parse(text: &str) -> Result<Formula> {
    let tokens = tokenize(text)?;
    let mut pos = 0usize;
    let formula = parse_at(&tokens, &mut pos, 0)?;
    if pos != tokens.len() {
        return Err(Error::Parse("trailing input after formula".into()));
    }
    Ok(formula)
}

fn expect_word(tokens: &[Token], pos: &mut usize) -> Result<String> {
    match tokens.get(*pos) {
        Some(Token::Word(w)) => {
            *pos += 1;
            Ok(w.clone())
        }
        _ => Err(Error::Parse("expected an identifier".into())),
    }
}

fn expect_close(tokens: &[Token], pos: &mut usize) -> Result<()> {
    match tokens.get(*pos) {
        Some(Token::Close) => {
            *pos += 1;
            Ok(())
        }
        _ => Err(Error::Parse("expected ')'".into())),
    }
}

fn parse_at(tokens: &[Token], pos: &mut usize, depth: usize) -> Result<Formula> {
    if depth > MAX_DEPTH {
        return Err(Error::Parse("formula nesting too deep".into()));
    }
    match tokens.get(*pos) {
        Some(Token::Open) => {
            *pos += 1;
            let head = expect_word(tokens, pos)?;
            let formula = match head.as_str() {
                "and" | "or" | "implies" | "iff" => {
                    let op = match head.as_str() {
                        "and" => Connective::And,
                        "or" => Connective::Or,
                        "implies" => Connective::Implies,
                        _ => Connective::Iff,
                    };
                    let f = parse_at(tokens, pos, depth + 1)?;
                    let g = parse_at(tokens, pos, depth + 1)?;
                    Formula::Bin(op, Box::new(f), Box::new(g))
                }
                "not" => Formula::Not(Box::new(parse_at(tokens, pos, depth + 1)?)),
                "exists" | "forall" => {
                    let q = if head == "exists" {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forall
                    };
                    let var = expect_word(tokens, pos)?;
                    let f = parse_at(tokens, pos, depth + 1)?;
                    Formula::Quant(q, var, Box::new(f))
                }
                "eq" => {
                    let x = expect_word(tokens, pos)?;
                    let y = expect_word(tokens, pos)?;
                    Formula::Atom(Atom::Eq(x, y))
                }
                "lt" => {
                    let x = expect_word(tokens, pos)?;
                    let y = expect_word(tokens, pos)?;
                    Formula::Atom(Atom::Lt(x, y))
                }
                "add" => {
                    let x = expect_word(tokens, pos)?;
                    let y = expect_word(tokens, pos)?;
                    let z = expect_word(tokens, pos)?;
                    Formula::Atom(Atom::Add(x, y, z))
                }
                "pred" => {
                    let name = expect_word(tokens, pos)?;
                    let mut vars = Vec::new();
                    while let Some(Token::Word(w)) = tokens.get(*pos) {
                        vars.push(w.clone());
                        *pos += 1;
                    }
                    if vars.is_empty() {
                        return Err(Error::Parse("pred needs at least one variable".into()));
                    }
                    Formula::Atom(Atom::Named(name, vars))
                }
                other => return Err(Error::Parse(format!("unknown operator {other:?}"))),
            };
            expect_close(tokens, pos)?;
            Ok(formula)
        }
        _ => Err(Error::Parse("expected '('".into())),
    }
}

/// One compiled subformula: either a truth constant (no free variables) or
/// a predicate with its sorted free-variable names, one block per
/// variable.
#[derive(Debug, Clone)]
pub enum Compiled {
    Constant(bool),
    Pred {
        pred: Predicate,
        vars: Vec<String>,
    },
}

/// The compilation environment: the block system every variable ranges
/// over, an optional addition predicate and named imports.
pub struct Compiler {
    block: MultiAns,
    add: Option<Predicate>,
    named: HashMap<String, Predicate>,
    fresh: usize,
}

impl Compiler {
    pub fn new(block: MultiAns) -> Compiler {
        Compiler {
            block,
            add: None,
            named: HashMap::new(),
            fresh: 0,
        }
    }

    /// Enables `add` atoms with the base-b adder (requires the block to be
    /// the matching one-dimensional integer-base system).
    pub fn with_base_adder(mut self, b: u32) -> Result<Compiler> {
        self.add = Some(adder(b)?);
        Ok(self)
    }

    /// Supplies an explicit addition predicate (three blocks).
    pub fn with_adder(mut self, add: Predicate) -> Compiler {
        self.add = Some(add);
        self
    }

    /// Registers a named predicate usable through `(pred NAME x ...)`.
    pub fn register(&mut self, name: &str, pred: Predicate) {
        self.named.insert(name.to_string(), pred);
    }

    pub fn block(&self) -> &MultiAns {
        &self.block
    }

    fn fresh_var(&mut self) -> String {
        self.fresh += 1;
        format!("_t{}", self.fresh)
    }

    /// Compiles a formula into a predicate over its sorted free variables,
    /// or a truth constant when the formula is closed.
    pub fn compile(&mut self, formula: &Formula) -> Result<Compiled> {
        self.compile_at(formula, 0)
    }

    fn compile_at(&mut self, formula: &Formula, depth: usize) -> Result<Compiled> {
        if depth > MAX_DEPTH {
            return Err(Error::Parse("formula nesting too deep".into()));
        }
        match formula {
            Formula::Atom(atom) => self.compile_atom(atom, depth),
            Formula::Not(f) => Ok(match self.compile_at(f, depth + 1)? {
                Compiled::Constant(b) => Compiled::Constant(!b),
                Compiled::Pred { pred, vars } => Compiled::Pred {
                    pred: pred.not()?,
                    vars,
                },
            }),
            Formula::Bin(op, f, g) => {
                let cf = self.compile_at(f, depth + 1)?;
                let cg = self.compile_at(g, depth + 1)?;
                self.combine(*op, cf, cg)
            }
            Formula::Quant(q, var, f) => {
                let inner = self.compile_at(f, depth + 1)?;
                match inner {
                    // The domain is nonempty, so quantifying a constant
                    // changes nothing.
                    Compiled::Constant(b) => Ok(Compiled::Constant(b)),
                    Compiled::Pred { pred, vars } => {
                        let Some(block_idx) = vars.iter().position(|v| v == var) else {
                            return Ok(Compiled::Pred { pred, vars });
                        };
                        if vars.len() == 1 {
                            let mode = match q {
                                Quantifier::Exists => DecisionMode::Exists,
                                Quantifier::Forall => DecisionMode::Forall,
                            };
                            return Ok(Compiled::Constant(pred.decide(mode)?));
                        }
                        let mut vars = vars;
                        vars.remove(block_idx);
                        Ok(Compiled::Pred {
                            pred: pred.quantify(*q, block_idx)?,
                            vars,
                        })
                    }
                }
            }
        }
    }

    fn compile_atom(&mut self, atom: &Atom, depth: usize) -> Result<Compiled> {
        let (base, vars): (Predicate, Vec<String>) = match atom {
            Atom::Eq(x, y) => {
                if x == y {
                    return Ok(Compiled::Pred {
                        pred: Predicate::full(self.block.clone(), vec![self.block.dim()])?,
                        vars: vec![x.clone()],
                    });
                }
                (base_eq(&self.block)?, vec![x.clone(), y.clone()])
            }
            Atom::Lt(x, y) => {
                if x == y {
                    return Ok(Compiled::Pred {
                        pred: Predicate::empty(self.block.clone(), vec![self.block.dim()])?,
                        vars: vec![x.clone()],
                    });
                }
                (base_lt(&self.block)?, vec![x.clone(), y.clone()])
            }
            Atom::Add(x, y, z) => {
                let add = self.add.clone().ok_or_else(|| {
                    Error::UnsupportedSemiring {
                        tag: "add".into(),
                        hint: "no addition predicate is available for this system".into(),
                    }
                })?;
                let vars = vec![x.clone(), y.clone(), z.clone()];
                if has_duplicates(&vars) {
                    return self.expand_duplicates(add, vars, depth);
                }
                (add, vars)
            }
            Atom::Named(name, vars) => {
                let pred = self
                    .named
                    .get(name)
                    .cloned()
                    .ok_or_else(|| Error::Parse(format!("unknown predicate {name:?}")))?;
                if pred.arity() != vars.len() {
                    return Err(Error::BlockMismatch(format!(
                        "predicate {name:?} expects {} variables",
                        pred.arity()
                    )));
                }
                if has_duplicates(vars) {
                    return self.expand_duplicates(pred, vars.clone(), depth);
                }
                (pred, vars.clone())
            }
        };
        // Reorder blocks so that the variables are sorted.
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&i, &j| vars[i].cmp(&vars[j]));
        let sorted_vars: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();
        let pred = if order.iter().enumerate().all(|(i, &o)| i == o) {
            base
        } else {
            base.permute_blocks(&order)?
        };
        Ok(Compiled::Pred {
            pred,
            vars: sorted_vars,
        })
    }

    /// Rewrites an atom with repeated variables through fresh existential
    /// copies tied back with equality.
    fn expand_duplicates(
        &mut self,
        pred: Predicate,
        vars: Vec<String>,
        depth: usize,
    ) -> Result<Compiled> {
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut new_vars = Vec::with_capacity(vars.len());
        let mut glue: Vec<(String, String)> = Vec::new();
        for v in &vars {
            let count = seen.entry(v.clone()).or_insert(0);
            if *count == 0 {
                new_vars.push(v.clone());
            } else {
                let fresh = self.fresh_var();
                glue.push((fresh.clone(), v.clone()));
                new_vars.push(fresh);
            }
            *count += 1;
        }
        let mut formula = Compiled::Pred {
            pred,
            vars: new_vars.clone(),
        };
        // Sort blocks by variable name for the invariant.
        if let Compiled::Pred { pred, vars } = formula {
            let mut order: Vec<usize> = (0..vars.len()).collect();
            order.sort_by(|&i, &j| vars[i].cmp(&vars[j]));
            let sorted: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();
            formula = Compiled::Pred {
                pred: pred.permute_blocks(&order)?,
                vars: sorted,
            };
        }
        for (fresh, orig) in glue {
            let eq = self.compile_atom(&Atom::Eq(fresh.clone(), orig), depth + 1)?;
            formula = self.combine(Connective::And, formula, eq)?;
            // Existentially remove the fresh copy.
            if let Compiled::Pred { pred, vars } = formula {
                let idx = vars.iter().position(|v| *v == fresh).unwrap();
                let mut vars = vars;
                vars.remove(idx);
                formula = Compiled::Pred {
                    pred: pred.quantify(Quantifier::Exists, idx)?,
                    vars,
                };
            }
        }
        Ok(formula)
    }

    /// Aligns two compiled subformulas on the union of their variables and
    /// applies the connective.
    fn combine(&mut self, op: Connective, f: Compiled, g: Compiled) -> Result<Compiled> {
        use Compiled::*;
        Ok(match (f, g) {
            (Constant(a), Constant(b)) => Constant(match op {
                Connective::And => a && b,
                Connective::Or => a || b,
                Connective::Implies => !a || b,
                Connective::Iff => a == b,
            }),
            (Constant(a), Pred { pred, vars }) => {
                self.fold_constant_left(op, a, pred, vars)?
            }
            (Pred { pred, vars }, Constant(b)) => {
                // Rewrite via the symmetric cases.
                match op {
                    Connective::And => self.fold_constant_left(Connective::And, b, pred, vars)?,
                    Connective::Or => self.fold_constant_left(Connective::Or, b, pred, vars)?,
                    Connective::Iff => self.fold_constant_left(Connective::Iff, b, pred, vars)?,
                    Connective::Implies => {
                        // p → b is ¬p ∨ b.
                        let notp = pred.not()?;
                        self.fold_constant_left(Connective::Or, b, notp, vars)?
                    }
                }
            }
            (
                Pred {
                    pred: pf,
                    vars: vf,
                },
                Pred {
                    pred: pg,
                    vars: vg,
                },
            ) => {
                let mut all: Vec<String> = vf.iter().chain(vg.iter()).cloned().collect();
                all.sort();
                all.dedup();
                let pf = self.widen(pf, &vf, &all)?;
                let pg = self.widen(pg, &vg, &all)?;
                Pred {
                    pred: pf.combine(op, &pg)?,
                    vars: all,
                }
            }
        })
    }

    fn fold_constant_left(
        &mut self,
        op: Connective,
        constant: bool,
        pred: Predicate,
        vars: Vec<String>,
    ) -> Result<Compiled> {
        let out = match (op, constant) {
            (Connective::And, true) | (Connective::Iff, true) => pred,
            (Connective::And, false) => {
                Predicate::empty(pred.multi().clone(), pred.block_dims().to_vec())?
            }
            (Connective::Or, true) => {
                Predicate::full(pred.multi().clone(), pred.block_dims().to_vec())?
            }
            (Connective::Or, false) => pred,
            (Connective::Implies, true) => pred,
            (Connective::Implies, false) => {
                Predicate::full(pred.multi().clone(), pred.block_dims().to_vec())?
            }
            (Connective::Iff, false) => pred.not()?,
        };
        Ok(Compiled::Pred { pred: out, vars })
    }

    /// Inserts unconstrained blocks so that `pred` over `from` variables
    /// becomes a predicate over the sorted superset `to`.
    fn widen(&self, pred: Predicate, from: &[String], to: &[String]) -> Result<Predicate> {
        let mut out = pred;
        for (position, var) in to.iter().enumerate() {
            if !from.contains(var) {
                out = out.add_block(position, &self.block)?;
            }
        }
        Ok(out)
    }
}

fn has_duplicates(vars: &[String]) -> bool {
    let mut sorted = vars.to_vec();
    sorted.sort();
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Convenience entry: compiles formula text in one step.
pub fn compile_text(compiler: &mut Compiler, text: &str) -> Result<Compiled> {
    let formula = parse(text)?;
    compiler.compile(&formula)
}
