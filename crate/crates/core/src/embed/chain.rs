//! Embedding chains: a registry of fresh symbols, a table of named series
//! generators, and the ordered steps that produced them.
//!
//! Every step is recorded with the symbols it consumed, so a chain can be
//! rebuilt deterministically at any truncation order, or with its symbols
//! specialized to rational values.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::word::Word;
use super::EmbedError;
use crate::field::{FieldElem, Rational, SymbolRegistry};
use crate::liealg::{self, VectorField};
use crate::series::Series;

/// A new generator `name` defined as the conjugated image of `word`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partner {
    pub name: String,
    pub word: Word,
}

impl Partner {
    pub fn new(name: impl Into<String>, word: Word) -> Self {
        Partner {
            name: name.into(),
            word,
        }
    }

    /// Copy of generator `gen` under the primed name `gen'`.
    pub fn primed(gen: &str) -> Self {
        Partner::new(format!("{gen}'"), Word::gen(gen))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StepRecord {
    /// One-parameter subgroup `{exp(lambda a)}` with generator `exp(a)`.
    OneParamBase {
        introduced: Vec<String>,
        field: VectorField,
    },
    /// Free product with a subgroup: conjugation by `c^t`,
    /// `c = exp(s e1 + s^2 e2)`; `symbols = [s, t]`.
    FreeProduct {
        symbols: Vec<u32>,
        partners: Vec<Partner>,
        introduced: Vec<String>,
    },
    /// Amalgam over the centralizer of `u`: conjugation by `U^s`;
    /// `symbols = [s]`.
    Amalgam {
        symbols: Vec<u32>,
        u: Word,
        partners: Vec<Partner>,
        introduced: Vec<String>,
    },
    /// Centralizer extension: adjoin `T = U^s`; `symbols = [s]`.
    CentralizerExt {
        symbols: Vec<u32>,
        u: Word,
        introduced: Vec<String>,
    },
}

impl StepRecord {
    pub fn kind(&self) -> &'static str {
        match self {
            StepRecord::OneParamBase { .. } => "OneParamBase",
            StepRecord::FreeProduct { .. } => "FreeProduct",
            StepRecord::Amalgam { .. } => "Amalgam",
            StepRecord::CentralizerExt { .. } => "CentralizerExt",
        }
    }

    pub fn symbols(&self) -> &[u32] {
        match self {
            StepRecord::OneParamBase { .. } => &[],
            StepRecord::FreeProduct { symbols, .. }
            | StepRecord::Amalgam { symbols, .. }
            | StepRecord::CentralizerExt { symbols, .. } => symbols,
        }
    }

    pub fn introduced(&self) -> &[String] {
        match self {
            StepRecord::OneParamBase { introduced, .. }
            | StepRecord::FreeProduct { introduced, .. }
            | StepRecord::Amalgam { introduced, .. }
            | StepRecord::CentralizerExt { introduced, .. } => introduced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    order: usize,
    registry: SymbolRegistry,
    generators: IndexMap<String, Series>,
    steps: Vec<StepRecord>,
}

/// How a step turns recorded symbol ids into coefficients: the symbol itself,
/// or a rational value when replaying a specialized chain.
struct Values<'a>(Option<&'a HashMap<u32, Rational>>);

impl Values<'_> {
    fn get(&self, id: u32) -> FieldElem {
        match self.0.and_then(|p| p.get(&id)) {
            Some(v) => FieldElem::constant(v.clone()),
            None => FieldElem::symbol(id),
        }
    }
}

impl Chain {
    /// Chain whose single generator is `exp(a)`.
    ///
    /// The base field must have rational coefficients; the symbols of a chain
    /// all come from its own registry.
    pub fn one_param_base(n: usize, a: &VectorField, name: &str) -> Result<Chain, EmbedError> {
        if n == 0 {
            return Err(EmbedError::ZeroOrder);
        }
        let record = StepRecord::OneParamBase {
            introduced: vec![name.to_string()],
            field: a.resize(n),
        };
        let empty = Chain {
            order: n,
            registry: SymbolRegistry::new(),
            generators: IndexMap::new(),
            steps: Vec::new(),
        };
        empty.apply(record, &Values(None))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn registry(&self) -> &SymbolRegistry {
        &self.registry
    }

    pub fn generators(&self) -> &IndexMap<String, Series> {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Result<&Series, EmbedError> {
        self.generators
            .get(name)
            .ok_or_else(|| EmbedError::UnknownGenerator(name.to_string()))
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// Free product of the chain group with the subgroup generated by the
    /// partner words, realized by conjugating the partners with `c^t`,
    /// `c = exp(s e1 + s^2 e2)`, for fresh `s` and `t`.
    pub fn free_product_step(&self, partners: &[Partner]) -> Result<Chain, EmbedError> {
        let mut reg = self.registry.clone();
        let s = reg.fresh().id;
        let t = reg.fresh().id;
        self.apply(
            StepRecord::FreeProduct {
                symbols: vec![s, t],
                partners: partners.to_vec(),
                introduced: partners.iter().map(|p| p.name.clone()).collect(),
            },
            &Values(None),
        )
    }

    /// Amalgam over the centralizer of `u`: partners are conjugated by
    /// `U^s` for fresh `s`, which fixes `U` itself.
    ///
    /// That `u` lies in the partner subgroup, with the same centralizer there
    /// as in the whole chain group, is the caller's obligation; it is
    /// recorded, not decided.
    pub fn amalgam_step(&self, partners: &[Partner], u: &Word) -> Result<Chain, EmbedError> {
        let s = self.registry.next_id();
        self.apply(
            StepRecord::Amalgam {
                symbols: vec![s],
                u: u.clone(),
                partners: partners.to_vec(),
                introduced: partners.iter().map(|p| p.name.clone()).collect(),
            },
            &Values(None),
        )
    }

    /// Adjoins `T = U^s` for fresh `s`.
    pub fn centralizer_extension_step(&self, u: &Word, name: &str) -> Result<Chain, EmbedError> {
        let s = self.registry.next_id();
        self.apply(
            StepRecord::CentralizerExt {
                symbols: vec![s],
                u: u.clone(),
                introduced: vec![name.to_string()],
            },
            &Values(None),
        )
    }

    fn check_new_names(&self, names: &[String]) -> Result<(), EmbedError> {
        for (k, name) in names.iter().enumerate() {
            if self.generators.contains_key(name) || names[..k].contains(name) {
                return Err(EmbedError::NameCollision(name.clone()));
            }
            if name.is_empty() {
                return Err(EmbedError::Parse("empty generator name".into()));
            }
        }
        Ok(())
    }

    fn nontrivial(&self, u: &Word) -> Result<Series, EmbedError> {
        let big_u = self.eval_word(u)?;
        if big_u.is_identity() {
            return Err(EmbedError::TrivialAmalgamElement(u.to_string()));
        }
        Ok(big_u)
    }

    fn conjugate_partners(
        &self,
        partners: &[Partner],
        conj: &Series,
        reject_trivial: bool,
    ) -> Result<Vec<(String, Series)>, EmbedError> {
        let conj_inv = conj.inverse()?;
        partners
            .iter()
            .map(|p| {
                let g = self.eval_word(&p.word)?;
                if reject_trivial && g.is_identity() {
                    return Err(EmbedError::TrivialPartner(p.name.clone()));
                }
                Ok((p.name.clone(), conj_inv.compose(&g)?.compose(conj)?))
            })
            .collect()
    }

    /// Applies one recorded step. Symbol ids in the record must be exactly the
    /// ones the registry allocates next.
    fn apply(&self, record: StepRecord, values: &Values) -> Result<Chain, EmbedError> {
        let n = self.order;
        let mut next = self.clone();
        for &id in record.symbols() {
            let sym = next.registry.fresh();
            if sym.id != id {
                return Err(EmbedError::ReplayMismatch(format!(
                    "step {} expects symbol s{id} but the registry allocates {}",
                    record.kind(),
                    sym.name
                )));
            }
        }
        next.check_new_names(record.introduced())?;
        let new_gens: Vec<(String, Series)> = match &record {
            StepRecord::OneParamBase { introduced, field } => {
                if !self.steps.is_empty() {
                    return Err(EmbedError::Internal(
                        "a one-parameter base must be the first step".into(),
                    ));
                }
                let field = field.resize(n);
                if field.is_zero() {
                    return Err(EmbedError::TrivialBase);
                }
                if field.coeffs().iter().any(|c| !c.is_constant()) {
                    return Err(EmbedError::BaseNotRational);
                }
                vec![(introduced[0].clone(), liealg::exp(&field)?)]
            }
            StepRecord::FreeProduct {
                symbols, partners, ..
            } => {
                if self.generators.is_empty() {
                    return Err(EmbedError::EmptyChain);
                }
                if partners.is_empty() {
                    return Err(EmbedError::NoPartners);
                }
                let (s, t) = (values.get(symbols[0]), values.get(symbols[1]));
                let mut c_log = vec![FieldElem::zero(); n];
                c_log[0] = s.clone();
                if n >= 2 {
                    c_log[1] = s.pow(2);
                }
                let c_log = VectorField::from_coeffs(c_log)?;
                let conj = liealg::exp(&c_log.scale(&t))?;
                self.conjugate_partners(partners, &conj, true)?
            }
            StepRecord::Amalgam {
                symbols,
                u,
                partners,
                ..
            } => {
                if partners.is_empty() {
                    return Err(EmbedError::NoPartners);
                }
                let big_u = self.nontrivial(u)?;
                let conj = liealg::flow(&big_u, &values.get(symbols[0]))?;
                if big_u.conjugate(&conj)? != big_u {
                    return Err(EmbedError::Internal(
                        "amalgam element is not fixed by its own flow".into(),
                    ));
                }
                self.conjugate_partners(partners, &conj, false)?
            }
            StepRecord::CentralizerExt {
                symbols,
                u,
                introduced,
            } => {
                let big_u = self.nontrivial(u)?;
                let t = liealg::flow(&big_u, &values.get(symbols[0]))?;
                if !t.commutator(&big_u)?.is_identity() {
                    return Err(EmbedError::Internal(
                        "adjoined element does not commute with u".into(),
                    ));
                }
                vec![(introduced[0].clone(), t)]
            }
        };
        next.generators.extend(new_gens);
        next.steps.push(record);
        Ok(next)
    }

    fn fold_steps(
        order: usize,
        steps: &[StepRecord],
        point: Option<&HashMap<u32, Rational>>,
    ) -> Result<Chain, EmbedError> {
        if order == 0 {
            return Err(EmbedError::ZeroOrder);
        }
        let mut chain = Chain {
            order,
            registry: SymbolRegistry::new(),
            generators: IndexMap::new(),
            steps: Vec::new(),
        };
        for step in steps {
            chain = chain.apply(step.clone(), &Values(point))?;
        }
        Ok(chain)
    }

    /// Rebuilds the chain from its step records at order `order`.
    pub fn rebuild(&self, order: usize) -> Result<Chain, EmbedError> {
        Self::fold_steps(order, &self.steps, None)
    }

    /// Rebuilds at the chain's own order; equal to `self` for any chain
    /// produced by the step operations.
    pub fn replay(&self) -> Result<Chain, EmbedError> {
        self.rebuild(self.order)
    }

    /// Rebuilds at order `order` with every symbol replaced by its value in
    /// `point`; the result has rational coefficients only.
    pub fn rebuild_specialized(
        &self,
        order: usize,
        point: &HashMap<u32, Rational>,
    ) -> Result<Chain, EmbedError> {
        Self::fold_steps(order, &self.steps, Some(point))
    }

    /// The same chain with `point` substituted into every generator.
    pub fn specialize(&self, point: &HashMap<u32, Rational>) -> Chain {
        Chain {
            order: self.order,
            registry: self.registry.clone(),
            generators: self
                .generators
                .iter()
                .map(|(k, v)| (k.clone(), v.substitute(point)))
                .collect(),
            steps: self.steps.clone(),
        }
    }

    pub fn eval_word(&self, w: &Word) -> Result<Series, EmbedError> {
        self.eval_word_at(w, self.order)
    }

    /// Evaluates `w` with every generator truncated to order `m`.
    pub fn eval_word_at(&self, w: &Word, m: usize) -> Result<Series, EmbedError> {
        let w = w.reduced();
        let mut acc = Series::identity(m);
        for l in w.letters() {
            let g = self.generator(l.name())?;
            let g = if m == self.order {
                g.clone()
            } else {
                g.truncate(m)?
            };
            acc = acc.compose(&g.power(l.exp())?)?;
        }
        Ok(acc)
    }

    /// Words that evaluate to the identity by construction: `u * phi(u)^-1`
    /// for amalgam steps whose partners copy single generators, and `[T, u]`
    /// for centralizer extensions.
    pub fn defining_relators(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for step in &self.steps {
            match step {
                StepRecord::Amalgam { u, partners, .. } => {
                    let copy: HashMap<&str, &str> = partners
                        .iter()
                        .filter_map(|p| match p.word.letters() {
                            [l] if l.exp() == 1 => Some((l.name(), p.name.as_str())),
                            _ => None,
                        })
                        .collect();
                    if u.letters().iter().all(|l| copy.contains_key(l.name())) {
                        let image = u.substitute(|g| copy.get(g).map(|n| Word::gen(*n)));
                        out.push(u.concat(&image.inverse()));
                    }
                }
                StepRecord::CentralizerExt { u, introduced, .. } => {
                    out.push(Word::commutator(&Word::gen(introduced[0].clone()), u));
                }
                _ => {}
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain serializes")
    }

    pub fn from_json(text: &str) -> Result<Chain, EmbedError> {
        let chain: Chain = serde_json::from_str(text)
            .map_err(|e| EmbedError::Parse(format!("chain JSON: {e}")))?;
        for (name, g) in &chain.generators {
            if g.order() != chain.order {
                return Err(EmbedError::Parse(format!(
                    "generator {name} has order {} but the chain has order {}",
                    g.order(),
                    chain.order
                )));
            }
        }
        Ok(chain)
    }
}

impl fmt::Display for Chain {
    /// Deterministic text rendering used by `show`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "chain of order {}", self.order)?;
        let syms: Vec<&str> = self
            .registry
            .symbols()
            .iter()
            .map(|s| s.name.as_str())
            .collect();
        writeln!(f, "symbols: [{}]", syms.join(", "))?;
        writeln!(f, "steps:")?;
        for (k, step) in self.steps.iter().enumerate() {
            write!(f, "  {}. {}", k + 1, step.kind())?;
            match step {
                StepRecord::OneParamBase { field, .. } => write!(f, " field {field}")?,
                StepRecord::FreeProduct { partners, .. } => {
                    for p in partners {
                        write!(f, " {} := conj({})", p.name, p.word)?;
                    }
                }
                StepRecord::Amalgam { u, partners, .. } => {
                    write!(f, " u = {u};")?;
                    for p in partners {
                        write!(f, " {} := conj({})", p.name, p.word)?;
                    }
                }
                StepRecord::CentralizerExt { u, introduced, .. } => {
                    write!(f, " {} := ({u})^s", introduced[0])?
                }
            }
            let used: Vec<String> = step.symbols().iter().map(|id| format!("s{id}")).collect();
            if !used.is_empty() {
                write!(f, " [symbols {}]", used.join(", "))?;
            }
            writeln!(f)?;
        }
        writeln!(f, "generators:")?;
        for (name, g) in &self.generators {
            writeln!(f, "  {name}:")?;
            for (i, c) in g.coeffs().iter().enumerate() {
                writeln!(f, "    c{} = {c}", i + 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(n: usize) -> Chain {
        Chain::one_param_base(n, &VectorField::basis(n, 1), "X").unwrap()
    }

    fn free_pair(n: usize) -> Chain {
        base(n)
            .free_product_step(&[Partner::new("Y", Word::gen("X"))])
            .unwrap()
    }

    #[test]
    fn base_chain() {
        let c = base(6);
        assert_eq!(c.generator("X").unwrap(), &Series::from_ints(&[1; 6]));
        assert_eq!((c.steps().len(), c.generators().len()), (1, 1));
        let x = c.generator("X").unwrap();
        let f = liealg::flow(x, &FieldElem::symbol(9)).unwrap();
        assert!(f.commutator(x).unwrap().is_identity());
        assert_eq!(
            Chain::one_param_base(4, &VectorField::zero(4), "X"),
            Err(EmbedError::TrivialBase)
        );
        let symbolic = VectorField::basis(4, 1).scale(&FieldElem::symbol(0));
        assert_eq!(
            Chain::one_param_base(4, &symbolic, "X"),
            Err(EmbedError::BaseNotRational)
        );
    }

    #[test]
    fn free_product_copy() {
        let c = free_pair(5);
        let (x, y) = (c.generator("X").unwrap(), c.generator("Y").unwrap());
        assert!(y.coeff(1).is_one());
        assert_ne!(x, y);
        assert_eq!(c.registry().next_id(), 2);
        let d = y.coeff(3).sub_ref(x.coeff(3));
        assert!(!d.is_zero());
        assert!(d.symbols().len() == 2);
    }

    #[test]
    fn free_product_errors() {
        let c = base(4);
        assert_eq!(
            c.free_product_step(&[Partner::new("X", Word::gen("X"))]),
            Err(EmbedError::NameCollision("X".into()))
        );
        assert_eq!(
            c.free_product_step(&[Partner::new("Y", Word::parse("X X^-1").unwrap())]),
            Err(EmbedError::TrivialPartner("Y".into()))
        );
        assert_eq!(
            c.free_product_step(&[Partner::new("Y", Word::gen("Z"))]),
            Err(EmbedError::UnknownGenerator("Z".into()))
        );
    }

    #[test]
    fn eval_word_basics() {
        let c = free_pair(5);
        assert!(c.eval_word(&Word::empty()).unwrap().is_identity());
        assert_eq!(
            &c.eval_word(&Word::gen("X")).unwrap(),
            c.generator("X").unwrap()
        );
        assert!(c
            .eval_word(&Word::parse("X X^-1").unwrap())
            .unwrap()
            .is_identity());
        let w1 = Word::parse("X^2 Y^-1").unwrap();
        let w2 = Word::parse("Y X^-3").unwrap();
        assert_eq!(
            c.eval_word(&w1.concat(&w2)).unwrap(),
            c.eval_word(&w1)
                .unwrap()
                .compose(&c.eval_word(&w2).unwrap())
                .unwrap()
        );
    }

    #[test]
    fn amalgam_fixes_u() {
        let c = free_pair(6);
        let u = Word::parse("[X,Y]").unwrap();
        let before = c.eval_word(&u).unwrap();
        let d = c
            .amalgam_step(&[Partner::primed("X"), Partner::primed("Y")], &u)
            .unwrap();
        let after = d.eval_word(&Word::parse("[X',Y']").unwrap()).unwrap();
        assert_eq!(before, after);
        assert_eq!(d.eval_word(&u).unwrap(), before);
        assert!(d
            .eval_word(&Word::parse("[X,Y][Y',X']").unwrap())
            .unwrap()
            .is_identity());
        assert_ne!(d.generator("X'").unwrap(), d.generator("X").unwrap());
        assert_eq!(
            d.defining_relators(),
            vec![Word::parse("[X,Y] ([X',Y'])^-1").unwrap()]
        );
        assert!(matches!(
            c.amalgam_step(&[Partner::primed("X")], &Word::parse("X X^-1").unwrap()),
            Err(EmbedError::TrivialAmalgamElement(_))
        ));
    }

    #[test]
    fn centralizer_extension() {
        let c = free_pair(5);
        let u = Word::parse("X Y").unwrap();
        let d = c.centralizer_extension_step(&u, "T").unwrap();
        let t = d.generator("T").unwrap();
        let big_u = d.eval_word(&u).unwrap();
        assert!(t.commutator(&big_u).unwrap().is_identity());
        let u7 = liealg::flow(&big_u, &FieldElem::from_int(7)).unwrap();
        assert!(t.commutator(&u7).unwrap().is_identity());
        let s = 2;
        assert!(t.coeffs().iter().any(|c| c.degree_in(s) > 0));
        assert!(c
            .generators()
            .values()
            .all(|g| g.coeffs().iter().all(|c| c.degree_in(s) == 0)));
    }

    #[test]
    fn replay_and_rebuild() {
        let c = free_pair(5)
            .amalgam_step(&[Partner::primed("X")], &Word::gen("X"))
            .unwrap();
        assert_eq!(c.replay().unwrap(), c);
        let big = c.rebuild(8).unwrap();
        for (name, g) in c.generators() {
            assert_eq!(&big.generator(name).unwrap().truncate(5).unwrap(), g);
        }
        let back = Chain::from_json(&c.to_json()).unwrap();
        assert_eq!(back.to_json(), c.to_json());
        assert_eq!(back.to_string(), c.to_string());
    }

    #[test]
    fn specialization_commutes_with_replay() {
        let c = free_pair(5)
            .centralizer_extension_step(&Word::parse("X Y^2").unwrap(), "T")
            .unwrap();
        let point: HashMap<u32, Rational> = (0..3)
            .map(|id| (id, crate::field::integer(id as i64 * 7 - 3)))
            .collect();
        assert_eq!(
            c.specialize(&point),
            c.rebuild_specialized(5, &point).unwrap()
        );
    }

    #[test]
    fn tampered_symbols_rejected() {
        let c = free_pair(4);
        let mut js: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        js["steps"][1]["symbols"] = serde_json::json!([5, 6]);
        let bad = Chain::from_json(&js.to_string()).unwrap();
        assert!(matches!(bad.replay(), Err(EmbedError::ReplayMismatch(_))));
    }
}
