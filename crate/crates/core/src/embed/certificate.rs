//! Nontriviality certificates for words evaluated in a chain.
//!
//! A certificate is one-sided: `Nontrivial` names a coefficient of the
//! evaluated word that is provably nonzero, `Inconclusive` only says that no
//! such coefficient was found up to the order cap.

use std::collections::HashMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::Chain;
use super::word::Word;
use super::EmbedError;
use crate::field::{random_point, FieldElem, Rational};
use crate::series::Series;

/// Sample coordinates are integers in `[-SAMPLE_BOUND, SAMPLE_BOUND]`.
pub const SAMPLE_BOUND: i64 = 1_000_000;

/// Points drawn per truncation order in sampled mode before escalating.
pub const SAMPLE_DRAWS: usize = 3;

/// Smallest prefix order tried before the full truncation order.
const FIRST_PREFIX: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Nontrivial,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Sampled,
}

impl std::str::FromStr for Mode {
    type Err = EmbedError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbolic" => Ok(Mode::Symbolic),
            "sampled" => Ok(Mode::Sampled),
            other => Err(EmbedError::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    /// First index with a nonzero coefficient, when nontrivial.
    pub witness_index: Option<usize>,
    /// That coefficient; in sampled mode its value at the sample point.
    pub witness_coefficient: Option<FieldElem>,
    pub mode: Mode,
    /// Truncation order of the evaluation that produced the verdict.
    pub order_used: usize,
    /// The freely reduced word that was evaluated.
    pub word: Word,
    /// Sample points drawn (sampled mode only).
    pub samples: usize,
    pub note: Option<String>,
}

impl Certificate {
    pub fn is_nontrivial(&self) -> bool {
        self.verdict == Verdict::Nontrivial
    }

    fn nontrivial(word: Word, mode: Mode, order: usize, s: &Series, samples: usize) -> Self {
        let i = s.ord().expect("nontrivial series");
        Certificate {
            verdict: Verdict::Nontrivial,
            witness_index: Some(i),
            witness_coefficient: Some(s.coeff(i).clone()),
            mode,
            order_used: order,
            word,
            samples,
            note: None,
        }
    }

    fn inconclusive(word: Word, mode: Mode, order: usize, samples: usize, note: String) -> Self {
        Certificate {
            verdict: Verdict::Inconclusive,
            witness_index: None,
            witness_coefficient: None,
            mode,
            order_used: order,
            word,
            samples,
            note: Some(note),
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Nontrivial => write!(
                f,
                "Nontrivial: coefficient {} = {} at order {} ({:?})",
                self.witness_index.unwrap_or(0),
                self.witness_coefficient.clone().unwrap_or_default(),
                self.order_used,
                self.mode
            ),
            Verdict::Inconclusive => write!(
                f,
                "Inconclusive at order {}: {}",
                self.order_used,
                self.note.as_deref().unwrap_or("")
            ),
        }
    }
}

/// `FIRST_PREFIX, 2*FIRST_PREFIX, ...`, capped at and ending with `order`.
fn prefix_orders(order: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = FIRST_PREFIX.min(order);
    while m < order {
        out.push(m);
        m *= 2;
    }
    out.push(order);
    out
}

/// Evaluates at growing prefix orders and stops at the first nonzero
/// coefficient. Coefficient `i` of a product only depends on coefficients
/// `1..=i` of the factors, so a prefix witness is a witness at full order.
fn first_witness(
    chain: &Chain,
    w: &Word,
    orders: &[usize],
) -> Result<Option<(usize, Series)>, EmbedError> {
    for &m in orders {
        let s = chain.eval_word_at(w, m)?;
        if !s.is_identity() {
            return Ok(Some((m, s)));
        }
    }
    Ok(None)
}

/// Sampled counterpart of [`first_witness`]: substitutes `point` into the
/// truncated generators that `w` actually uses, one prefix order at a time.
fn first_sampled_witness(
    chain: &Chain,
    w: &Word,
    orders: &[usize],
    point: &HashMap<u32, Rational>,
) -> Result<Option<(usize, Series)>, EmbedError> {
    let mut names: Vec<&str> = w.letters().iter().map(|l| l.name()).collect();
    names.sort_unstable();
    names.dedup();
    for &m in orders {
        let mut gens = HashMap::new();
        for name in &names {
            gens.insert(*name, chain.generator(name)?.truncate(m)?.substitute(point));
        }
        let mut acc = Series::identity(m);
        for l in w.letters() {
            acc = acc.compose(&gens[l.name()].power(l.exp())?)?;
        }
        if !acc.is_identity() {
            return Ok(Some((m, acc)));
        }
    }
    Ok(None)
}

fn with_context<T>(r: Result<T, EmbedError>, w: &Word, order: usize) -> Result<T, EmbedError> {
    r.map_err(|e| match e.blowup() {
        Some((terms, limit)) => EmbedError::Blowup {
            context: format!("evaluating {w} at order {order}"),
            terms,
            limit,
        },
        None => e,
    })
}

/// Searches for a nonzero coefficient of `w` evaluated in `chain`.
///
/// Starts at the chain's order and, while every coefficient vanishes,
/// rebuilds the chain from its steps at doubled order up to `order_max`.
/// Sampled mode substitutes random integers (from `seed`) for all symbols,
/// redrawing when the sample vanishes.
pub fn nontrivial_certificate(
    chain: &Chain,
    w: &Word,
    order_max: usize,
    mode: Mode,
    seed: u64,
) -> Result<Certificate, EmbedError> {
    let word = w.reduced();
    for l in word.letters() {
        chain.generator(l.name())?;
    }
    if word.is_empty() {
        return Ok(Certificate::inconclusive(
            word,
            mode,
            chain.order(),
            0,
            "reduced word is empty (trivial input)".into(),
        ));
    }
    let mut order = chain.order();
    let mut samples = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<u32> = chain.registry().symbols().iter().map(|s| s.id).collect();
    loop {
        let orders = if order == chain.order() {
            prefix_orders(order)
        } else {
            vec![order]
        };
        match mode {
            Mode::Symbolic => {
                let rebuilt;
                let current = if order == chain.order() {
                    chain
                } else {
                    rebuilt = with_context(chain.rebuild(order), &word, order)?;
                    &rebuilt
                };
                let found = with_context(first_witness(current, &word, &orders), &word, order)?;
                if let Some((m, s)) = found {
                    return Ok(Certificate::nontrivial(word, mode, m, &s, 0));
                }
            }
            Mode::Sampled => {
                for _ in 0..SAMPLE_DRAWS {
                    let point = random_point(&mut rng, ids.iter().copied(), SAMPLE_BOUND);
                    samples += 1;
                    let found = if order == chain.order() {
                        first_sampled_witness(chain, &word, &orders, &point)
                    } else {
                        let current =
                            with_context(chain.rebuild_specialized(order, &point), &word, order)?;
                        first_witness(&current, &word, &orders)
                    };
                    let found = with_context(found, &word, order)?;
                    if let Some((m, s)) = found {
                        return Ok(Certificate::nontrivial(word, mode, m, &s, samples));
                    }
                }
            }
        }
        if order >= order_max {
            let mut note = format!("all coefficients vanish up to order {order}");
            if chain
                .defining_relators()
                .iter()
                .any(|r| word.is_cyclic_conjugate_of(r))
            {
                note.push_str("; the word is a defining relator, trivial by construction");
            }
            return Ok(Certificate::inconclusive(word, mode, order, samples, note));
        }
        order = (order * 2).min(order_max);
    }
}

/// Certificates for many words, evaluated in parallel; results keep the
/// input order.
pub fn certify_all(
    chain: &Chain,
    words: &[Word],
    order_max: usize,
    mode: Mode,
    seed: u64,
) -> Vec<Result<Certificate, EmbedError>> {
    words
        .par_iter()
        .map(|w| nontrivial_certificate(chain, w, order_max, mode, seed))
        .collect()
}
