//! Bounded evidence for the big-powers and separation conditions.
//!
//! The conditions quantify over all large exponents; here a finite window
//! `[n, n + B]^k` is evaluated at a finite truncation order. A reported
//! witness `n` means every product in that window has a nonzero coefficient,
//! which is evidence, not a proof of the universal statement.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{Series, SeriesError};

/// Upper bound on the default truncation order of a window search.
pub const DEFAULT_ORDER_CAP: usize = 32;

const FIRST_PREFIX: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BpError {
    #[error("empty tuple")]
    EmptyTuple,
    #[error("trivial tuple entry at position {0}")]
    TrivialEntry(usize),
    #[error("tuple is not commutation-free: entries {0} and {} commute", .0 + 1)]
    CommutingPair(usize),
    #[error("length mismatch: {u} tuple entries need {} interleaving elements, got {g}", .u + 1)]
    LengthMismatch { u: usize, g: usize },
    #[error("separation hypothesis fails at index {0}")]
    HypothesisFailure(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutationCheck {
    pub commutation_free: bool,
    /// 1-based `i` of the first commuting pair `(u_i, u_(i+1))`.
    pub failing_index: Option<usize>,
}

/// One exponent vector of a window and the first nonzero coefficient of its
/// product, if any was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowEntry {
    pub alpha: Vec<usize>,
    pub witness_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleReport {
    pub commutation_free: bool,
    pub failing_pair_index: Option<usize>,
    /// Smallest `n` whose whole window produced nontrivial products.
    pub witness_n: Option<usize>,
    /// The last window checked, `(n, n + B)`, inclusive.
    pub window: (usize, usize),
    pub order_used: usize,
    /// Entries of the last window checked.
    pub entries: Vec<WindowEntry>,
}

impl TupleReport {
    /// Plain-text table of `alpha -> witness index`.
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "window [{}, {}] at order {}: witness n = {}\n",
            self.window.0,
            self.window.1,
            self.order_used,
            self.witness_n
                .map_or_else(|| "none".to_string(), |n| n.to_string())
        ));
        for e in &self.entries {
            let alpha: Vec<String> = e.alpha.iter().map(|a| a.to_string()).collect();
            let w = e
                .witness_index
                .map_or_else(|| "none".to_string(), |i| i.to_string());
            out.push_str(&format!("({}) -> {w}\n", alpha.join(", ")));
        }
        out
    }
}

/// `2 * (total window word length)`, capped at [`DEFAULT_ORDER_CAP`]. The
/// word length counts `n_max + B` letters per tuple entry plus one per
/// interleaving element.
pub fn default_order(k: usize, n_max: usize, window: usize, interleaving: usize) -> usize {
    (2 * (k * (n_max + window) + interleaving)).clamp(1, DEFAULT_ORDER_CAP)
}

fn common_order(items: &[&Series]) -> Result<usize, BpError> {
    let first = items.first().ok_or(BpError::EmptyTuple)?.order();
    for s in items {
        if s.order() != first {
            return Err(SeriesError::OrderMismatch {
                left: first,
                right: s.order(),
            }
            .into());
        }
    }
    Ok(first)
}

/// Whether every consecutive pair fails to commute at the truncation order.
pub fn commutation_free(u: &[Series]) -> Result<CommutationCheck, BpError> {
    common_order(&u.iter().collect::<Vec<_>>())?;
    if let Some(i) = u.iter().position(Series::is_identity) {
        return Err(BpError::TrivialEntry(i + 1));
    }
    for i in 1..u.len() {
        if u[i - 1].commutator(&u[i])?.is_identity() {
            return Ok(CommutationCheck {
                commutation_free: false,
                failing_index: Some(i),
            });
        }
    }
    Ok(CommutationCheck {
        commutation_free: true,
        failing_index: None,
    })
}

/// Evaluates `g1 u1^a1 g2 ... gk uk^ak g(k+1)` over exponent windows.
struct WindowGrid<'a> {
    u: &'a [Series],
    g: Option<&'a [Series]>,
    max_exp: usize,
    /// powers[m][i][a] = (u_i truncated to m)^a
    powers: HashMap<usize, Vec<Vec<Series>>>,
    interleave: HashMap<usize, Vec<Series>>,
}

impl<'a> WindowGrid<'a> {
    fn new(u: &'a [Series], g: Option<&'a [Series]>, max_exp: usize) -> Self {
        WindowGrid {
            u,
            g,
            max_exp,
            powers: HashMap::new(),
            interleave: HashMap::new(),
        }
    }

    fn prepare(&mut self, m: usize) -> Result<(), BpError> {
        if self.powers.contains_key(&m) {
            return Ok(());
        }
        let tables: Result<Vec<Vec<Series>>, BpError> = self
            .u
            .par_iter()
            .map(|ui| {
                let base = ui.truncate(m)?;
                let mut row = vec![Series::identity(m)];
                for a in 1..=self.max_exp {
                    let next = row[a - 1].compose(&base)?;
                    row.push(next);
                }
                Ok(row)
            })
            .collect();
        self.powers.insert(m, tables?);
        if let Some(g) = self.g {
            let gs: Result<Vec<Series>, SeriesError> = g.iter().map(|x| x.truncate(m)).collect();
            self.interleave.insert(m, gs?);
        }
        Ok(())
    }

    fn product(&self, m: usize, alpha: &[usize]) -> Result<Series, BpError> {
        let powers = &self.powers[&m];
        let gs = self.interleave.get(&m);
        let mut acc = match gs {
            Some(gs) => gs[0].clone(),
            None => Series::identity(m),
        };
        for (i, &a) in alpha.iter().enumerate() {
            acc = acc.compose(&powers[i][a])?;
            if let Some(gs) = gs {
                acc = acc.compose(&gs[i + 1])?;
            }
        }
        Ok(acc)
    }

    /// Witness indices for every exponent vector in `[lo, hi]^k`, trying
    /// growing prefix orders up to `order`.
    fn window(&mut self, lo: usize, hi: usize, order: usize) -> Result<Vec<WindowEntry>, BpError> {
        let k = self.u.len();
        let mut alphas: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..k {
            alphas = alphas
                .into_iter()
                .flat_map(|a| {
                    (lo..=hi).map(move |x| {
                        let mut b = a.clone();
                        b.push(x);
                        b
                    })
                })
                .collect();
        }
        let mut results: Vec<Option<usize>> = vec![None; alphas.len()];
        let mut m = FIRST_PREFIX.min(order);
        loop {
            self.prepare(m)?;
            let pending: Vec<usize> = (0..alphas.len())
                .filter(|&i| results[i].is_none())
                .collect();
            let this = &*self;
            let found: Result<Vec<(usize, Option<usize>)>, BpError> = pending
                .par_iter()
                .map(|&i| Ok((i, this.product(m, &alphas[i])?.ord())))
                .collect();
            for (i, w) in found? {
                results[i] = w;
            }
            if m >= order || results.iter().all(Option::is_some) {
                break;
            }
            m = (m * 2).min(order);
        }
        Ok(alphas
            .into_iter()
            .zip(results)
            .map(|(alpha, witness_index)| WindowEntry {
                alpha,
                witness_index,
            })
            .collect())
    }
}

fn resolve_order(
    series_order: usize,
    requested: Option<usize>,
    default: usize,
) -> Result<usize, BpError> {
    match requested {
        Some(m) if m > series_order => Err(SeriesError::CannotExtend {
            requested: m,
            order: series_order,
        }
        .into()),
        Some(0) => Err(SeriesError::ZeroOrder.into()),
        Some(m) => Ok(m),
        None => Ok(default.min(series_order)),
    }
}

fn search(
    u: &[Series],
    g: Option<&[Series]>,
    n_max: usize,
    window: usize,
    order: usize,
) -> Result<TupleReport, BpError> {
    let mut grid = WindowGrid::new(u, g, n_max + window);
    let mut last = (1, 1 + window);
    let mut entries = Vec::new();
    for n in 1..=n_max.max(1) {
        last = (n, n + window);
        entries = grid.window(n, n + window, order)?;
        if entries.iter().all(|e| e.witness_index.is_some()) {
            return Ok(TupleReport {
                commutation_free: true,
                failing_pair_index: None,
                witness_n: Some(n),
                window: last,
                order_used: order,
                entries,
            });
        }
    }
    Ok(TupleReport {
        commutation_free: true,
        failing_pair_index: None,
        witness_n: None,
        window: last,
        order_used: order,
        entries,
    })
}

/// Smallest `n <= n_max` such that `u1^a1 ... uk^ak` is nontrivial for all
/// `a` in `[n, n + window]^k`, at truncation order `order` (default:
/// [`default_order`], capped at the order of the inputs).
pub fn independence_search(
    u: &[Series],
    n_max: usize,
    window: usize,
    order: Option<usize>,
) -> Result<TupleReport, BpError> {
    let check = commutation_free(u)?;
    if let Some(i) = check.failing_index {
        return Err(BpError::CommutingPair(i));
    }
    let order = resolve_order(
        u[0].order(),
        order,
        default_order(u.len(), n_max, window, 0),
    )?;
    search(u, None, n_max, window, order)
}

/// Window search for `g1 u1^a1 g2 ... gk uk^ak g(k+1)`, under the
/// hypothesis `[g(i+1)^-1 u_i g(i+1), u(i+1)] != 1`.
pub fn separation_check(
    u: &[Series],
    g: &[Series],
    n_max: usize,
    window: usize,
    order: Option<usize>,
) -> Result<TupleReport, BpError> {
    if g.len() != u.len() + 1 {
        return Err(BpError::LengthMismatch {
            u: u.len(),
            g: g.len(),
        });
    }
    let all: Vec<&Series> = u.iter().chain(g.iter()).collect();
    let series_order = common_order(&all)?;
    for i in 1..u.len() {
        let conj = u[i - 1].conjugate(&g[i])?;
        if conj.commutator(&u[i])?.is_identity() {
            return Err(BpError::HypothesisFailure(i));
        }
    }
    let order = resolve_order(
        series_order,
        order,
        default_order(u.len(), n_max, window, g.len()),
    )?;
    search(u, Some(g), n_max, window, order)
}
