//! Exhaustive search over `c1` tables in a window, each paired with its
//! optimal `c2`.
//!
//! The kernel works on integers: with `D_M` the common denominator of `P_M`,
//! `D_N` that of every `N_t` entry and `k = kn/kd`, the quantity
//! `cost · D_M · D_N · kd` is an integer for every candidate. Per output it
//! keeps `Σw`, `Σw·y`, `Σw·y²`, so the optimal `c2` and its damping are
//! available at every node. Adding a message can only raise each output's
//! minimal damping, so the partial sum is a valid lower bound.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::{optimal_strategy, DeterministicStrategy, WitsenhausenInstance};
use crate::error::{Error, Result};
use crate::exact::{self, Exact, Q};
use crate::zero_error::ChannelOutput;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// `c1(m·t) ∈ [-window, window]`.
    pub window: u32,
    /// Refuse (report inconclusive) when the candidate count exceeds this.
    pub budget: Option<u64>,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub workers: Option<usize>,
}

impl SearchOptions {
    pub fn window(window: u32) -> Self {
        Self {
            window,
            budget: None,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub window: u32,
    pub candidates: u64,
    /// `(m, c1(m·t))` for each supported message.
    pub best_c1: Vec<(usize, i64)>,
    pub best_cost: Exact,
    pub strategy: DeterministicStrategy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchResult {
    Complete(SearchOutcome),
    Inconclusive { window: u32, candidates: u64, budget: u64 },
}

impl SearchResult {
    pub fn outcome(&self) -> Option<&SearchOutcome> {
        match self {
            SearchResult::Complete(o) => Some(o),
            SearchResult::Inconclusive { .. } => None,
        }
    }
}

/// Precomputed integer contributions of one message at one control value.
struct Move {
    y: i128,
    /// `(output index, w)` with `w = P_M(m)·N_t(s|y)·D_M·D_N`.
    terms: Vec<(usize, i128)>,
    /// `kn · D_N · P_M(m)·D_M · c1²`
    control: i128,
}

struct Kernel {
    /// `moves[p][v + W]` for the `p`-th supported message.
    moves: Vec<Vec<Move>>,
    outputs: usize,
    /// multiplier on the damping sums
    kd: i128,
}

#[derive(Clone)]
struct Accum {
    w: Vec<i128>,
    wy: Vec<i128>,
    wyy: Vec<i128>,
    damp: Vec<i128>,
    damping: i128,
    control: i128,
}

fn min_damping(w: i128, wy: i128, wyy: i128) -> i128 {
    if w == 0 {
        return 0;
    }
    let c = exact::round_half_even_i128(-wy, w);
    wyy + 2 * c * wy + c * c * w
}

impl Accum {
    fn new(n: usize) -> Self {
        Self {
            w: vec![0; n],
            wy: vec![0; n],
            wyy: vec![0; n],
            damp: vec![0; n],
            damping: 0,
            control: 0,
        }
    }

    fn apply(&mut self, mv: &Move, sign: i128) {
        self.control += sign * mv.control;
        for &(s, w) in &mv.terms {
            let w = sign * w;
            self.w[s] += w;
            self.wy[s] += w * mv.y;
            self.wyy[s] += w * mv.y * mv.y;
            let d = min_damping(self.w[s], self.wy[s], self.wyy[s]);
            self.damping += d - self.damp[s];
            self.damp[s] = d;
        }
    }

    fn bound(&self, kd: i128) -> i128 {
        self.control + kd * self.damping
    }
}

fn too_large() -> Error {
    Error::InvalidParameter("instance too large for the integer search kernel".into())
}

impl Kernel {
    fn build(inst: &WitsenhausenInstance, window: u32) -> Result<(Self, Vec<usize>, i128)> {
        let support = inst.support();
        let ch = inst.channel();
        let enc = inst.encoder();
        let outputs = ch.support_outputs();
        let out_index: BTreeMap<ChannelOutput, usize> = outputs.iter().enumerate().map(|(i, o)| (*o, i)).collect();

        let dm = exact::common_denominator(support.iter().map(|(_, _, p)| p)).ok_or_else(too_large)?;
        let qd = (inst.q() * inst.d()) as i128;
        let dn = exact::common_denominator(ch.rows().iter().flat_map(|r| r.values()))
            .and_then(|l| l.checked_mul(qd))
            .ok_or_else(too_large)?;
        let kn = inst.k().numer().to_i128().ok_or_else(too_large)?;
        let kd = inst.k().denom().to_i128().ok_or_else(too_large)?;

        // N_t(s|y)·D_N for in-form inputs and for the uniform fallback
        let in_form: Vec<Vec<(usize, i128)>> = ch
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(o, p)| Ok((out_index[o], exact::scaled_i128(p, dn).ok_or_else(too_large)?)))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let mut spread = vec![0i128; outputs.len()];
        for row in &in_form {
            for &(s, n) in row {
                spread[s] += n;
            }
        }
        let spread: Vec<(usize, i128)> = spread
            .into_iter()
            .enumerate()
            .filter(|(_, n)| *n > 0)
            .map(|(s, n)| (s, n / qd))
            .collect();

        let w = window as i64;
        let mut moves = Vec::with_capacity(support.len());
        for (_, x, pm) in &support {
            let pm_int = exact::scaled_i128(pm, dm).ok_or_else(too_large)?;
            let mut row = Vec::with_capacity(2 * window as usize + 1);
            for v in -w..=w {
                let y = x.checked_add(v).ok_or_else(too_large)?;
                let base = match enc.decompose(y) {
                    Some(i) => &in_form[ch.index(i)],
                    None => &spread,
                };
                row.push(Move {
                    y: y as i128,
                    terms: base.iter().map(|&(s, n)| (s, pm_int * n)).collect(),
                    control: kn * dn * pm_int * (v as i128) * (v as i128),
                });
            }
            moves.push(row);
        }
        let scale = dm * dn * kd;
        let messages = support.iter().map(|(m, _, _)| *m).collect();
        Ok((
            Self {
                moves,
                outputs: outputs.len(),
                kd,
            },
            messages,
            scale,
        ))
    }

    fn leaf_cost(&self, choice: &[usize]) -> i128 {
        let mut acc = Accum::new(self.outputs);
        for (p, &c) in choice.iter().enumerate() {
            acc.apply(&self.moves[p][c], 1);
        }
        acc.bound(self.kd)
    }
}

struct Shared {
    best: Mutex<i128>,
}

struct Subtree<'a> {
    kernel: &'a Kernel,
    shared: &'a Shared,
    acc: Accum,
    choice: Vec<usize>,
    best: Option<(i128, Vec<usize>)>,
    global: i128,
    since_sync: u32,
}

impl Subtree<'_> {
    fn prune(&mut self, bound: i128) -> bool {
        self.since_sync += 1;
        if self.since_sync >= 1024 {
            self.since_sync = 0;
            self.global = *self.shared.best.lock().unwrap();
        }
        // equal cost may still be lexicographically smaller than another
        // subtree's incumbent, so only strict excess prunes against it
        bound > self.global || self.best.as_ref().is_some_and(|(b, _)| bound >= *b)
    }

    fn descend(&mut self, depth: usize) {
        let bound = self.acc.bound(self.kernel.kd);
        if self.prune(bound) {
            return;
        }
        if depth == self.kernel.moves.len() {
            self.best = Some((bound, self.choice.clone()));
            let mut g = self.shared.best.lock().unwrap();
            if bound < *g {
                *g = bound;
            }
            self.global = *g;
            return;
        }
        for c in 0..self.kernel.moves[depth].len() {
            let mv = &self.kernel.moves[depth][c];
            self.acc.apply(mv, 1);
            self.choice.push(c);
            self.descend(depth + 1);
            self.choice.pop();
            self.acc.apply(mv, -1);
        }
    }
}

/// Minimum cost over all `c1` with `|c1(m·t)| ≤ window` on the support, each
/// with its optimal `c2`. Ties go to the lexicographically smallest table
/// (ordered by message), independent of the worker count.
pub fn search_deterministic(inst: &WitsenhausenInstance, opts: &SearchOptions) -> Result<SearchResult> {
    let (kernel, messages, scale) = Kernel::build(inst, opts.window)?;
    let width = 2 * opts.window as u64 + 1;
    let candidates = width.checked_pow(messages.len() as u32).unwrap_or(u64::MAX);
    if let Some(budget) = opts.budget {
        if candidates > budget {
            return Ok(SearchResult::Inconclusive {
                window: opts.window,
                candidates,
                budget,
            });
        }
    }

    let best = if messages.is_empty() {
        (0, Vec::new())
    } else {
        let run = || search_kernel(&kernel, opts.window);
        match opts.workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .install(run),
            None => run(),
        }
    };

    let (scaled, choice) = best;
    let w = opts.window as i64;
    let best_c1: Vec<(usize, i64)> = messages.iter().zip(&choice).map(|(&m, &c)| (m, c as i64 - w)).collect();
    let c1 = best_c1.iter().map(|&(m, v)| (m as i64 * inst.t(), v)).collect();
    Ok(SearchResult::Complete(SearchOutcome {
        window: opts.window,
        candidates,
        best_cost: Exact(Q::new(BigInt::from(scaled), BigInt::from(scale))),
        strategy: optimal_strategy(inst, c1)?,
        best_c1,
    }))
}

fn search_kernel(kernel: &Kernel, window: u32) -> (i128, Vec<usize>) {
    // c1 ≡ 0 is always in the window and seeds the bound
    let zero = vec![window as usize; kernel.moves.len()];
    let shared = Shared {
        best: Mutex::new(kernel.leaf_cost(&zero)),
    };
    let first = &kernel.moves[0];
    let results: Vec<Option<(i128, Vec<usize>)>> = (0..first.len())
        .into_par_iter()
        .map(|c| {
            let mut sub = Subtree {
                kernel,
                shared: &shared,
                acc: Accum::new(kernel.outputs),
                choice: vec![c],
                best: None,
                global: *shared.best.lock().unwrap(),
                since_sync: 0,
            };
            sub.acc.apply(&first[c], 1);
            sub.descend(1);
            sub.best
        })
        .collect();
    results
        .into_iter()
        .flatten()
        .min()
        .expect("the seed candidate is never pruned by a strictly smaller bound")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ks::KsBasisSet;
    use crate::witsenhausen::{evaluate_deterministic, make_instance};

    fn uniform(t: i64) -> WitsenhausenInstance {
        make_instance(KsBasisSet::bundled(), t, exact::qi(1), None).unwrap()
    }

    #[test]
    fn window_zero_is_the_zero_table() {
        let inst = uniform(6);
        let r = search_deterministic(&inst, &SearchOptions::window(0)).unwrap();
        let o = r.outcome().unwrap();
        assert_eq!(o.candidates, 1);
        let zero = DeterministicStrategy::from_message_table(&inst, &[0; 6]);
        let direct = evaluate_deterministic(&inst, &optimal_strategy(&inst, zero.c1).unwrap()).unwrap();
        assert_eq!(o.best_cost, direct.total);
    }

    #[test]
    fn kernel_cost_matches_exact_evaluation() {
        for t in [4, 5, 9] {
            let inst = uniform(t);
            let o = search_deterministic(&inst, &SearchOptions::window(1)).unwrap();
            let o = o.outcome().unwrap().clone();
            let r = evaluate_deterministic(&inst, &o.strategy).unwrap();
            assert_eq!(o.best_cost, r.total, "t = {t}");
        }
    }

    #[test]
    fn budget_makes_search_inconclusive() {
        let inst = uniform(10);
        let opts = SearchOptions {
            window: 2,
            budget: Some(100),
            workers: Some(1),
        };
        assert_eq!(
            search_deterministic(&inst, &opts).unwrap(),
            SearchResult::Inconclusive {
                window: 2,
                candidates: 15625,
                budget: 100
            }
        );
    }

    #[test]
    fn rational_k_and_skewed_distribution() {
        let pm = vec![
            exact::q(1, 2),
            exact::q(1, 4),
            exact::q(1, 4),
            exact::qi(0),
            exact::qi(0),
            exact::qi(0),
        ];
        let inst = make_instance(KsBasisSet::bundled(), 5, exact::q(2, 3), Some(pm)).unwrap();
        let o = search_deterministic(&inst, &SearchOptions::window(2)).unwrap();
        let o = o.outcome().unwrap();
        assert_eq!(o.best_c1.len(), 3);
        assert_eq!(o.candidates, 125);
        assert_eq!(o.best_cost, evaluate_deterministic(&inst, &o.strategy).unwrap().total);
    }
}
