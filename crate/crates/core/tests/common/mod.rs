//! Reference implementations used by the integration tests. They rebuild
//! everything from the raw vector data with plain loops and share no code
//! paths with the library beyond the rational type.

#![allow(dead_code)]

use std::collections::BTreeMap;

use entangled_control::exact::{q, qi, Q};
use entangled_control::ks::KsBasisSet;
use entangled_control::zero_error::{ChannelInput, ChannelOutput};
use num_traits::Zero;

pub type Input = (usize, usize);

pub fn orthogonal(set: &KsBasisSet, a: Input, b: Input) -> bool {
    let u = set.vector(a.0, a.1).entries();
    let v = set.vector(b.0, b.1).entries();
    let (mut re, mut im) = (0i128, 0i128);
    for (x, y) in u.iter().zip(v) {
        // conj(x) * y
        re += (x.re as i128) * (y.re as i128) + (x.im as i128) * (y.im as i128);
        im += (x.re as i128) * (y.im as i128) - (x.im as i128) * (y.re as i128);
    }
    re == 0 && im == 0
}

pub fn inputs(set: &KsBasisSet) -> Vec<Input> {
    (0..set.q()).flat_map(|m| (0..set.d()).map(move |j| (m, j))).collect()
}

/// For each input, the inputs orthogonal to it.
pub fn neighbours(set: &KsBasisSet) -> BTreeMap<Input, Vec<Input>> {
    let all = inputs(set);
    all.iter()
        .map(|&a| {
            (
                a,
                all.iter()
                    .copied()
                    .filter(|&b| b != a && orthogonal(set, a, b))
                    .collect(),
            )
        })
        .collect()
}

pub fn edge(a: Input, b: Input) -> ChannelOutput {
    ChannelOutput::new(ChannelInput::new(a.0, a.1), ChannelInput::new(b.0, b.1)).unwrap()
}

/// A basis set with its orthogonality relation precomputed.
pub struct Oracle {
    pub set: KsBasisSet,
    pub nb: BTreeMap<Input, Vec<Input>>,
}

impl Oracle {
    pub fn new(set: KsBasisSet) -> Self {
        let nb = neighbours(&set);
        Self { set, nb }
    }

    pub fn bundled() -> Self {
        Self::new(KsBasisSet::bundled())
    }
}

/// Joint distribution of channel outputs when `y` is put on the wire.
pub fn wire_outputs(or: &Oracle, t: i64, y: i64) -> Vec<(ChannelOutput, Q)> {
    let (set, nb) = (&or.set, &or.nb);
    let (q_, d) = (set.q() as i64, set.d() as i64);
    let mut out: BTreeMap<ChannelOutput, Q> = BTreeMap::new();
    let in_form = (0..q_)
        .flat_map(|a| (0..d).map(move |b| (a, b)))
        .find(|&(a, b)| a * t + b == y);
    let sources: Vec<(Input, Q)> = match in_form {
        Some((a, b)) => vec![((a as usize, b as usize), qi(1))],
        None => inputs(set).into_iter().map(|i| (i, q(1, q_ * d))).collect(),
    };
    for (i, pi) in sources {
        let row = &nb[&i];
        for &o in row {
            *out.entry(edge(i, o)).or_insert_with(Q::zero) += &pi * q(1, row.len() as i64);
        }
    }
    out.into_iter().collect()
}

/// Per-message branches `(m, y, s, probability)` for a controller-1 table.
pub fn branches(or: &Oracle, t: i64, pm: &[Q], c1: &[i64]) -> Vec<(usize, i64, ChannelOutput, Q)> {
    let mut out = Vec::new();
    for (m, p) in pm.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let y = m as i64 * t + c1[m];
        for (s, ps) in wire_outputs(or, t, y) {
            out.push((m, y, s, p * ps));
        }
    }
    out
}

pub fn cost(or: &Oracle, t: i64, k: &Q, pm: &[Q], c1: &[i64], c2: &dyn Fn(&ChannelOutput) -> i64) -> Q {
    let mut total = Q::zero();
    for (m, p) in pm.iter().enumerate() {
        total += k * p * qi(c1[m] * c1[m]);
    }
    for (_, y, s, w) in branches(or, t, pm, c1) {
        let z = y + c2(&s);
        total += w * qi(z * z);
    }
    total
}

/// Minimum cost over all integer `c2` for a fixed controller-1 table,
/// trying the two integers around the conditional mean of each output.
pub fn best_cost_for(or: &Oracle, t: i64, k: &Q, pm: &[Q], c1: &[i64]) -> Q {
    let mut per_output: BTreeMap<ChannelOutput, Vec<(i64, Q)>> = BTreeMap::new();
    for (_, y, s, w) in branches(or, t, pm, c1) {
        per_output.entry(s).or_default().push((y, w));
    }
    let mut total = Q::zero();
    for (m, p) in pm.iter().enumerate() {
        total += k * p * qi(c1[m] * c1[m]);
    }
    for ys in per_output.values() {
        let mass: Q = ys.iter().map(|(_, w)| w.clone()).sum();
        let mean = -ys.iter().map(|(y, w)| w * qi(*y)).sum::<Q>() / mass;
        let lo = mean.floor().to_integer();
        let lo: i64 = lo.try_into().unwrap();
        let damp = |c: i64| ys.iter().map(|(y, w)| w * qi((y + c) * (y + c))).sum::<Q>();
        total += damp(lo).min(damp(lo + 1));
    }
    total
}

pub fn uniform(n: usize) -> Vec<Q> {
    vec![q(1, n as i64); n]
}

/// Every table in `[-w, w]^n`, in lexicographic order.
pub fn tables(n: usize, w: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-w..=w).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}
