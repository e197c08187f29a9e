use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::{ChannelInput, ChannelOutput, FiniteChannel, NoisyChannel};
use crate::error::{Error, Result};
use crate::exact::{self, Q};

/// `ε_t`: integer wire value `x = a·t + b` with `a ∈ [q]`, `b ∈ [d]` goes to
/// input `(a, b)`; anything else to a uniformly random input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EncoderMap {
    t: i64,
    q: usize,
    d: usize,
}

impl EncoderMap {
    pub fn new(t: i64, q: usize, d: usize) -> Result<Self> {
        if t < d as i64 {
            return Err(Error::ScaleTooSmall { t, d });
        }
        Ok(Self { t, q, d })
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The unique `(a, b)` form of `x`, if it has one. With `0 ≤ b < d ≤ t`
    /// the Euclidean split is the only candidate.
    pub fn decompose(&self, x: i64) -> Option<ChannelInput> {
        let a = x.div_euclid(self.t);
        let b = x.rem_euclid(self.t);
        (a >= 0 && (a as usize) < self.q && (b as usize) < self.d).then(|| ChannelInput::new(a as usize, b as usize))
    }

    pub fn wire_value(&self, i: ChannelInput) -> i64 {
        i.m as i64 * self.t + i.j as i64
    }
}

pub fn epsilon_t_distribution(x: i64, enc: &EncoderMap) -> Vec<(ChannelInput, Q)> {
    match enc.decompose(x) {
        Some(i) => vec![(i, exact::qi(1))],
        None => {
            let p = exact::q(1, (enc.q * enc.d) as i64);
            (0..enc.q * enc.d)
                .map(|k| (ChannelInput::new(k / enc.d, k % enc.d), p.clone()))
                .collect()
        }
    }
}

/// `N_t(· | y) = Σ_i ε_t(i | y) N(· | i)`, sorted by output.
pub fn nt_output_distribution(y: i64, enc: &EncoderMap, ch: &FiniteChannel) -> Vec<(ChannelOutput, Q)> {
    let mut acc: BTreeMap<ChannelOutput, Q> = BTreeMap::new();
    for (i, w) in epsilon_t_distribution(y, enc) {
        for (o, p) in ch.row(i) {
            *acc.entry(*o).or_insert_with(Q::zero) += &w * p;
        }
    }
    acc.into_iter().collect()
}

/// `N_t` viewed as a channel on integer wire values.
#[derive(Clone, Copy, Debug)]
pub struct ComposedChannel<'a> {
    pub channel: &'a FiniteChannel,
    pub encoder: EncoderMap,
}

impl NoisyChannel for ComposedChannel<'_> {
    type Input = i64;

    fn output_distribution(&self, y: &i64) -> Vec<(ChannelOutput, Q)> {
        nt_output_distribution(*y, &self.encoder, self.channel)
    }

    fn support(&self, y: &i64) -> Vec<ChannelOutput> {
        match self.encoder.decompose(*y) {
            Some(i) => self.channel.row(i).keys().copied().collect(),
            None => self.channel.support_outputs(),
        }
    }
}
