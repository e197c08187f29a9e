use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::WitsenhausenInstance;
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::zero_error::ChannelOutput;

/// Integer controllers: `c1` on the support of `P_X`, `c2` on channel
/// outputs (0 where unlisted).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "StrategyFile", into = "StrategyFile")]
pub struct DeterministicStrategy {
    pub c1: BTreeMap<i64, i64>,
    pub c2: BTreeMap<ChannelOutput, i64>,
}

impl DeterministicStrategy {
    /// `c1(m·t) = per_message[m]` for every `m ∈ [q]`, `c2 ≡ 0`.
    pub fn from_message_table(inst: &WitsenhausenInstance, per_message: &[i64]) -> Self {
        let c1 = per_message
            .iter()
            .enumerate()
            .map(|(m, &v)| (m as i64 * inst.t(), v))
            .collect();
        Self {
            c1,
            c2: BTreeMap::new(),
        }
    }

    pub fn c1_at(&self, x: i64) -> Result<i64> {
        self.c1.get(&x).copied().ok_or(Error::MissingControl(x))
    }

    pub fn c2_at(&self, s: &ChannelOutput) -> i64 {
        self.c2.get(s).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct StrategyFile {
    c1: Vec<C1Entry>,
    #[serde(default)]
    c2: Vec<C2Entry>,
}

#[derive(Serialize, Deserialize)]
struct C1Entry {
    x: i64,
    value: i64,
}

#[derive(Serialize, Deserialize)]
struct C2Entry {
    output: ChannelOutput,
    value: i64,
}

impl From<StrategyFile> for DeterministicStrategy {
    fn from(f: StrategyFile) -> Self {
        Self {
            c1: f.c1.into_iter().map(|e| (e.x, e.value)).collect(),
            c2: f.c2.into_iter().map(|e| (e.output, e.value)).collect(),
        }
    }
}

impl From<DeterministicStrategy> for StrategyFile {
    fn from(s: DeterministicStrategy) -> Self {
        Self {
            c1: s.c1.into_iter().map(|(x, value)| C1Entry { x, value }).collect(),
            c2: s
                .c2
                .into_iter()
                .map(|(output, value)| C2Entry { output, value })
                .collect(),
        }
    }
}

/// Finite mixture of deterministic strategies selected by a shared seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedRandomnessStrategy {
    components: Vec<(Q, DeterministicStrategy)>,
}

impl SharedRandomnessStrategy {
    pub fn new(components: Vec<(Q, DeterministicStrategy)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("empty mixture".into()));
        }
        if components.iter().any(|(w, _)| *w <= Q::zero()) {
            return Err(Error::InvalidParameter("mixture weights must be positive".into()));
        }
        if !components.iter().map(|(w, _)| w).sum::<Q>().is_one() {
            return Err(Error::InvalidParameter("mixture weights do not sum to 1".into()));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(Q, DeterministicStrategy)] {
        &self.components
    }
}
