use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::ks::{orthogonality_table, KsBasisSet};

/// Channel input `(m, j)`: basis `m`, vector `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct ChannelInput {
    pub m: usize,
    pub j: usize,
}

impl ChannelInput {
    pub fn new(m: usize, j: usize) -> Self {
        Self { m, j }
    }
}

impl From<[usize; 2]> for ChannelInput {
    fn from([m, j]: [usize; 2]) -> Self {
        Self { m, j }
    }
}

impl From<ChannelInput> for [usize; 2] {
    fn from(i: ChannelInput) -> Self {
        [i.m, i.j]
    }
}

impl fmt::Display for ChannelInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.j)
    }
}

/// Unordered pair of distinct inputs, stored smaller first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[ChannelInput; 2]", into = "[ChannelInput; 2]")]
pub struct ChannelOutput {
    lo: ChannelInput,
    hi: ChannelInput,
}

impl ChannelOutput {
    /// `None` when both endpoints coincide.
    pub fn new(a: ChannelInput, b: ChannelInput) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Self { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn endpoints(&self) -> (ChannelInput, ChannelInput) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, i: ChannelInput) -> bool {
        self.lo == i || self.hi == i
    }

    /// The endpoint that is not `i`, if `i` is an endpoint.
    pub fn other(&self, i: ChannelInput) -> Option<ChannelInput> {
        if self.lo == i {
            Some(self.hi)
        } else if self.hi == i {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl TryFrom<[ChannelInput; 2]> for ChannelOutput {
    type Error = String;

    fn try_from([a, b]: [ChannelInput; 2]) -> std::result::Result<Self, String> {
        Self::new(a, b).ok_or_else(|| format!("output endpoints coincide: {a}"))
    }
}

impl From<ChannelOutput> for [ChannelInput; 2] {
    fn from(o: ChannelOutput) -> Self {
        [o.lo, o.hi]
    }
}

impl fmt::Display for ChannelOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

/// Finite channel on `[q] × [d]` with exact probabilities. Rows are sparse:
/// only positive entries are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteChannel {
    q: usize,
    d: usize,
    rows: Vec<BTreeMap<ChannelOutput, Q>>,
}

impl FiniteChannel {
    /// Rows are indexed by `m * d + j`. Every row must sum to exactly one and
    /// put weight only on outputs containing its own input.
    pub fn from_rows(q: usize, d: usize, rows: Vec<BTreeMap<ChannelOutput, Q>>) -> Result<Self> {
        if rows.len() != q * d {
            return Err(Error::InvalidParameter(format!(
                "expected {} rows, got {}",
                q * d,
                rows.len()
            )));
        }
        for (idx, row) in rows.iter().enumerate() {
            let input = ChannelInput::new(idx / d, idx % d);
            let mut total = Q::zero();
            for (o, p) in row {
                let (a, b) = o.endpoints();
                if a.m >= q || b.m >= q || a.j >= d || b.j >= d {
                    return Err(Error::InvalidParameter(format!("output {o} out of range")));
                }
                if !o.contains(input) {
                    return Err(Error::InvalidParameter(format!(
                        "row {input} puts weight on {o}, which does not contain it"
                    )));
                }
                if *p <= Q::zero() {
                    return Err(Error::InvalidParameter(format!(
                        "row {input} stores a non-positive entry for {o}"
                    )));
                }
                total += p;
            }
            if !total.is_one() {
                return Err(Error::InvalidParameter(format!(
                    "row {input} sums to {}",
                    exact::fmt_fraction(&total)
                )));
            }
        }
        Ok(Self { q, d, rows })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn inputs(&self) -> impl Iterator<Item = ChannelInput> + '_ {
        (0..self.q * self.d).map(|i| ChannelInput::new(i / self.d, i % self.d))
    }

    /// The full output alphabet: all unordered pairs of distinct inputs.
    pub fn outputs(&self) -> Vec<ChannelOutput> {
        let inputs: Vec<_> = self.inputs().collect();
        let mut out = Vec::with_capacity(inputs.len() * (inputs.len() - 1) / 2);
        for (a, &x) in inputs.iter().enumerate() {
            for &y in &inputs[a + 1..] {
                out.push(ChannelOutput::new(x, y).expect("distinct"));
            }
        }
        out
    }

    pub fn index(&self, i: ChannelInput) -> usize {
        i.m * self.d + i.j
    }

    pub fn row(&self, i: ChannelInput) -> &BTreeMap<ChannelOutput, Q> {
        &self.rows[self.index(i)]
    }

    pub fn rows(&self) -> &[BTreeMap<ChannelOutput, Q>] {
        &self.rows
    }

    pub fn prob(&self, o: &ChannelOutput, i: ChannelInput) -> Q {
        self.row(i).get(o).cloned().unwrap_or_else(Q::zero)
    }

    /// `T̂_i`: the inputs sharing a positive-probability output with `i`.
    pub fn neighbours(&self, i: ChannelInput) -> Vec<ChannelInput> {
        self.row(i).keys().filter_map(|o| o.other(i)).collect()
    }

    /// Outputs with positive probability under some input, sorted.
    pub fn support_outputs(&self) -> Vec<ChannelOutput> {
        let mut all: Vec<_> = self.rows.iter().flat_map(|r| r.keys().copied()).collect();
        all.sort();
        all.dedup();
        all
    }

    pub fn min_positive_entry(&self) -> Q {
        self.rows
            .iter()
            .flat_map(|r| r.values())
            .min()
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn to_json(&self) -> String {
        let file = ChannelFile {
            q: self.q,
            d: self.d,
            inputs: self.inputs().collect(),
            outputs: self.support_outputs(),
            probabilities: self
                .inputs()
                .flat_map(|i| {
                    self.row(i).iter().map(move |(o, p)| ProbEntry {
                        input: i,
                        output: *o,
                        p: p.clone(),
                    })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("channel serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChannelFile = serde_json::from_str(text)?;
        let mut rows = vec![BTreeMap::new(); file.q * file.d];
        for e in file.probabilities {
            if e.input.m >= file.q || e.input.j >= file.d {
                return Err(Error::Parse(format!("input {} out of range", e.input)));
            }
            if rows[e.input.m * file.d + e.input.j].insert(e.output, e.p).is_some() {
                return Err(Error::Parse(format!("duplicate entry for {} | {}", e.output, e.input)));
            }
        }
        Self::from_rows(file.q, file.d, rows)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    q: usize,
    d: usize,
    inputs: Vec<ChannelInput>,
    outputs: Vec<ChannelOutput>,
    probabilities: Vec<ProbEntry>,
}

#[derive(Serialize, Deserialize)]
struct ProbEntry {
    input: ChannelInput,
    output: ChannelOutput,
    #[serde(with = "crate::exact::fraction")]
    p: Q,
}

/// `N({i, i'} | i) = 1/|T̂_i|` for every `i'` orthogonal to `i`.
pub fn build_ks_channel(set: &KsBasisSet) -> Result<FiniteChannel> {
    let (q, d) = (set.q(), set.d());
    let table = orthogonality_table(set);
    let n = q * d;
    let mut rows = Vec::with_capacity(n);
    for (a, orth) in table.iter().enumerate() {
        let input = ChannelInput::new(a / d, a % d);
        let partners: Vec<_> = (0..n).filter(|&b| orth[b]).collect();
        if partners.is_empty() {
            return Err(Error::EmptyNeighbourhood(input));
        }
        let p = exact::q(1, partners.len() as i64);
        rows.push(
            partners
                .into_iter()
                .map(|b| {
                    let other = ChannelInput::new(b / d, b % d);
                    (ChannelOutput::new(input, other).expect("b != a"), p.clone())
                })
                .collect(),
        );
    }
    FiniteChannel::from_rows(q, d, rows)
}
