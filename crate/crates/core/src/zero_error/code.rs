use std::collections::BTreeMap;
use std::fmt::Debug;

use itertools::Itertools;
use serde::Serialize;

use super::{confusability_graph, ChannelInput, ChannelOutput, FiniteChannel};
use crate::error::{Error, Result};
use crate::exact::Q;

/// A channel whose outputs are input pairs; `Input` is whatever the encoder
/// feeds it.
pub trait NoisyChannel {
    type Input: Clone + Debug;

    fn output_distribution(&self, input: &Self::Input) -> Vec<(ChannelOutput, Q)>;

    /// Outputs with positive probability.
    fn support(&self, input: &Self::Input) -> Vec<ChannelOutput> {
        self.output_distribution(input).into_iter().map(|(o, _)| o).collect()
    }
}

impl NoisyChannel for FiniteChannel {
    type Input = ChannelInput;

    fn output_distribution(&self, input: &ChannelInput) -> Vec<(ChannelOutput, Q)> {
        self.row(*input).iter().map(|(o, p)| (*o, p.clone())).collect()
    }

    fn support(&self, input: &ChannelInput) -> Vec<ChannelOutput> {
        self.row(*input).keys().copied().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoded {
    Message(i64),
    /// Rounding landed exactly between two messages; not resolved.
    Tie,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroErrorCode<W> {
    pub messages: Vec<i64>,
    /// `encoder[k]` is the codeword for `messages[k]`.
    pub encoder: Vec<W>,
    pub decoder: BTreeMap<ChannelOutput, Decoded>,
}

impl<W> ZeroErrorCode<W> {
    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn ties(&self) -> Vec<ChannelOutput> {
        self.decoder
            .iter()
            .filter(|(_, d)| **d == Decoded::Tie)
            .map(|(o, _)| *o)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ZeroErrorVerdict {
    ZeroError {
        messages: usize,
        branches: usize,
    },
    Collision {
        message: i64,
        output: ChannelOutput,
        decoded: i64,
    },
    IncompleteDecoder {
        message: i64,
        output: ChannelOutput,
    },
    Tie {
        message: i64,
        output: ChannelOutput,
    },
}

impl ZeroErrorVerdict {
    pub fn is_zero_error(&self) -> bool {
        matches!(self, ZeroErrorVerdict::ZeroError { .. })
    }
}

/// Walks every (message, positive-probability output) branch and checks the
/// decoder returns the message. The first failing branch is the witness.
pub fn verify_zero_error<C: NoisyChannel>(ch: &C, code: &ZeroErrorCode<C::Input>) -> ZeroErrorVerdict {
    let mut branches = 0;
    for (&message, word) in code.messages.iter().zip(&code.encoder) {
        for output in ch.support(word) {
            branches += 1;
            match code.decoder.get(&output) {
                None => return ZeroErrorVerdict::IncompleteDecoder { message, output },
                Some(Decoded::Tie) => return ZeroErrorVerdict::Tie { message, output },
                Some(&Decoded::Message(decoded)) if decoded != message => {
                    return ZeroErrorVerdict::Collision {
                        message,
                        output,
                        decoded,
                    }
                }
                Some(_) => {}
            }
        }
    }
    ZeroErrorVerdict::ZeroError {
        messages: code.messages.len(),
        branches,
    }
}

/// Message `k` is sent as `set[k]`; every output of `set[k]` decodes to `k`.
pub fn code_from_independent_set(ch: &FiniteChannel, set: &[ChannelInput]) -> Result<ZeroErrorCode<ChannelInput>> {
    let g = confusability_graph(ch);
    for (a, b) in set.iter().tuple_combinations() {
        let va = g
            .vertex_of(*a)
            .ok_or_else(|| Error::InvalidParameter(format!("{a} is not a channel input")))?;
        let vb = g
            .vertex_of(*b)
            .ok_or_else(|| Error::InvalidParameter(format!("{b} is not a channel input")))?;
        if va == vb || g.adjacent(va, vb) {
            return Err(Error::NotIndependent(*a, *b));
        }
    }
    Ok(greedy_code(ch, set))
}

/// First-come decoder: each output decodes to the earliest message reaching it.
fn greedy_code(ch: &FiniteChannel, set: &[ChannelInput]) -> ZeroErrorCode<ChannelInput> {
    let mut decoder = BTreeMap::new();
    for (k, &i) in set.iter().enumerate() {
        for o in ch.row(i).keys() {
            decoder.entry(*o).or_insert(Decoded::Message(k as i64));
        }
    }
    ZeroErrorCode {
        messages: (0..set.len() as i64).collect(),
        encoder: set.to_vec(),
        decoder,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeScan {
    pub messages: usize,
    pub codes_checked: u64,
    pub zero_error_codeword_set: Option<Vec<ChannelInput>>,
}

/// Tries every `size`-subset of inputs as a codebook. Within one codebook the
/// first-come decoder is zero-error whenever any decoder is, so this settles
/// whether a `size`-message deterministic zero-error code exists.
pub fn scan_codes(ch: &FiniteChannel, size: usize) -> CodeScan {
    let inputs: Vec<_> = ch.inputs().collect();
    let mut checked = 0;
    let mut found = None;
    for subset in inputs.into_iter().combinations(size) {
        checked += 1;
        if found.is_none() && verify_zero_error(ch, &greedy_code(ch, &subset)).is_zero_error() {
            found = Some(subset);
        }
    }
    CodeScan {
        messages: size,
        codes_checked: checked,
        zero_error_codeword_set: found,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ks::KsBasisSet;
    use crate::zero_error::{build_ks_channel, independence_number};

    fn bundled() -> FiniteChannel {
        build_ks_channel(&KsBasisSet::bundled()).unwrap()
    }

    #[test]
    fn independent_set_code_is_zero_error() {
        let ch = bundled();
        let alpha = independence_number(&confusability_graph(&ch));
        let code = code_from_independent_set(&ch, &alpha.labels).unwrap();
        assert_eq!(code.len(), 5);
        assert_eq!(
            verify_zero_error(&ch, &code),
            ZeroErrorVerdict::ZeroError {
                messages: 5,
                branches: 45
            }
        );
    }

    #[test]
    fn single_vertex_code() {
        let ch = bundled();
        let code = code_from_independent_set(&ch, &[ChannelInput::new(3, 2)]).unwrap();
        assert!(verify_zero_error(&ch, &code).is_zero_error());
    }

    #[test]
    fn adjacent_codewords_rejected_and_collide() {
        let ch = bundled();
        let a = ChannelInput::new(0, 0);
        let b = ChannelInput::new(0, 1);
        assert!(matches!(
            code_from_independent_set(&ch, &[a, b]),
            Err(Error::NotIndependent(_, _))
        ));
        let shared = ChannelOutput::new(a, b).unwrap();
        let verdict = verify_zero_error(&ch, &greedy_code(&ch, &[a, b]));
        assert_eq!(
            verdict,
            ZeroErrorVerdict::Collision {
                message: 1,
                output: shared,
                decoded: 0
            }
        );
    }

    #[test]
    fn missing_decoder_entry_is_reported() {
        let ch = bundled();
        let mut code = code_from_independent_set(&ch, &[ChannelInput::new(0, 0)]).unwrap();
        let first = *code.decoder.keys().next().unwrap();
        code.decoder.remove(&first);
        assert_eq!(
            verify_zero_error(&ch, &code),
            ZeroErrorVerdict::IncompleteDecoder {
                message: 0,
                output: first
            }
        );
        code.decoder.insert(first, Decoded::Tie);
        assert_eq!(
            verify_zero_error(&ch, &code),
            ZeroErrorVerdict::Tie {
                message: 0,
                output: first
            }
        );
    }
}
