//! The finite channel built from a basis set, its confusability graph,
//! classical zero-error codes, and the integer wire encoder `ε_t`.

mod channel;
mod code;
mod encoder;
mod graph;

pub use channel::{build_ks_channel, ChannelInput, ChannelOutput, FiniteChannel};
pub use code::{
    code_from_independent_set, scan_codes, verify_zero_error, CodeScan, Decoded, NoisyChannel, ZeroErrorCode,
    ZeroErrorVerdict,
};
pub use encoder::{epsilon_t_distribution, nt_output_distribution, ComposedChannel, EncoderMap};
pub use graph::{
    confusability_graph, confusability_graph_from_rows, independence_number, scan_independent_subsets,
    ConfusabilityGraph, IndependentSet, SubsetScan,
};
