//! Branch-enumerating simulation of the entanglement-assisted zero-error
//! code: a maximally entangled pair, the encoder's measurement in a
//! conjugated basis, and the decoder's two-candidate measurement.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::ks::{conjugate_basis, is_orthogonal, KsBasisSet};
use crate::zero_error::{ChannelInput, ChannelOutput, FiniteChannel};

/// Agreement tolerance for floating amplitudes.
pub const TOLERANCE: f64 = 1e-12;
/// Vectors shorter than this are dropped during basis completion.
pub const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &[Complex64]) -> f64 {
        inner(&self.amplitudes, other).norm_sqr()
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `(1/√d) Σ_j |j⟩|j⟩`, amplitude index `a * d + b` for `|a⟩|b⟩`.
pub fn maximally_entangled_state(d: usize) -> PureState {
    let mut amps = vec![Complex64::zero(); d * d];
    let a = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        amps[j * d + j] = Complex64::new(a, 0.0);
    }
    PureState::new(amps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementBranch {
    pub outcome: ChannelInput,
    pub probability: f64,
    /// Same probability from the exact vector data.
    #[serde(with = "crate::exact::fraction")]
    pub exact_probability: Q,
    #[serde(skip)]
    pub residual: PureState,
}

/// Projects the first subsystem of a bipartite state of two `d`-level systems
/// onto `|e⟩` and returns the unnormalised state left on the second.
fn project_first(state: &PureState, d: usize, e: &[Complex64]) -> Vec<Complex64> {
    (0..d)
        .map(|b| (0..d).map(|a| e[a].conj() * state.amplitudes[a * d + b]).sum())
        .collect()
}

/// The encoder for message `m` measures its half of the shared state in the
/// conjugate of basis `m`; outcome `j` leaves `|b_mj⟩` with the decoder.
pub fn encoder_branches(set: &KsBasisSet, m: usize) -> Vec<MeasurementBranch> {
    let d = set.d();
    let psi = maximally_entangled_state(d);
    conjugate_basis(set.basis(m))
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let left = project_first(&psi, d, &e.to_f64());
            let p = norm(&left).powi(2);
            let residual = left.iter().map(|z| z / p.sqrt()).collect();
            // ‖(⟨e|⊗1)|ψ⟩‖² = ‖e‖²/d, and ‖e‖² is an integer ratio
            let exact_p = Q::new(
                (e.numerator_norm_sq() as i128).into(),
                (e.norm_sq() as i128 * d as i128).into(),
            );
            MeasurementBranch {
                outcome: ChannelInput::new(m, j),
                probability: p,
                exact_probability: exact_p,
                residual: PureState::new(residual),
            }
        })
        .collect()
}

/// Orthonormal basis of `C^d` whose first vectors are `candidates` (assumed
/// orthonormal), completed by Gram–Schmidt over the standard basis.
pub fn complete_basis(candidates: &[Vec<Complex64>], d: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = candidates.to_vec();
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = vec![Complex64::zero(); d];
        v[k] = Complex64::new(1.0, 0.0);
        for u in &basis {
            let c = inner(u, &v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= c * ui;
            }
        }
        let n = norm(&v);
        if n > RANK_TOLERANCE {
            basis.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    basis
}

/// Measures `residual` in a basis containing both endpoints of `s` and
/// returns the endpoint observed together with its probability.
pub fn decoder_decode(set: &KsBasisSet, s: &ChannelOutput, residual: &PureState) -> Result<(ChannelInput, f64)> {
    let (a, b) = s.endpoints();
    let (va, vb) = (set.vector(a.m, a.j), set.vector(b.m, b.j));
    if !is_orthogonal(va, vb)? {
        return Err(Error::CandidatesNotOrthogonal(a, b));
    }
    let basis = complete_basis(&[va.to_f64(), vb.to_f64()], set.d());
    let pa = residual.fidelity(&basis[0]);
    let pb = residual.fidelity(&basis[1]);
    if pa.max(pb) < TOLERANCE {
        return Err(Error::ResidualOrthogonal(a, b));
    }
    let (outcome, p) = if pa >= pb { (a, pa) } else { (b, pb) };
    if (p - 1.0).abs() > TOLERANCE {
        return Err(Error::AmbiguousResidual { fidelity: p });
    }
    Ok((outcome, p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumCodingReport {
    pub messages_sent: usize,
    pub total_branches: usize,
    pub all_correct: bool,
    /// Per message: exact sum of encoder branch probabilities.
    #[serde(serialize_with = "serialize_fractions")]
    pub mass_per_message: Vec<Q>,
    pub min_decode_probability: f64,
    pub min_residual_fidelity: f64,
}

fn serialize_fractions<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(exact::fmt_fraction))
}

/// Runs every (message, encoder outcome, channel output) branch and checks
/// the decoder recovers the encoder's input with certainty.
pub fn run_zero_error_quantum(set: &KsBasisSet, ch: &FiniteChannel) -> Result<QuantumCodingReport> {
    let mut total = 0;
    let mut mass = Vec::with_capacity(set.q());
    let mut min_decode = f64::INFINITY;
    let mut min_fid = f64::INFINITY;
    for m in 0..set.q() {
        let branches = encoder_branches(set, m);
        mass.push(branches.iter().map(|b| b.exact_probability.clone()).sum());
        for br in &branches {
            let i = br.outcome;
            let fid = br.residual.fidelity(&set.vector(i.m, i.j).to_f64());
            min_fid = min_fid.min(fid);
            for s in ch.row(i).keys() {
                total += 1;
                let fail = |reason: String| Error::QuantumBranch {
                    message: m,
                    outcome: i,
                    output: s.to_string(),
                    reason,
                };
                let (decoded, p) = decoder_decode(set, s, &br.residual).map_err(|e| fail(e.to_string()))?;
                if decoded != i {
                    return Err(fail(format!("decoded {decoded}")));
                }
                min_decode = min_decode.min(p);
            }
        }
    }
    Ok(QuantumCodingReport {
        messages_sent: set.q(),
        total_branches: total,
        all_correct: true,
        mass_per_message: mass,
        min_decode_probability: min_decode,
        min_residual_fidelity: min_fid,
    })
}
