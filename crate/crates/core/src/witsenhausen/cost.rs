use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{DeterministicStrategy, SharedRandomnessStrategy, WitsenhausenInstance};
use crate::entangled::{decoder_decode, encoder_branches};
use crate::error::{Error, Result};
use crate::exact::{self, Exact, Q};
use crate::zero_error::{nt_output_distribution, ChannelOutput};

/// One positive-probability path `x → y → s → z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignalTrace {
    pub x: i64,
    pub m: usize,
    pub c1_out: i64,
    pub y: i64,
    pub s: ChannelOutput,
    pub c2_out: i64,
    pub z: i64,
    #[serde(with = "crate::exact::fraction")]
    pub probability: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub total: Exact,
    /// `k·E[c1²]`
    pub control: Exact,
    /// `E[z²]`
    pub damping: Exact,
    pub max_abs_c1: i64,
    pub max_abs_z: i64,
    pub traces: Vec<SignalTrace>,
}

impl CostReport {
    pub fn total(&self) -> &Q {
        &self.total.0
    }

    fn from_parts(k: &Q, c1_sq: Q, damping: Q, traces: Vec<SignalTrace>) -> Self {
        let control = k * c1_sq;
        Self {
            total: Exact(&control + &damping),
            control: Exact(control),
            damping: Exact(damping),
            max_abs_c1: traces.iter().map(|t| t.c1_out.abs()).max().unwrap_or(0),
            max_abs_z: traces.iter().map(|t| t.z.abs()).max().unwrap_or(0),
            traces,
        }
    }
}

fn sq(v: i64) -> Q {
    let b = BigInt::from(v);
    Q::from_integer(&b * &b)
}

/// `E[k·c1(x)² + (x + c1(x) + c2(s))²]` by enumeration of every `(x, s)`.
pub fn evaluate_deterministic(inst: &WitsenhausenInstance, strat: &DeterministicStrategy) -> Result<CostReport> {
    let mut c1_sq = Q::zero();
    let mut damping = Q::zero();
    let mut traces = Vec::new();
    for (m, x, pm) in inst.support() {
        let c1 = strat.c1_at(x)?;
        let y = x + c1;
        c1_sq += &pm * sq(c1);
        for (s, p) in nt_output_distribution(y, inst.encoder(), inst.channel()) {
            let c2 = strat.c2_at(&s);
            let z = y + c2;
            let w = &pm * p;
            damping += &w * sq(z);
            traces.push(SignalTrace {
                x,
                m,
                c1_out: c1,
                y,
                s,
                c2_out: c2,
                z,
                probability: w,
            });
        }
    }
    Ok(CostReport::from_parts(inst.k(), c1_sq, damping, traces))
}

/// Weighted combination of the component reports.
pub fn evaluate_sr(inst: &WitsenhausenInstance, strat: &SharedRandomnessStrategy) -> Result<CostReport> {
    let mut total = Q::zero();
    let mut control = Q::zero();
    let mut damping = Q::zero();
    let mut max_c1 = 0;
    let mut max_z = 0;
    let mut traces = Vec::new();
    for (w, component) in strat.components() {
        let r = evaluate_deterministic(inst, component)?;
        total += w * r.total();
        control += w * &r.control.0;
        damping += w * &r.damping.0;
        max_c1 = max_c1.max(r.max_abs_c1);
        max_z = max_z.max(r.max_abs_z);
        traces.extend(r.traces.into_iter().map(|mut t| {
            t.probability *= w;
            t
        }));
    }
    Ok(CostReport {
        total: Exact(total),
        control: Exact(control),
        damping: Exact(damping),
        max_abs_c1: max_c1,
        max_abs_z: max_z,
        traces,
    })
}

/// The entangled strategy: controller 1 adds its measurement outcome `j`,
/// controller 2 decodes `(m, j)` from the channel output and its half of the
/// state and cancels the whole signal.
pub fn evaluate_quantum(inst: &WitsenhausenInstance) -> Result<CostReport> {
    let set = inst.set();
    let t = inst.t();
    let mut c1_sq = Q::zero();
    let mut traces = Vec::new();
    for (m, x, pm) in inst.support() {
        for branch in encoder_branches(set, m) {
            let j = branch.outcome.j as i64;
            let y = x + j;
            let pj = &pm * &branch.exact_probability;
            c1_sq += &pj * sq(j);
            for (s, p) in nt_output_distribution(y, inst.encoder(), inst.channel()) {
                let fail = |reason: String| Error::QuantumBranch {
                    message: m,
                    outcome: branch.outcome,
                    output: s.to_string(),
                    reason,
                };
                let (decoded, _) = decoder_decode(set, &s, &branch.residual).map_err(|e| fail(e.to_string()))?;
                let c2 = -(decoded.m as i64 * t + decoded.j as i64);
                let z = y + c2;
                if z != 0 {
                    return Err(fail(format!("final signal z = {z}")));
                }
                traces.push(SignalTrace {
                    x,
                    m,
                    c1_out: j,
                    y,
                    s,
                    c2_out: c2,
                    z,
                    probability: &pj * p,
                });
            }
        }
    }
    let report = CostReport::from_parts(inst.k(), c1_sq, Q::zero(), traces);
    let ceiling = inst.k() * exact::qi((inst.d() * inst.d()) as i64);
    if *report.total() >= ceiling {
        return Err(Error::InvalidParameter(format!(
            "entangled cost {} is not below k·d² = {}",
            exact::fmt_fraction(report.total()),
            exact::fmt_fraction(&ceiling)
        )));
    }
    Ok(report)
}

/// Per output `s`: the integer nearest to `-E[y | s]` (ties to even), which
/// minimises `E[(y + c2(s))²]`. Only positive-probability outputs are listed.
pub fn optimal_c2_for_c1(inst: &WitsenhausenInstance, c1: &BTreeMap<i64, i64>) -> Result<BTreeMap<ChannelOutput, i64>> {
    let mut mass: BTreeMap<ChannelOutput, (Q, Q)> = BTreeMap::new();
    for (_, x, pm) in inst.support() {
        let y = x + *c1.get(&x).ok_or(Error::MissingControl(x))?;
        for (s, p) in nt_output_distribution(y, inst.encoder(), inst.channel()) {
            let w = &pm * p;
            let e = mass.entry(s).or_insert_with(|| (Q::zero(), Q::zero()));
            e.1 += &w * exact::qi(y);
            e.0 += w;
        }
    }
    mass.into_iter()
        .map(|(s, (w, wy))| {
            let c = exact::round_half_even(&(-wy / w));
            let c = c
                .to_i64()
                .ok_or_else(|| Error::InvalidParameter("c2 value overflows i64".into()))?;
            Ok((s, c))
        })
        .collect()
}

/// `c1` together with its optimal `c2`.
pub fn optimal_strategy(inst: &WitsenhausenInstance, c1: BTreeMap<i64, i64>) -> Result<DeterministicStrategy> {
    let c2 = optimal_c2_for_c1(inst, &c1)?;
    Ok(DeterministicStrategy { c1, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ks::KsBasisSet;
    use crate::witsenhausen::make_instance;
    use num_traits::One;

    fn uniform(t: i64) -> WitsenhausenInstance {
        make_instance(KsBasisSet::bundled(), t, exact::qi(1), None).unwrap()
    }

    fn zero_c1(inst: &WitsenhausenInstance) -> DeterministicStrategy {
        DeterministicStrategy::from_message_table(inst, &vec![0; inst.q()])
    }

    #[test]
    fn zero_strategy_costs() {
        let inst = uniform(4);
        let r = evaluate_deterministic(&inst, &zero_c1(&inst)).unwrap();
        assert_eq!(*r.total(), exact::q(440, 3));
        assert_eq!(r.control.0, Q::zero());
        assert_eq!(r.max_abs_z, 20);

        let mut pm = vec![exact::qi(0); 6];
        pm[0] = exact::qi(1);
        let point = make_instance(KsBasisSet::bundled(), 4, exact::qi(1), Some(pm)).unwrap();
        let r = evaluate_deterministic(&point, &zero_c1(&point)).unwrap();
        assert!(r.total().is_zero());
    }

    #[test]
    fn report_parts_add_up() {
        let inst = uniform(7);
        let strat = DeterministicStrategy::from_message_table(&inst, &[1, -2, 0, 3, 5, -1]);
        let strat = optimal_strategy(&inst, strat.c1).unwrap();
        let r = evaluate_deterministic(&inst, &strat).unwrap();
        assert_eq!(r.total.0, &r.control.0 + &r.damping.0);
        assert!(r.traces.iter().map(|t| t.probability.clone()).sum::<Q>().is_one());
        assert!(r.traces.iter().all(|t| t.z == t.x + t.c1_out + t.c2_out));
    }

    #[test]
    fn missing_c1_is_an_error() {
        let inst = uniform(4);
        let mut strat = zero_c1(&inst);
        strat.c1.remove(&8);
        assert!(matches!(
            evaluate_deterministic(&inst, &strat),
            Err(Error::MissingControl(8))
        ));
    }

    #[test]
    fn mixtures_are_linear() {
        let inst = uniform(5);
        let a = optimal_strategy(&inst, DeterministicStrategy::from_message_table(&inst, &[0; 6]).c1).unwrap();
        let b = DeterministicStrategy::from_message_table(&inst, &[1, 1, 0, 2, 3, 0]);
        let ca = evaluate_deterministic(&inst, &a).unwrap().total().clone();
        let cb = evaluate_deterministic(&inst, &b).unwrap().total().clone();
        let single = SharedRandomnessStrategy::new(vec![(exact::qi(1), a.clone())]).unwrap();
        assert_eq!(*evaluate_sr(&inst, &single).unwrap().total(), ca);
        let half = SharedRandomnessStrategy::new(vec![(exact::q(1, 2), a), (exact::q(1, 2), b)]).unwrap();
        let r = evaluate_sr(&inst, &half).unwrap();
        assert_eq!(*r.total(), (&ca + &cb) / exact::qi(2));
        assert!(r.traces.iter().map(|t| t.probability.clone()).sum::<Q>().is_one());
    }

    #[test]
    fn quantum_cost_is_seven_halves_at_every_scale() {
        for t in [4, 10, 100, 1_000_000] {
            let r = evaluate_quantum(&uniform(t)).unwrap();
            assert_eq!(*r.total(), exact::q(7, 2), "t = {t}");
            assert_eq!(r.traces.len(), 216);
            assert!(r.traces.iter().all(|tr| tr.z == 0));
            assert!(r.damping.0.is_zero());
            assert!(r.traces.iter().map(|t| t.probability.clone()).sum::<Q>().is_one());
        }
        let k3 = make_instance(KsBasisSet::bundled(), 9, exact::qi(3), None).unwrap();
        assert_eq!(*evaluate_quantum(&k3).unwrap().total(), exact::q(21, 2));
    }

    #[test]
    fn point_mass_posterior_cancels_exactly() {
        let mut pm = vec![exact::qi(0); 6];
        pm[2] = exact::qi(1);
        let inst = make_instance(KsBasisSet::bundled(), 10, exact::qi(1), Some(pm)).unwrap();
        let mut c1 = BTreeMap::new();
        c1.insert(20, 3);
        let c2 = optimal_c2_for_c1(&inst, &c1).unwrap();
        assert_eq!(c2.len(), 9);
        assert!(c2.values().all(|&v| v == -23));
        let r = evaluate_deterministic(&inst, &DeterministicStrategy { c1, c2 }).unwrap();
        assert_eq!(*r.total(), exact::qi(9));
        assert!(r.damping.0.is_zero());
    }

    #[test]
    fn two_point_posterior_rounds_to_even() {
        // messages 0 and 1 only, both sent to (0,0) and (1,2) = (0,0,1,1),
        // which share the output {(0,0),(1,2)}
        let set = KsBasisSet::bundled();
        let mut pm = vec![exact::qi(0); 6];
        pm[0] = exact::q(1, 2);
        pm[1] = exact::q(1, 2);
        let inst = make_instance(set, 5, exact::qi(1), Some(pm)).unwrap();
        let c1 = BTreeMap::from([(0, 0), (5, 2)]);
        let c2 = optimal_c2_for_c1(&inst, &c1).unwrap();
        let shared = ChannelOutput::new(
            crate::zero_error::ChannelInput::new(0, 0),
            crate::zero_error::ChannelInput::new(1, 2),
        )
        .unwrap();
        // posterior uniform on {0, 7}: mean 7/2, tie between -3 and -4
        assert_eq!(c2[&shared], -4);
    }

    /// Brute force over `c2(s) ∈ [-qt, qt]` for every output separately.
    #[test]
    fn optimal_c2_matches_brute_force_for_zero_c1() {
        let inst = uniform(4);
        let c1 = zero_c1(&inst).c1;
        let found = optimal_c2_for_c1(&inst, &c1).unwrap();
        let bound = (inst.q() as i64) * inst.t();
        let mut rows: BTreeMap<ChannelOutput, Vec<(Q, i64)>> = BTreeMap::new();
        for (_, x, pm) in inst.support() {
            for (s, p) in nt_output_distribution(x, inst.encoder(), inst.channel()) {
                rows.entry(s).or_default().push((&pm * p, x));
            }
        }
        assert_eq!(rows.len(), found.len());
        for (s, terms) in rows {
            let cost = |c: i64| -> Q { terms.iter().map(|(w, y)| w * sq(y + c)).sum() };
            let best = (-bound..=bound).map(cost).min().unwrap();
            let minimisers: Vec<i64> = (-bound..=bound).filter(|&c| cost(c) == best).collect();
            assert!(minimisers.contains(&found[&s]), "{s}");
            if minimisers.len() > 1 {
                assert_eq!(found[&s] % 2, 0);
            }
        }
    }
}
