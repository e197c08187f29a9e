use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::ks::KsBasisSet;
use crate::zero_error::{build_ks_channel, ComposedChannel, EncoderMap, FiniteChannel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum StrategyClass {
    /// Deterministic controllers.
    D,
    /// Deterministic controllers driven by a shared random seed.
    SR,
    /// Controllers measuring a shared entangled state.
    SE,
}

/// `(N_t, P_X^t, k)` with `P_X^t(mt) = P_M(m)`.
#[derive(Clone, Debug)]
pub struct WitsenhausenInstance {
    set: KsBasisSet,
    channel: FiniteChannel,
    encoder: EncoderMap,
    k: Q,
    message_dist: Vec<Q>,
}

/// `message_dist = None` means uniform over `[q]`.
pub fn make_instance(set: KsBasisSet, t: i64, k: Q, message_dist: Option<Vec<Q>>) -> Result<WitsenhausenInstance> {
    let channel = build_ks_channel(&set)?;
    WitsenhausenInstance::with_channel(set, channel, t, k, message_dist)
}

impl WitsenhausenInstance {
    pub fn with_channel(
        set: KsBasisSet,
        channel: FiniteChannel,
        t: i64,
        k: Q,
        message_dist: Option<Vec<Q>>,
    ) -> Result<Self> {
        let (q, d) = (set.q(), set.d());
        let encoder = EncoderMap::new(t, q, d)?;
        if k <= Q::zero() {
            return Err(Error::InvalidParameter(format!(
                "k must be positive, got {}",
                exact::fmt_fraction(&k)
            )));
        }
        let message_dist = message_dist.unwrap_or_else(|| vec![exact::q(1, q as i64); q]);
        if message_dist.len() != q {
            return Err(Error::InvalidParameter(format!(
                "message distribution has {} entries, expected {q}",
                message_dist.len()
            )));
        }
        if message_dist.iter().any(|p| *p < Q::zero()) {
            return Err(Error::InvalidParameter("negative message probability".into()));
        }
        if !message_dist.iter().sum::<Q>().is_one() {
            return Err(Error::InvalidParameter("message distribution does not sum to 1".into()));
        }
        Ok(Self {
            set,
            channel,
            encoder,
            k,
            message_dist,
        })
    }

    /// Same channel and distribution at another scale.
    pub fn at_scale(&self, t: i64) -> Result<Self> {
        Self::with_channel(
            self.set.clone(),
            self.channel.clone(),
            t,
            self.k.clone(),
            Some(self.message_dist.clone()),
        )
    }

    pub fn set(&self) -> &KsBasisSet {
        &self.set
    }

    pub fn channel(&self) -> &FiniteChannel {
        &self.channel
    }

    pub fn encoder(&self) -> &EncoderMap {
        &self.encoder
    }

    pub fn composed(&self) -> ComposedChannel<'_> {
        ComposedChannel {
            channel: &self.channel,
            encoder: self.encoder,
        }
    }

    pub fn t(&self) -> i64 {
        self.encoder.t()
    }

    pub fn k(&self) -> &Q {
        &self.k
    }

    pub fn q(&self) -> usize {
        self.set.q()
    }

    pub fn d(&self) -> usize {
        self.set.d()
    }

    pub fn message_dist(&self) -> &[Q] {
        &self.message_dist
    }

    /// `(m, x = m·t, P_M(m))` for every message with positive probability.
    pub fn support(&self) -> Vec<(usize, i64, Q)> {
        self.message_dist
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > Q::zero())
            .map(|(m, p)| (m, m as i64 * self.t(), p.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_support() {
        let inst = make_instance(KsBasisSet::bundled(), 4, exact::qi(1), None).unwrap();
        let xs: Vec<i64> = inst.support().into_iter().map(|(_, x, _)| x).collect();
        assert_eq!(xs, vec![0, 4, 8, 12, 16, 20]);
    }

    #[test]
    fn point_mass_support() {
        let mut pm = vec![exact::qi(0); 6];
        pm[0] = exact::qi(1);
        let inst = make_instance(KsBasisSet::bundled(), 4, exact::qi(1), Some(pm)).unwrap();
        assert_eq!(inst.support().len(), 1);
        assert_eq!(inst.support()[0].1, 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let set = KsBasisSet::bundled();
        assert!(matches!(
            make_instance(set.clone(), 3, exact::qi(1), None),
            Err(Error::ScaleTooSmall { t: 3, d: 4 })
        ));
        assert!(make_instance(set.clone(), 4, exact::qi(0), None).is_err());
        assert!(make_instance(set.clone(), 4, exact::qi(-1), None).is_err());
        assert!(make_instance(set.clone(), 4, exact::qi(1), Some(vec![exact::q(1, 5); 5])).is_err());
        assert!(make_instance(set, 4, exact::qi(1), Some(vec![exact::q(1, 5); 6])).is_err());
    }
}
