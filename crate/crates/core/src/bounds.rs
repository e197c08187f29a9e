//! Uniform bounds implied by a cost bound `M`: `|c1| ≤ M_X`, `|z| ≤ M_Z`,
//! and the scale `t0 = 2(M_X + M_Z) + 1` beyond which controller 2's output
//! pins down the message.
//!
//! `M_X` and `M_Z` are square roots of rationals; they are kept as their
//! exact squares and every comparison is done by squaring.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Exact, Q};
use crate::witsenhausen::WitsenhausenInstance;
use crate::zero_error::nt_output_distribution;

pub const T0_FORMULA: &str = "t0 = 2(M_X + M_Z) + 1, with M_Z standing in for the undefined M_Y";

/// Smallest positive message probability.
pub fn pxmin(inst: &WitsenhausenInstance) -> Q {
    inst.support()
        .into_iter()
        .map(|(_, _, p)| p)
        .min()
        .expect("a distribution has positive mass somewhere")
}

/// `pxmin × (smallest positive entry of N)`. Bounds the probability of any
/// `(x, s)` pair whose wire value has the `(a, b)` form.
pub fn pzmin_lower_bound(inst: &WitsenhausenInstance) -> Q {
    pxmin(inst) * inst.channel().min_positive_entry()
}

/// Same bound over every wire value, including those `ε_t` spreads
/// uniformly.
pub fn pzmin_lower_bound_any_wire(inst: &WitsenhausenInstance) -> Q {
    let in_form = inst.channel().min_positive_entry();
    let probe = -1; // never of the (a, b) form
    let spread = nt_output_distribution(probe, inst.encoder(), inst.channel())
        .into_iter()
        .map(|(_, p)| p)
        .min()
        .unwrap_or_else(|| in_form.clone());
    pxmin(inst) * in_form.min(spread)
}

/// Smallest non-negative integer `n` with `n² ≥ r`.
pub fn ceil_sqrt(r: &Q) -> BigInt {
    if !r.is_positive() {
        return BigInt::zero();
    }
    let c = r.ceil().to_integer();
    let mut n = c.sqrt();
    while Q::from_integer(&n * &n) < *r {
        n += 1;
    }
    while n.is_positive() && Q::from_integer((&n - 1) * (&n - 1)) >= *r {
        n -= 1;
    }
    n
}

/// Largest integer `n ≥ 0` with `n² ≤ r`.
pub fn floor_sqrt(r: &Q) -> BigInt {
    let c = ceil_sqrt(r);
    if Q::from_integer(&c * &c) == *r {
        c
    } else {
        c - 1
    }
}

/// Exact test of `√a + √b ≤ c` for `a, b ≥ 0`.
pub fn sqrt_sum_le(a: &Q, b: &Q, c: &Q) -> bool {
    if c.is_negative() {
        return false;
    }
    let rhs = c * c - a - b;
    if rhs.is_negative() {
        return false;
    }
    exact::qi(4) * a * b <= &rhs * &rhs
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub m: Exact,
    pub k: Exact,
    pub pxmin: Exact,
    pub pzmin_lower: Exact,
    /// `M_X² = M / (k · pxmin)`
    pub mx_sq: Exact,
    /// `M_Z² = M / pzmin`
    pub mz_sq: Exact,
    pub mx: f64,
    pub mz: f64,
    pub t0: f64,
    /// `⌈M_X⌉`
    pub mx_ceil: i64,
    /// `⌊M_X⌋`: the largest `|c1|` a strategy of cost `≤ M` can use.
    pub mx_floor: i64,
    /// `⌈t0⌉`
    pub t0_ceil: i64,
    pub t0_formula: String,
    pub closed_form: Option<ClosedForm>,
}

/// Checks against `√(6M)`, `√(54M)` and `20√M + 1`, reported when
/// `(pxmin, pzmin) = (1/6, 1/54)` and `k = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub mx_le_sqrt_6m: bool,
    pub mz_le_sqrt_54m: bool,
    pub t0_le_20_sqrt_m_plus_1: bool,
    pub t0_upper: f64,
    /// `⌈20√M + 1⌉`
    pub t0_upper_ceil: i64,
}

fn int(v: BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::InvalidParameter("bound overflows i64".into()))
}

pub fn compute_bounds(m: &Q, k: &Q, pxmin: &Q, pzmin: &Q) -> Result<BoundSet> {
    for (name, v) in [("M", m), ("k", k), ("pxmin", pxmin), ("pzmin", pzmin)] {
        if !v.is_positive() {
            return Err(Error::InvalidParameter(format!("{name} must be positive")));
        }
    }
    let mx_sq = m / (k * pxmin);
    let mz_sq = m / pzmin;
    let mx = exact::to_f64(&mx_sq).sqrt();
    let mz = exact::to_f64(&mz_sq).sqrt();
    let t0 = 2.0 * (mx + mz) + 1.0;

    // smallest n with 2(M_X + M_Z) + 1 ≤ n
    let mut n = (t0.floor() as i64 - 2).max(0);
    while !sqrt_sum_le(&mx_sq, &mz_sq, &exact::q(n - 1, 2)) {
        n += 1;
    }

    let closed_form = (*k == exact::qi(1) && *pxmin == exact::q(1, 6) && *pzmin == exact::q(1, 54)).then(|| {
        let sqrt_m = exact::to_f64(m).sqrt();
        let upper = 20.0 * sqrt_m + 1.0;
        // smallest n with (n - 1)² ≥ 400 M
        let ceil: BigInt = ceil_sqrt(&(exact::qi(400) * m)) + 1;
        ClosedForm {
            mx_le_sqrt_6m: mx_sq <= exact::qi(6) * m,
            mz_le_sqrt_54m: mz_sq <= exact::qi(54) * m,
            // √a + √b ≤ 10√M, both sides non-negative
            t0_le_20_sqrt_m_plus_1: {
                let rhs = exact::qi(100) * m - &mx_sq - &mz_sq;
                !rhs.is_negative() && exact::qi(4) * &mx_sq * &mz_sq <= &rhs * &rhs
            },
            t0_upper: upper,
            t0_upper_ceil: ceil.to_i64().unwrap_or(i64::MAX),
        }
    });

    Ok(BoundSet {
        m: Exact(m.clone()),
        k: Exact(k.clone()),
        pxmin: Exact(pxmin.clone()),
        pzmin_lower: Exact(pzmin.clone()),
        mx_ceil: int(ceil_sqrt(&mx_sq))?,
        mx_floor: int(floor_sqrt(&mx_sq))?,
        mx_sq: Exact(mx_sq),
        mz_sq: Exact(mz_sq),
        mx,
        mz,
        t0,
        t0_ceil: n,
        t0_formula: T0_FORMULA.to_string(),
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ks::KsBasisSet;
    use crate::witsenhausen::make_instance;

    #[test]
    fn minimum_probabilities() {
        let set = KsBasisSet::bundled();
        let inst = make_instance(set.clone(), 10, exact::qi(1), None).unwrap();
        assert_eq!(pxmin(&inst), exact::q(1, 6));
        assert_eq!(pzmin_lower_bound(&inst), exact::q(1, 54));
        assert_eq!(pzmin_lower_bound_any_wire(&inst), exact::q(1, 648));

        let mut pm = vec![exact::qi(0); 6];
        pm[4] = exact::qi(1);
        let point = make_instance(set.clone(), 10, exact::qi(1), Some(pm)).unwrap();
        assert_eq!(pxmin(&point), exact::qi(1));
        assert_eq!(pzmin_lower_bound(&point), exact::q(1, 9));

        let skew = vec![
            exact::q(1, 2),
            exact::q(1, 4),
            exact::q(1, 4),
            exact::qi(0),
            exact::qi(0),
            exact::qi(0),
        ];
        let skew = make_instance(set, 10, exact::qi(1), Some(skew)).unwrap();
        assert_eq!(pxmin(&skew), exact::q(1, 4));
    }

    #[test]
    fn integer_square_roots() {
        assert_eq!(ceil_sqrt(&exact::qi(21)), BigInt::from(5));
        assert_eq!(floor_sqrt(&exact::qi(21)), BigInt::from(4));
        assert_eq!(ceil_sqrt(&exact::qi(36)), BigInt::from(6));
        assert_eq!(floor_sqrt(&exact::qi(36)), BigInt::from(6));
        assert_eq!(ceil_sqrt(&exact::q(1, 4)), BigInt::from(1));
        assert_eq!(floor_sqrt(&exact::q(1, 4)), BigInt::from(0));
        assert!(sqrt_sum_le(&exact::qi(1), &exact::qi(4), &exact::qi(3)));
        assert!(!sqrt_sum_le(&exact::qi(1), &exact::qi(4), &exact::q(299, 100)));
    }

    #[test]
    fn direct_substitution() {
        let b = compute_bounds(&exact::qi(6), &exact::qi(1), &exact::q(1, 6), &exact::q(1, 54)).unwrap();
        assert_eq!(b.mx_sq.0, exact::qi(36));
        assert_eq!(b.mx_ceil, 6);
        assert!((b.mx - 6.0).abs() < 1e-12);
    }

    #[test]
    fn unit_bound() {
        let b = compute_bounds(&exact::qi(1), &exact::qi(1), &exact::q(1, 6), &exact::q(1, 54)).unwrap();
        assert!((b.mx - 6f64.sqrt()).abs() < 1e-12);
        assert!((b.mz - 54f64.sqrt()).abs() < 1e-12);
        let t0 = 2.0 * (6f64.sqrt() + 54f64.sqrt()) + 1.0;
        assert!((b.t0 - t0).abs() < 1e-12);
        assert!(b.t0 <= 21.0);
        assert_eq!(b.t0_ceil, 21);
        let cf = b.closed_form.unwrap();
        assert!(cf.mx_le_sqrt_6m && cf.mz_le_sqrt_54m && cf.t0_le_20_sqrt_m_plus_1);
    }

    #[test]
    fn seven_halves() {
        let b = compute_bounds(&exact::q(7, 2), &exact::qi(1), &exact::q(1, 6), &exact::q(1, 54)).unwrap();
        assert_eq!(b.mx_sq.0, exact::qi(21));
        assert_eq!((b.mx_floor, b.mx_ceil), (4, 5));
        assert_eq!(b.t0_ceil, 38);
        let cf = b.closed_form.unwrap();
        assert!(cf.t0_upper < 39.0);
        assert_eq!(cf.t0_upper_ceil, 39);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(compute_bounds(&exact::qi(0), &exact::qi(1), &exact::qi(1), &exact::qi(1)).is_err());
        assert!(compute_bounds(&exact::qi(1), &exact::qi(-1), &exact::qi(1), &exact::qi(1)).is_err());
    }

    #[test]
    fn closed_form_only_for_the_concrete_parameters() {
        let b = compute_bounds(&exact::qi(1), &exact::qi(2), &exact::q(1, 6), &exact::q(1, 54)).unwrap();
        assert!(b.closed_form.is_none());
    }
}
