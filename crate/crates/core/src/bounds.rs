//! Exact inequality checks tying the density constants, the strip-program
//! optima and the search results together.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::heightred::isqrt;
use crate::lp::gamma::{global_cache, GammaCache};
use crate::numtheory::{beta, density, small_prime_part};
use crate::oracle::{brute_force_max_exact_height, DEFAULT_ORACLE_CAP};
use crate::rational::{frac, int, to_fraction_string, Interval, Rational};
use crate::search::compute;

/// Lower and upper rational enclosure of pi.
pub fn pi_interval() -> Interval {
    Interval::new(frac(311, 99), frac(355, 113))
}

/// Per-row density constant `4946/3675`.
pub fn density_slope() -> Rational {
    frac(4946, 3675)
}

/// `3264 pi / 10255` as an interval.
pub fn density_coefficient() -> Interval {
    let pi = pi_interval();
    let c = frac(3264, 10255);
    Interval::new(&c * &pi.lo, &c * &pi.hi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub name: String,
    pub range: String,
    pub holds: bool,
    /// Smallest slack over the checked instances, excluding designated
    /// equalities.
    pub margin: Rational,
    /// Instances attaining equality where it is expected.
    pub equality_at: Vec<u64>,
    /// First failing instance, if any.
    pub first_failure: Option<u64>,
    /// Part of the parameter range that was not checked.
    pub unchecked: Option<String>,
}

impl BoundReport {
    /// `{name, range, holds, margin_num, margin_den, ...}`; optional fields
    /// appear only when set.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::json!({
            "name": self.name,
            "range": self.range,
            "holds": self.holds,
            "margin_num": self.margin.numer().to_string(),
            "margin_den": self.margin.denom().to_string(),
        });
        if !self.equality_at.is_empty() {
            v["equality_at"] = serde_json::json!(self.equality_at);
        }
        if let Some(f) = self.first_failure {
            v["first_failure"] = serde_json::json!(f);
        }
        if let Some(u) = &self.unchecked {
            v["unchecked"] = serde_json::json!(u);
        }
        v.to_string()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} over {}: {} (margin {})",
            self.name,
            self.range,
            if self.holds { "holds" } else { "FAILS" },
            to_fraction_string(&self.margin)
        );
        if !self.equality_at.is_empty() {
            s += &format!(", equality at {:?}", self.equality_at);
        }
        if let Some(u) = &self.unchecked {
            s += &format!(", unchecked {u}");
        }
        s
    }
}

/// Accumulates strict-inequality slacks.
struct Tally {
    margin: Option<Rational>,
    first_failure: Option<u64>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            margin: None,
            first_failure: None,
        }
    }

    fn strict(&mut self, at: u64, slack: Rational) {
        if !slack.is_positive() && self.first_failure.is_none() {
            self.first_failure = Some(at);
        }
        if self.margin.as_ref().is_none_or(|m| slack < *m) {
            self.margin = Some(slack);
        }
    }

    fn report(self, name: &str, range: String) -> BoundReport {
        BoundReport {
            name: name.into(),
            range,
            holds: self.first_failure.is_none(),
            margin: self.margin.unwrap_or_else(Rational::zero),
            equality_at: Vec::new(),
            first_failure: self.first_failure,
            unchecked: None,
        }
    }
}

/// Partial sums of `rho(p_i) + alpha(p_i)`, `p_i` the 210-smooth part of `i`,
/// against `4946/3675 * l` for `l = 1..=210`; equality is expected only at
/// `l = 210`.
pub fn check_sum210() -> BoundReport {
    let slope = density_slope();
    let mut sum = Rational::zero();
    let mut tally = Tally::new();
    let mut equality_at = Vec::new();
    for l in 1..=210u64 {
        let t = density(small_prime_part(l));
        sum += &t.rho + &t.alpha;
        let slack = &slope * int(l as i64) - &sum;
        if slack.is_zero() {
            equality_at.push(l);
        } else {
            tally.strict(l, slack);
        }
    }
    let mut r = tally.report("sum210", "1..=210".into());
    if equality_at.last() != Some(&210) {
        r.holds = false;
    }
    r.equality_at = equality_at;
    r
}

/// The slack `4946/3675 * l - partial sum` at one `l`.
pub fn sum210_slack(l: u64) -> Rational {
    let mut sum = Rational::zero();
    for i in 1..=l {
        let t = density(small_prime_part(i));
        sum += &t.rho + &t.alpha;
    }
    density_slope() * int(l as i64) - sum
}

/// `(3264 pi / 10255) k + (4946/3675) h + 1` enclosed by the pi interval.
pub fn density_bound(k: u64, h: u64) -> Interval {
    let c = density_coefficient();
    let rest = density_slope() * int(h as i64) + Rational::one();
    let kq = Rational::from_integer(k.into());
    Interval::new(&c.lo * &kq + &rest, &c.hi * &kq + &rest)
}

/// `C (h²/2) + B h + 1 < h²/2 + 3` at `h = h0` using the upper end of the
/// pi interval, together with `C < 1`.
pub fn check_density_display(h0: u64) -> BoundReport {
    let mut tally = Tally::new();
    let c = density_coefficient();
    tally.strict(0, Rational::one() - &c.hi);
    let half_sq = Rational::new((h0 as u128 * h0 as u128).into(), 2.into());
    let lhs = &c.hi * &half_sq + density_slope() * int(h0 as i64) + Rational::one();
    tally.strict(h0, half_sq + int(3) - lhs);
    tally.report("density-display", format!("h0 = {h0}"))
}

pub fn size_bound_with(cache: &GammaCache, k: u64, h: u64) -> Result<Rational> {
    if h == 0 || h > k {
        return Err(Error::pre("size_bound needs 1 <= h <= k"));
    }
    Ok(cache.gamma(h)? * int(k as i64) + beta(h))
}

/// `gamma_h k + beta_h`.
pub fn size_bound(k: u64, h: u64) -> Result<Rational> {
    size_bound_with(global_cache(), k, h)
}

/// `|size_bound(k, h) - target| <= tol`, all exact.
pub fn matches_to(k: u64, h: u64, target: &Rational, tol: &Rational) -> Result<bool> {
    Ok((size_bound(k, h)? - target).abs() <= *tol)
}

/// `1892 gamma_h + beta_h < 1895` for `h in 4..=50`, and
/// `gamma_h (3h²/4) + beta_h < 3h²/4 + 3` for `h in 51..=66`.
pub fn check_k0_refined_with(cache: &GammaCache) -> Result<BoundReport> {
    let mut tally = Tally::new();
    for h in 4..=66u64 {
        let g = cache.gamma(h)?;
        let b = beta(h);
        let k = if h <= 50 {
            int(1892)
        } else {
            frac(3 * (h * h) as i64, 4)
        };
        tally.strict(h, &k + int(3) - (g * &k + b));
    }
    Ok(tally.report("k0new", "4..=66".into()))
}

pub fn check_k0_refined() -> Result<BoundReport> {
    check_k0_refined_with(global_cache())
}

/// `3225 gamma_h + beta_h < 3228` for `h in 4..=80`, and
/// `gamma_h (h²/2) + beta_h < h²/2 + 3` for `h in 81..=h_max`.
pub fn check_k0_family_with(cache: &GammaCache, h_max: u64) -> Result<BoundReport> {
    if h_max < 4 {
        return Err(Error::pre("h_max must be at least 4"));
    }
    if h_max > cache.budget() {
        return Err(Error::BudgetExceeded {
            what: "h_max",
            value: h_max,
            budget: cache.budget(),
        });
    }
    let mut tally = Tally::new();
    for h in 4..=h_max {
        let g = cache.gamma(h)?;
        let b = beta(h);
        let k = if h <= 80 {
            int(3225)
        } else {
            frac((h * h) as i64, 2)
        };
        tally.strict(h, &k + int(3) - (g * &k + b));
    }
    let mut r = tally.report("k0", format!("4..={h_max}"));
    if h_max < 41019 {
        r.unchecked = Some(format!("{}..=41019", h_max + 1));
    }
    Ok(r)
}

pub fn check_k0_family(h_max: u64) -> Result<BoundReport> {
    check_k0_family_with(global_cache(), h_max)
}

/// `max{2B²/(1-C)², (beta_{h0} - 1)/(1 - gamma_bound)}` as an interval over
/// the pi enclosure; `gamma_bound` must lie in `(0, 1)` and bound every
/// `gamma_h` for `4 <= h <= h0`.
pub fn k0_formula(gamma_bound: &Rational, h0: u64) -> Result<Interval> {
    if !gamma_bound.is_positive() || *gamma_bound >= Rational::one() {
        return Err(Error::pre("gamma bound must lie in (0, 1)"));
    }
    let b = density_slope();
    let c = density_coefficient();
    let first = |cv: &Rational| {
        let d = Rational::one() - cv;
        int(2) * &b * &b / (&d * &d)
    };
    let second = (beta(h0) - Rational::one()) / (Rational::one() - gamma_bound);
    let lo = first(&c.lo).max(second.clone());
    let hi = first(&c.hi).max(second);
    Ok(Interval::new(lo, hi))
}

/// Largest size of a k-nice set of height exactly `h`, from the oracle for
/// `k <= 12` and from the search otherwise.
pub fn best_at_height(k: u64, h: u64) -> Result<u64> {
    if h == 1 {
        return Ok(k + 2);
    }
    if k <= DEFAULT_ORACLE_CAP {
        return Ok(
            brute_force_max_exact_height(k, h, DEFAULT_ORACLE_CAP)?.map_or(0, |s| s.len() as u64)
        );
    }
    compute(k, h, 1)
}

/// Best size at each height `h <= sqrt(2k)` never exceeds
/// `gamma_h k + beta_h`, for `k` in `lo..=hi`.
pub fn check_lm_size(lo: u64, hi: u64) -> Result<BoundReport> {
    let mut tally = Tally::new();
    for k in lo.max(3)..=hi {
        for h in 1..=isqrt(2 * k).min(k) {
            let best = best_at_height(k, h)?;
            tally.strict(
                k,
                size_bound(k, h)? - int(best as i64) + frac(1, 1_000_000_000),
            );
        }
    }
    let mut r = tally.report("lm-size", format!("{}..={hi}", lo.max(3)));
    // Equality is allowed; the offset above only makes ties count as slack.
    r.margin -= frac(1, 1_000_000_000);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::gamma::gamma_value;

    #[test]
    fn sum210() {
        let r = check_sum210();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.equality_at, vec![105, 210]);
        assert_eq!(sum210_slack(1), frac(1271, 3675));
        assert!(r.margin.is_positive());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["holds"], true);
        assert_eq!(v["equality_at"], serde_json::json!([105, 210]));
        assert!(v["margin_den"].is_string());
    }

    #[test]
    fn density_examples() {
        assert!(density_coefficient().hi < int(1));
        assert!(check_density_display(41020).holds);
        let d = density_bound(1, 1);
        assert!(d.lo < d.hi);
        assert!(d.contains(&(frac(3264 * 314159, 10255 * 100000) + density_slope() + int(1))));
    }

    #[test]
    fn size_bound_examples() {
        assert_eq!(size_bound(24, 1).unwrap(), int(26));
        assert_eq!(size_bound(24, 3).unwrap(), int(24) + frac(13, 3));
        assert!(size_bound(24, 5).unwrap() >= int(30));
        assert_eq!(
            int(1892) * gamma_value(4).unwrap() + beta(4),
            int(1892) * frac(35, 36) + frac(16, 3)
        );
    }

    #[test]
    fn k0_formula_needs_gamma_below_one() {
        assert!(k0_formula(&int(1), 10).is_err());
        let i = k0_formula(&frac(99, 100), 10).unwrap();
        assert!(i.lo <= i.hi);
    }
}
