//! Height reduction: a verifier certifying that every k-nice set of height
//! `h` has an equivalent set of smaller height, and a constructive reducer
//! down to height `sqrt(2k)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{div_ceil, div_floor, NiceSet, UnimodularMatrix};
use crate::numtheory::gcd;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    NotVerified,
}

/// Where the verifier gave up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightWitness {
    /// `h <= (k - x0) / h`: points left of the axis may be too wide.
    Wide { x0: i64 },
    /// The scan around `(x, y)` found a point of width `w >= h`.
    Point { x0: i64, y: i64, x: i64, w: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HeightVerdict {
    pub k: u64,
    pub h: u64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<HeightWitness>,
}

impl HeightVerdict {
    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }
}

fn small(k: u64) -> Result<i64> {
    // Keeps every product in the scans well inside i64.
    if k > 1 << 40 {
        return Err(Error::Overflow("k too large for the height verifier"));
    }
    Ok(k as i64)
}

pub fn verify_height(k: u64, h: u64) -> Result<HeightVerdict> {
    if h < 2 || h > k {
        return Err(Error::pre(format!(
            "verify_height needs 2 <= h <= k, got h = {h}, k = {k}"
        )));
    }
    let kk = small(k)?;
    let hh = h as i64;
    let fail = |w: HeightWitness| HeightVerdict {
        k,
        h,
        verdict: Verdict::NotVerified,
        witness: Some(w),
    };
    for x0 in 1..=hh / 2 {
        if gcd(x0, hh) != 1 {
            continue;
        }
        if hh * hh <= kk - x0 {
            return Ok(fail(HeightWitness::Wide { x0 }));
        }
        for y in 1..=hh {
            for x in hh..=div_floor(x0 * y + kk, hh) {
                if gcd(x, y) != 1 {
                    continue;
                }
                let z = y.min(x - y);
                // z + k/x < h
                if z * x + kk < hh * x {
                    continue;
                }
                let mut w = 1;
                for y2 in 1..=hh {
                    let lo = div_ceil(y2 * (x0 - hh) - kk, hh);
                    let hi = div_floor(y2 * (x0 - hh) + kk, hh);
                    for x2 in lo..=hi {
                        if gcd(x2, y2) != 1 {
                            continue;
                        }
                        if (x2 * y - (x - y) * y2).abs() > kk {
                            continue;
                        }
                        w = w.max(x2.abs());
                    }
                }
                if w < hh {
                    continue;
                }
                return Ok(fail(HeightWitness::Point { x0, y, x, w }));
            }
        }
    }
    Ok(HeightVerdict {
        k,
        h,
        verdict: Verdict::Verified,
        witness: None,
    })
}

/// `floor(sqrt(n))`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// `floor(sqrt(4k/3))`, the largest `h` with `3h² <= 4k`.
pub fn floor_sqrt_4k_3(k: u64) -> u64 {
    isqrt(4 * k / 3)
}

/// Heights `h` with `sqrt(4k/3) < h <= sqrt(2k)`.
pub fn upper_band(k: u64) -> std::ops::RangeInclusive<u64> {
    floor_sqrt_4k_3(k) + 1..=isqrt(2 * k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightReduction {
    /// Equal to `transform` applied to the input, then made y-non-negative.
    pub set: NiceSet,
    pub transform: UnimodularMatrix,
}

/// Repeatedly shears the top point to `|x0| <= h/2` and rotates while that
/// makes the width smaller than the height.
pub fn reduce_height_sqrt2k_traced(q: &NiceSet) -> Result<HeightReduction> {
    let bound = isqrt(2 * q.k());
    let mut t = UnimodularMatrix::IDENTITY;
    let mut cur = q.normalize_y_nonneg();
    loop {
        let h = cur.height()?;
        if h <= bound.max(1) {
            return Ok(HeightReduction {
                set: cur,
                transform: t,
            });
        }
        let hh = h as i64;
        let top = cur
            .points()
            .iter()
            .find(|p| p.n == hh)
            .copied()
            .expect("height is attained");
        // x0 + m h in [-h/2, h/2]
        let m = -div_floor(2 * top.m + hh, 2 * hh);
        let shear = UnimodularMatrix::shear_pow(m);
        let sheared = cur.apply(&shear)?;
        if sheared.width()? >= h {
            return Err(Error::Verification(format!(
                "width did not drop below height {h}; input is not k-nice"
            )));
        }
        let step = UnimodularMatrix::ROTATION.compose(&shear)?;
        cur = sheared
            .apply(&UnimodularMatrix::ROTATION)?
            .normalize_y_nonneg();
        t = step.compose(&t)?;
    }
}

pub fn reduce_height_sqrt2k(q: &NiceSet) -> Result<NiceSet> {
    Ok(reduce_height_sqrt2k_traced(q)?.set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::construct_extremal;
    use crate::lattice::Point;

    #[test]
    fn verdict_examples() {
        assert!(verify_height(24, 6).unwrap().is_verified());
        for h in [12, 13, 14] {
            assert!(verify_height(100, h).unwrap().is_verified());
        }
        let v = verify_height(3, 2).unwrap();
        assert_eq!(v.verdict, Verdict::NotVerified);
        assert!(v.witness.is_some());
        assert!(verify_height(3, 1).is_err());
        assert!(verify_height(3, 4).is_err());
    }

    #[test]
    fn band() {
        assert_eq!(upper_band(24), 6..=6);
        assert_eq!(upper_band(100), 12..=14);
        assert_eq!(isqrt(48), 6);
        assert_eq!(isqrt(49), 7);
    }

    #[test]
    fn reduces_disguised_extremal_set() {
        let a = construct_extremal(24).unwrap();
        let d = a.apply(&UnimodularMatrix::shear_pow(10)).unwrap();
        let d = d
            .apply(&UnimodularMatrix::new(2, 1, 1, 1).unwrap())
            .unwrap();
        assert!(d.height().unwrap() > 6);
        let r = reduce_height_sqrt2k_traced(&d).unwrap();
        assert!(r.set.height().unwrap() <= 6);
        assert_eq!(r.set.len(), 30);
        assert_eq!(d.apply(&r.transform).unwrap().normalize_y_nonneg(), r.set);
    }

    #[test]
    fn trivial_input_unchanged() {
        let q = NiceSet::new(1, vec![Point::new(1, 0), Point::new(0, 1)]).unwrap();
        assert_eq!(reduce_height_sqrt2k(&q).unwrap(), q);
    }
}
