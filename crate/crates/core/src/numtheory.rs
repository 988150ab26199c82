//! Coprimality densities: `rho`, `alpha`, `beta`, Euler's totient and
//! coprime counting on integer intervals.

use std::sync::{OnceLock, RwLock};

use num_traits::{One, Zero};

use crate::cache;
use crate::error::{Error, Result};
use crate::rational::{frac, int, parse_fraction, to_fraction_string, Rational};

/// Non-negative gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> u64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Distinct prime divisors in increasing order, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn totient(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::pre("totient(0) is undefined"));
    }
    Ok(prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1)))
}

/// `|{z : a <= z <= b, gcd(z, ell) = 1}|`, zero when `a > b`.
///
/// Inclusion-exclusion over the squarefree divisors of `ell`, so the cost is
/// independent of the interval length.
pub fn coprime_count(ell: u64, a: i64, b: i64) -> u64 {
    if a > b {
        return 0;
    }
    let primes = prime_factors(ell);
    // #{0 < z <= x} - #{x < z <= 0} style signed count; F(b) - F(a-1) is exact.
    let f = |x: i64| -> i64 {
        let mut total = 0i64;
        for mask in 0u32..(1 << primes.len()) {
            let mut d = 1i64;
            for (bit, &p) in primes.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    d *= p as i64;
                }
            }
            let term = x.div_euclid(d);
            if mask.count_ones() % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    };
    (f(b) - f(a - 1)) as u64
}

/// `prod_{p | ell} (1 - 1/p)`, i.e. `phi(ell) / ell`.
pub fn rho(ell: u64) -> Rational {
    assert!(ell >= 1, "rho is defined for ell >= 1");
    prime_factors(ell)
        .into_iter()
        .fold(Rational::one(), |acc, p| acc * frac(p as i64 - 1, p as i64))
}

/// Largest excess of the coprime count over `rho(ell) * length` among
/// windows `[a, b]` with `1 <= a <= b <= 2 ell`.
///
/// Scaling by `ell` turns the excess into an integer maximum-subarray problem
/// over `z = 1..=2 ell` with weights `ell * [gcd(z, ell) = 1] - phi(ell)`.
pub fn alpha(ell: u64) -> Rational {
    assert!(ell >= 1, "alpha is defined for ell >= 1");
    let phi = totient(ell).expect("ell >= 1") as i64;
    let coprime = coprime_residues(ell);
    let l = ell as i64;
    let mut best = i64::MIN;
    let mut run = 0i64;
    for z in 1..=2 * ell {
        let w = if coprime[(z % ell) as usize] {
            l - phi
        } else {
            -phi
        };
        run = if run > 0 { run + w } else { w };
        best = best.max(run);
    }
    frac(best, l)
}

/// `mask[r]` is true iff `gcd(r, ell) = 1`, for residues `0..ell`.
pub fn coprime_residues(ell: u64) -> Vec<bool> {
    let mut mask = vec![true; ell as usize];
    if ell == 1 {
        return mask;
    }
    for p in prime_factors(ell) {
        for r in (0..ell).step_by(p as usize) {
            mask[r as usize] = false;
        }
    }
    mask
}

/// Product of those primes among 2, 3, 5, 7 that divide `i`.
pub fn small_prime_part(i: u64) -> u64 {
    assert!(i >= 1);
    [2, 3, 5, 7]
        .into_iter()
        .filter(|p| i.is_multiple_of(*p))
        .product()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityTriple {
    pub ell: u64,
    pub rho: Rational,
    pub alpha: Rational,
    pub beta: Rational,
}

impl DensityTriple {
    pub fn to_record(&self) -> String {
        format!(
            "{} {} {} {}",
            self.ell,
            to_fraction_string(&self.rho),
            to_fraction_string(&self.alpha),
            to_fraction_string(&self.beta)
        )
    }
}

/// Memo of `(rho, alpha, beta)` for `ell = 1..=len`, grown on demand.
///
/// Reads take a shared lock; growth takes the write lock once per extension.
#[derive(Debug, Default)]
pub struct DensityTable {
    rows: RwLock<Vec<DensityTriple>>,
}

pub const DENSITY_CACHE_TAG: &str = "knice-density v1";

impl DensityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, ell: u64) -> DensityTriple {
        assert!(ell >= 1);
        {
            let rows = self.rows.read().unwrap();
            if let Some(t) = rows.get(ell as usize - 1) {
                return t.clone();
            }
        }
        self.extend_to(ell);
        self.rows.read().unwrap()[ell as usize - 1].clone()
    }

    /// `beta(0) = 1`, `beta(ell) = beta(ell - 1) + alpha(ell) + rho(ell)`.
    pub fn beta(&self, ell: u64) -> Rational {
        if ell == 0 {
            Rational::one()
        } else {
            self.get(ell).beta
        }
    }

    pub fn extend_to(&self, ell: u64) {
        let mut rows = self.rows.write().unwrap();
        while (rows.len() as u64) < ell {
            let l = rows.len() as u64 + 1;
            let prev = rows.last().map_or_else(Rational::one, |t| t.beta.clone());
            let (r, a) = (rho(l), alpha(l));
            let beta = prev + &a + &r;
            rows.push(DensityTriple {
                ell: l,
                rho: r,
                alpha: a,
                beta,
            });
        }
    }

    pub fn triples(&self, upto: u64) -> Vec<DensityTriple> {
        self.extend_to(upto);
        self.rows.read().unwrap()[..upto as usize].to_vec()
    }

    pub fn to_cache_text(&self) -> String {
        let rows = self.rows.read().unwrap();
        let recs: Vec<String> = rows.iter().map(DensityTriple::to_record).collect();
        cache::seal(DENSITY_CACHE_TAG, &recs)
    }

    /// Loads a cache file produced by [`DensityTable::to_cache_text`].
    ///
    /// Records must be contiguous from `ell = 1`, satisfy the `beta`
    /// recurrence, and carry the `rho` that `ell` determines.
    pub fn from_cache_text(text: &str) -> Result<Self> {
        let rows = parse_density_cache(text)?;
        Ok(DensityTable {
            rows: RwLock::new(rows),
        })
    }
}

pub fn parse_density_cache(text: &str) -> Result<Vec<DensityTriple>> {
    let body = cache::unseal(DENSITY_CACHE_TAG, text)?;
    let mut out: Vec<DensityTriple> = Vec::with_capacity(body.len());
    let mut prev_beta = Rational::one();
    for (line, rec) in body {
        let f: Vec<&str> = rec.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::parse(line, "expected `ell rho alpha beta`"));
        }
        let ell: u64 = f[0].parse().map_err(|_| Error::parse(line, "bad ell"))?;
        if ell != out.len() as u64 + 1 {
            return Err(Error::parse(line, "records must be contiguous from 1"));
        }
        let at = |s: &str| parse_fraction(s).map_err(|e| Error::parse(line, e.to_string()));
        let (r, a, b) = (at(f[1])?, at(f[2])?, at(f[3])?);
        if r != rho(ell) {
            return Err(Error::parse(line, "rho does not match ell"));
        }
        if a < Rational::zero() || b != &prev_beta + &a + &r {
            return Err(Error::parse(line, "beta recurrence violated"));
        }
        prev_beta = b.clone();
        out.push(DensityTriple {
            ell,
            rho: r,
            alpha: a,
            beta: b,
        });
    }
    Ok(out)
}

static GLOBAL: OnceLock<DensityTable> = OnceLock::new();

/// Process-wide memo shared by [`beta`] and [`density`].
pub fn global_table() -> &'static DensityTable {
    GLOBAL.get_or_init(DensityTable::new)
}

pub fn beta(ell: u64) -> Rational {
    global_table().beta(ell)
}

pub fn density(ell: u64) -> DensityTriple {
    global_table().get(ell)
}

/// Exact `rho(ell) * n + alpha(ell)`, the coprime-count ceiling for any
/// window of `n` consecutive integers.
pub fn window_bound(ell: u64, n: u64) -> Rational {
    rho(ell) * int(n as i64) + alpha(ell)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct double loop over all windows in `[1, 2 ell]`.
    fn alpha_by_windows(ell: u64) -> Rational {
        let r = rho(ell);
        let mut best: Option<Rational> = None;
        for a in 1..=2 * ell as i64 {
            let mut count = 0i64;
            for b in a..=2 * ell as i64 {
                if gcd(b, ell as i64) == 1 {
                    count += 1;
                }
                let v = int(count) - &r * int(b - a + 1);
                if best.as_ref().is_none_or(|x| v > *x) {
                    best = Some(v);
                }
            }
        }
        best.unwrap()
    }

    fn count_by_scan(ell: u64, a: i64, b: i64) -> u64 {
        (a..=b).filter(|&z| gcd(z, ell as i64) == 1).count() as u64
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(2, 0), 2);
        assert_eq!(gcd(1, 1), 1);
        assert_eq!(gcd(-9, 6), 3);
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd(i64::MIN, 0), 1u64 << 63);
    }

    #[test]
    fn totient_examples() {
        assert_eq!(totient(1).unwrap(), 1);
        assert_eq!(totient(6).unwrap(), 2);
        assert_eq!(totient(13).unwrap(), 12);
        assert!(totient(0).is_err());
    }

    #[test]
    fn coprime_count_examples() {
        assert_eq!(coprime_count(6, 1, 6), 2);
        assert_eq!(coprime_count(1, 3, 7), 5);
        assert_eq!(coprime_count(3, 10, 17), 6);
        assert_eq!(coprime_count(3, 10, 9), 0);
        assert_eq!(coprime_count(5, 0, 0), 0);
        assert_eq!(coprime_count(1, 0, 0), 1);
    }

    #[test]
    fn coprime_count_matches_scan() {
        for ell in 1..=40 {
            for a in -45..=45 {
                for b in (a - 1)..=(a + 50) {
                    assert_eq!(
                        coprime_count(ell, a, b),
                        count_by_scan(ell, a, b.max(a - 1))
                    );
                }
            }
        }
    }

    #[test]
    fn rho_alpha_beta_examples() {
        assert_eq!(rho(1), int(1));
        assert_eq!(rho(6), frac(1, 3));
        assert_eq!(rho(20), frac(2, 5));
        assert_eq!(alpha(1), int(0));
        assert_eq!(alpha(10), frac(6, 5));
        assert_eq!(alpha(16), frac(1, 2));
        assert_eq!(beta(0), int(1));
        assert_eq!(beta(1), int(2));
        assert_eq!(beta(6), frac(124, 15));
    }

    #[test]
    fn small_prime_part_examples() {
        assert_eq!(small_prime_part(132), 6);
        assert_eq!(small_prime_part(1), 1);
        assert_eq!(small_prime_part(210), 210);
        assert_eq!(small_prime_part(11 * 13), 1);
    }

    #[test]
    fn alpha_matches_window_enumeration() {
        for ell in 1..=210 {
            assert_eq!(alpha(ell), alpha_by_windows(ell), "ell = {ell}");
        }
    }

    #[test]
    fn rho_is_multiplicative() {
        for a in 1..60u64 {
            for b in 1..60u64 {
                if gcd(a as i64, b as i64) == 1 {
                    assert_eq!(rho(a * b), rho(a) * rho(b));
                }
            }
        }
    }

    #[test]
    fn totient_counts_any_full_window() {
        for i in 1..=100u64 {
            let phi = totient(i).unwrap();
            let il = i as i64;
            for m in -il..=il {
                assert_eq!(coprime_count(i, m + 1, m + il), phi);
            }
        }
    }

    #[test]
    fn table_matches_direct_and_is_thread_safe() {
        let t = DensityTable::new();
        std::thread::scope(|s| {
            for ell in [7u64, 30, 12, 30] {
                let t = &t;
                s.spawn(move || {
                    assert_eq!(t.get(ell).alpha, alpha(ell));
                });
            }
        });
        assert_eq!(t.len(), 30);
        let mut b = int(1);
        for ell in 1..=30 {
            b = b + alpha(ell) + rho(ell);
            assert_eq!(t.beta(ell), b);
        }
    }

    #[test]
    fn cache_roundtrip_and_rejects_corruption() {
        let t = DensityTable::new();
        t.extend_to(25);
        let text = t.to_cache_text();
        let back = DensityTable::from_cache_text(&text).unwrap();
        assert_eq!(back.triples(25), t.triples(25));
        assert!(text.lines().nth(6).unwrap().starts_with("6 1/3 1 124/15"));

        let bad = text.replacen("6 1/3 1 124/15", "6 1/3 1 124/16", 1);
        assert!(DensityTable::from_cache_text(&bad).is_err());
    }

    #[test]
    fn cache_rejects_inconsistent_records_even_with_valid_checksum() {
        let recs = ["1 1 0 2", "2 1/2 1/2 4"];
        let text = cache::seal(DENSITY_CACHE_TAG, &recs);
        assert!(parse_density_cache(&text).is_err());
        let recs = ["1 1 0 2", "3 2/3 2/3 13/3"];
        assert!(parse_density_cache(&cache::seal(DENSITY_CACHE_TAG, &recs)).is_err());
        let recs = ["1 1/2 0 3/2"];
        assert!(parse_density_cache(&cache::seal(DENSITY_CACHE_TAG, &recs)).is_err());
    }
}
