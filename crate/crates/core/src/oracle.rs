//! Brute-force maximum k-nice sets for tiny `k`, independent of the
//! search module.
//!
//! Every inclusion-wise maximal k-nice set of height `h <= k` is equivalent
//! to one containing `(1,0)`, `(0,1)`, `(1,1)` inside `{0..k} x {0..h}`, and
//! some maximum set has height at most `sqrt(2k)`. The oracle finds a
//! maximum clique of the compatibility graph on that box.

use crate::error::{Error, Result};
use crate::heightred::isqrt;
use crate::lattice::{pair_measure, NiceSet, Point};
use crate::search::SearchOutcome;

pub const DEFAULT_ORACLE_CAP: u64 = 12;

type Bits = Vec<u64>;

fn popcount(b: &Bits) -> u32 {
    b.iter().map(|w| w.count_ones()).sum()
}

fn and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn first_set(b: &Bits) -> Option<usize> {
    b.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Maximum clique by include/exclude branching on the lowest candidate.
struct Clique<'a> {
    adj: &'a [Bits],
    best: Vec<usize>,
    cur: Vec<usize>,
}

impl Clique<'_> {
    fn grow(&mut self, mut cand: Bits) {
        loop {
            if self.cur.len() + popcount(&cand) as usize <= self.best.len() {
                return;
            }
            let Some(v) = first_set(&cand) else {
                self.best = self.cur.clone();
                return;
            };
            cand[v / 64] &= !(1u64 << (v % 64));
            self.cur.push(v);
            self.grow(and(&cand, &self.adj[v]));
            self.cur.pop();
        }
    }
}

fn compatible(p: Point, q: Point, k: u64) -> bool {
    p != q && p != -q && pair_measure(p, q).is_ok_and(|d| d <= k)
}

/// Largest subset of `cands` that is k-nice together with `forced`.
fn max_extension(k: u64, forced: &[Point], cands: &[Point]) -> Vec<Point> {
    let cands: Vec<Point> = cands
        .iter()
        .copied()
        .filter(|c| c.is_primitive() && forced.iter().all(|f| compatible(*f, *c, k)))
        .collect();
    let n = cands.len();
    let words = n.div_ceil(64).max(1);
    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in 0..n {
            if compatible(cands[i], cands[j], k) {
                adj[i][j / 64] |= 1 << (j % 64);
            }
        }
    }
    let mut all = vec![0u64; words];
    for i in 0..n {
        all[i / 64] |= 1 << (i % 64);
    }
    let mut c = Clique {
        adj: &adj,
        best: Vec::new(),
        cur: Vec::new(),
    };
    c.grow(all);
    let mut out: Vec<Point> = forced.to_vec();
    out.extend(c.best.iter().map(|&i| cands[i]));
    out
}

fn check_cap(k: u64, cap: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::pre("k must be positive"));
    }
    if k > cap {
        return Err(Error::BudgetExceeded {
            what: "k",
            value: k,
            budget: cap,
        });
    }
    Ok(())
}

const FORCED: [Point; 3] = [Point::new(1, 0), Point::new(0, 1), Point::new(1, 1)];

fn box_points(k: u64, h: u64) -> Vec<Point> {
    let mut v = Vec::new();
    for n in 0..=h as i64 {
        for m in 0..=k as i64 {
            let p = Point::new(m, n);
            if !FORCED.contains(&p) {
                v.push(p);
            }
        }
    }
    v
}

fn outcome(k: u64, pts: Vec<Point>) -> Result<SearchOutcome> {
    let w = NiceSet::new(k, pts)?;
    Ok(SearchOutcome {
        k,
        max_size: w.len() as u64,
        witness: Some(w),
        per_height: Vec::new(),
    })
}

/// Exhaustive maximum over the canonical box with height cap `h_cap`
/// (default `floor(sqrt(2k))`, at least one).
pub fn brute_force_max_capped(k: u64, h_cap: Option<u64>, cap: u64) -> Result<SearchOutcome> {
    check_cap(k, cap)?;
    let h = h_cap.unwrap_or_else(|| isqrt(2 * k)).max(1);
    if k == 1 {
        // The only canonical box point is the forced triple.
        return outcome(k, FORCED.to_vec());
    }
    outcome(k, max_extension(k, &FORCED, &box_points(k, h)))
}

pub fn brute_force_max(k: u64, h_cap: Option<u64>) -> Result<SearchOutcome> {
    brute_force_max_capped(k, h_cap, DEFAULT_ORACLE_CAP)
}

/// Best size over sets of height exactly `h` in the canonical box, or
/// `None` if no such set exists.
pub fn brute_force_max_exact_height(k: u64, h: u64, cap: u64) -> Result<Option<NiceSet>> {
    check_cap(k, cap)?;
    if h == 0 || h > k {
        return Err(Error::pre("need 1 <= h <= k"));
    }
    let pts = box_points(k, h);
    let (top, rest): (Vec<Point>, Vec<Point>) = pts.into_iter().partition(|p| p.n == h as i64);
    let mut best: Option<Vec<Point>> = None;
    for (idx, t) in top.iter().enumerate() {
        if !t.is_primitive() || !FORCED.iter().all(|f| compatible(*f, *t, k)) {
            continue;
        }
        let mut forced = FORCED.to_vec();
        forced.push(*t);
        // Later top-row points only, so each set is counted from its
        // leftmost top point.
        let mut cands = rest.clone();
        cands.extend(top[idx + 1..].iter().copied());
        let s = max_extension(k, &forced, &cands);
        if best.as_ref().is_none_or(|b| s.len() > b.len()) {
            best = Some(s);
        }
    }
    best.map(|b| NiceSet::new(k, b)).transpose()
}

/// Slower check over the symmetric box `{-k..k} x {0..floor(sqrt(2k))}`
/// with no forced points; `(m, 0)` only for `m > 0`.
pub fn brute_force_max_symmetric(k: u64, cap: u64) -> Result<SearchOutcome> {
    check_cap(k, cap)?;
    let (kk, h) = (k as i64, isqrt(2 * k) as i64);
    let mut cands = Vec::new();
    for n in 0..=h {
        for m in -kk..=kk {
            if n > 0 || m > 0 {
                cands.push(Point::new(m, n));
            }
        }
    }
    outcome(k, max_extension(k, &[], &cands))
}
