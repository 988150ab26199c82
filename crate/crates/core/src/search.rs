//! Exact branch-and-bound over row intervals for the maximum size of a
//! k-nice set of a given height, and the full pipeline over all heights.

use serde::{Deserialize, Serialize};

use crate::closedform::{construct_default, height_le3_max};
use crate::error::{Error, Result};
use crate::heightred::{floor_sqrt_4k_3, verify_height, Verdict};
use crate::lattice::{div_ceil, div_floor, is_k_nice, NiceSet, Point};
use crate::numtheory::gcd;

/// Largest `k` the interval tables are built for.
pub const MAX_SEARCH_K: u64 = 1 << 20;

/// Coprime counts over row intervals and their windowed maxima.
///
/// `m(i, a, b)` counts `z` in `[a, b]` with `gcd(z, i) = 1`; `mk(i, a, b)`
/// is the largest such count over subintervals of length at most `k / i`.
#[derive(Clone, Debug)]
pub struct IntervalTables {
    k: i64,
    /// `prefix[i][z]` = count over `[0, z)`.
    prefix: Vec<Vec<u32>>,
    /// `window[i] = floor(k / i)`.
    window: Vec<i64>,
    /// `sparse[i][j][a]` = max of `m(i, a', a' + w)` for `a'` in `[a, a + 2^j)`.
    sparse: Vec<Vec<Vec<u32>>>,
}

impl IntervalTables {
    pub fn new(k: u64, h: u64) -> Result<Self> {
        if k > MAX_SEARCH_K {
            return Err(Error::BudgetExceeded {
                what: "k",
                value: k,
                budget: MAX_SEARCH_K,
            });
        }
        let kk = k as i64;
        let len = kk as usize + 1;
        let mut prefix = vec![Vec::new()];
        let mut window = vec![0];
        let mut sparse = vec![Vec::new()];
        for i in 1..=h as i64 {
            let mut p = Vec::with_capacity(len + 1);
            p.push(0u32);
            for z in 0..=kk {
                p.push(p[z as usize] + u32::from(gcd(z, i) == 1));
            }
            let w = kk / i;
            let count = |a: usize, b: usize| p[b + 1] - p[a];
            let base: Vec<u32> = (0..len)
                .map(|a| count(a, (a + w as usize).min(len - 1)))
                .collect();
            let mut levels = vec![base];
            let mut span = 1;
            while 2 * span <= len {
                let prev = levels.last().unwrap();
                let next: Vec<u32> = (0..len)
                    .map(|a| {
                        if a + span < len {
                            prev[a].max(prev[a + span])
                        } else {
                            prev[a]
                        }
                    })
                    .collect();
                levels.push(next);
                span *= 2;
            }
            prefix.push(p);
            window.push(w);
            sparse.push(levels);
        }
        Ok(IntervalTables {
            k: kk,
            prefix,
            window,
            sparse,
        })
    }

    pub fn height(&self) -> u64 {
        self.prefix.len() as u64 - 1
    }

    fn check(&self, i: usize, a: i64, b: i64) {
        assert!(
            i >= 1 && i < self.prefix.len() && 0 <= a && a <= b && b <= self.k,
            "interval ({i}, {a}, {b}) outside the tables"
        );
    }

    pub fn m(&self, i: usize, a: i64, b: i64) -> u64 {
        self.check(i, a, b);
        let p = &self.prefix[i];
        u64::from(p[b as usize + 1] - p[a as usize])
    }

    pub fn mk(&self, i: usize, a: i64, b: i64) -> u64 {
        self.check(i, a, b);
        let w = self.window[i];
        if b - a <= w {
            return self.m(i, a, b);
        }
        let (lo, hi) = (a as usize, (b - w) as usize);
        let j = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let t = &self.sparse[i][j];
        u64::from(t[lo].max(t[hi + 1 - (1 << j)]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputeResult {
    pub value: u64,
    /// Present exactly when `value` exceeds the baseline.
    pub witness: Option<NiceSet>,
    pub nodes: u64,
}

struct Backtrack<'t> {
    k: i64,
    h: usize,
    t: &'t IntervalTables,
    /// `path[l]`: `None` if row `l` was skipped, else its `(a, b)`.
    path: Vec<Option<(i64, i64)>>,
    best: Option<Vec<Option<(i64, i64)>>>,
    nodes: u64,
}

impl Backtrack<'_> {
    fn run(&mut self, mut n: u64, ell: usize, n_gt: u64, l: &[i64], u: &[i64]) -> u64 {
        self.nodes += 1;
        if ell == 0 {
            self.best = Some(self.path.clone());
            return n_gt + 1;
        }
        if ell < self.h {
            let mut np = n_gt + 1;
            for i in 1..ell {
                if l[i - 1] <= u[i - 1] {
                    np += self.t.mk(i, l[i - 1], u[i - 1]);
                }
            }
            if np > n {
                self.path[ell] = None;
                n = self.run(n, ell - 1, n_gt, &l[..ell - 1], &u[..ell - 1]);
            }
        }
        if l[ell - 1] > u[ell - 1] {
            return n;
        }
        let (k, li) = (self.k, ell as i64);
        let mut l2 = vec![0i64; ell - 1];
        let mut u2 = vec![0i64; ell - 1];
        for a in l[ell - 1]..=u[ell - 1] {
            if gcd(a, li) != 1 {
                continue;
            }
            for b in a..=u[ell - 1] {
                if (b - a) * li > k {
                    break;
                }
                if gcd(b, li) != 1 {
                    continue;
                }
                let mab = self.t.m(ell, a, b);
                let mut np = n_gt + mab + 1;
                for i in 1..ell {
                    let ii = i as i64;
                    let lo = l[i - 1]
                        .max(div_ceil(a * ii - k, li))
                        .max(div_ceil(b * ii - k, li));
                    let hi = u[i - 1]
                        .min(div_floor(a * ii + k, li))
                        .min(div_floor(b * ii + k, li));
                    l2[i - 1] = lo;
                    u2[i - 1] = hi;
                    if lo <= hi {
                        np += self.t.mk(i, lo, hi);
                    }
                }
                if np <= n {
                    continue;
                }
                self.path[ell] = Some((a, b));
                n = self.run(n, ell - 1, n_gt + mab, &l2, &u2);
            }
        }
        n
    }
}

fn witness_from_path(k: u64, path: &[Option<(i64, i64)>]) -> Result<NiceSet> {
    let mut pts = vec![Point::new(1, 0)];
    for (i, row) in path.iter().enumerate().skip(1) {
        if let Some((a, b)) = *row {
            let ii = i as i64;
            pts.extend(
                (a..=b)
                    .filter(|&z| gcd(z, ii) == 1)
                    .map(|z| Point::new(z, ii)),
            );
        }
    }
    NiceSet::new(k, pts)
}

/// Maximum size of a k-nice set of height exactly `h` if it exceeds `n`,
/// otherwise `n`; with a witness whenever the baseline is beaten.
pub fn compute_with_witness(k: u64, h: u64, n: u64) -> Result<ComputeResult> {
    if h < 2 || h > k {
        return Err(Error::pre(format!(
            "compute needs 2 <= h <= k, got h = {h}, k = {k}"
        )));
    }
    if n == 0 {
        return Err(Error::pre("baseline must be positive"));
    }
    let tables = IntervalTables::new(k, h)?;
    compute_on(&tables, k, h, n)
}

/// As [`compute_with_witness`] with tables built for at least height `h`.
pub fn compute_on(tables: &IntervalTables, k: u64, h: u64, n: u64) -> Result<ComputeResult> {
    if tables.k != k as i64 || tables.height() < h {
        return Err(Error::pre("tables do not cover (k, h)"));
    }
    let hu = h as usize;
    let kk = k as i64;
    let mut l = vec![1i64; hu];
    l[0] = 0;
    let u = vec![kk; hu];
    let mut bt = Backtrack {
        k: kk,
        h: hu,
        t: tables,
        path: vec![None; hu + 1],
        best: None,
        nodes: 0,
    };
    let value = bt.run(n, hu, 0, &l, &u);
    let witness = if value > n {
        let path = bt.best.as_ref().expect("improvement records a path");
        let w = witness_from_path(k, path)?;
        if w.len() as u64 != value || w.height()? != h {
            return Err(Error::Verification(format!(
                "reconstructed witness for (k={k}, h={h}) has size {} and height {}",
                w.len(),
                w.height()?
            )));
        }
        Some(w)
    } else {
        None
    };
    Ok(ComputeResult {
        value,
        witness,
        nodes: bt.nodes,
    })
}

pub fn compute(k: u64, h: u64, n: u64) -> Result<u64> {
    Ok(compute_with_witness(k, h, n)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightAction {
    /// Every set of this height reduces to a lower one.
    SkippedVerified,
    /// Searched without beating the running maximum.
    Searched,
    /// Searched and raised the running maximum.
    Improved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightRecord {
    pub h: u64,
    pub action: HeightAction,
    /// Running maximum after this height.
    pub result: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub k: u64,
    pub max_size: u64,
    pub witness: Option<NiceSet>,
    pub per_height: Vec<HeightRecord>,
}

#[derive(Serialize, Deserialize)]
struct OutcomeJson {
    k: u64,
    max_size: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<Point>>,
    #[serde(default)]
    per_height: Vec<HeightRecord>,
}

impl SearchOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&OutcomeJson {
            k: self.k,
            max_size: self.max_size,
            witness: self.witness.as_ref().map(|w| w.points().to_vec()),
            per_height: self.per_height.clone(),
        })
        .expect("serializable")
    }

    /// Parses an outcome and re-checks its witness.
    pub fn from_json(s: &str) -> Result<Self> {
        let j: OutcomeJson =
            serde_json::from_str(s).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let witness = match j.witness {
            Some(pts) => {
                if !is_k_nice(&pts, j.k) {
                    return Err(Error::Verification("witness is not k-nice".into()));
                }
                let w = NiceSet::new(j.k, pts)?;
                if w.len() as u64 != j.max_size {
                    return Err(Error::Verification(
                        "witness size differs from max_size".into(),
                    ));
                }
                Some(w)
            }
            None => None,
        };
        Ok(SearchOutcome {
            k: j.k,
            max_size: j.max_size,
            witness,
            per_height: j.per_height,
        })
    }
}

/// Options for [`max_size_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct MaxSizeOptions {
    /// Starting value instead of the closed-form height-three maximum.
    pub baseline: Option<u64>,
    /// Search only this height.
    pub only_height: Option<u64>,
}

pub fn max_size(k: u64) -> Result<SearchOutcome> {
    max_size_with(k, &MaxSizeOptions::default())
}

/// Closed-form start, then a search at every height up to
/// `floor(sqrt(4k/3))` that the height verifier cannot rule out.
pub fn max_size_with(k: u64, opts: &MaxSizeOptions) -> Result<SearchOutcome> {
    if k < 3 {
        return Err(Error::pre(
            "max_size needs k >= 3; k = 1, 2 have closed forms",
        ));
    }
    let floor_n = height_le3_max(k)?;
    let (mut n, mut witness) = match opts.baseline {
        Some(b) if b != floor_n => (b.max(1), None),
        _ => (floor_n, Some(construct_default(k)?)),
    };
    let top = floor_sqrt_4k_3(k);
    let heights: Vec<u64> = match opts.only_height {
        Some(h) => vec![h],
        None => (2..=top).collect(),
    };
    let tables = IntervalTables::new(k, heights.iter().copied().max().unwrap_or(1).max(1))?;
    let mut per_height = Vec::new();
    for h in heights {
        if opts.only_height.is_none() && verify_height(k, h)?.verdict == Verdict::Verified {
            per_height.push(HeightRecord {
                h,
                action: HeightAction::SkippedVerified,
                result: n,
            });
            continue;
        }
        let r = compute_on(&tables, k, h, n)?;
        let action = if r.value > n {
            n = r.value;
            witness = r.witness;
            HeightAction::Improved
        } else {
            HeightAction::Searched
        };
        per_height.push(HeightRecord {
            h,
            action,
            result: n,
        });
    }
    Ok(SearchOutcome {
        k,
        max_size: n,
        witness,
        per_height,
    })
}
