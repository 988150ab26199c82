//! Closed-form maxima for low heights, the exceptional table, and explicit
//! extremal constructions.

use std::sync::OnceLock;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{NiceSet, Point};
use crate::numtheory::gcd;

/// Rows `k N +delta +pattern` for every exceptional `k`.
const TABLE_K0: &str = "\
1 3 +2 +3
2 4 +2 +4
19 23 +4 +3
23 27 +4 +3
24 30 +6 +2
25 30 +5 +3
33 37 +4 +3
34 38 +4 +2
37 42 +5 +3
47 51 +4 +3
48 54 +6 +2
49 54 +5 +3
53 57 +4 +3
54 59 +5 +2
55 60 +5 +3
61 65 +4 +3
62 67 +5 +4
63 67 +4 +3
64 68 +4 +2
76 80 +4 +2
83 87 +4 +3
84 89 +5 +2
85 89 +4 +3
89 93 +4 +3
90 94 +4 +2
94 98 +4 +2
113 117 +4 +3
114 119 +5 +2
115 119 +4 +3
118 122 +4 +2
119 123 +4 +3
120 126 +6 +2
121 126 +5 +3
124 128 +4 +2
127 132 +5 +3
139 143 +4 +3
141 145 +4 +3
142 147 +5 +2
143 147 +4 +3
144 149 +5 +2
145 149 +4 +3
154 158 +4 +2
167 171 +4 +3
168 174 +6 +2
169 174 +5 +3
174 178 +4 +2
184 188 +4 +2
204 208 +4 +2
208 212 +4 +2
214 217 +3 +2
234 238 +4 +2
244 247 +3 +2
264 268 +4 +2
274 277 +3 +2
294 297 +3 +2
304 307 +3 +2
324 327 +3 +2
354 357 +3 +2
384 387 +3 +2
";

const TABLE_K0_SHA256: &str = "93e91c82d0e1af1c7ad67ae5748461ee01758eb7f2bc1946c106477e9421f8c8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub k: u64,
    pub n: u64,
    pub delta: i64,
    pub pattern: i64,
}

fn parse_signed(s: &str) -> Option<i64> {
    s.strip_prefix('+').unwrap_or(s).parse().ok()
}

/// The exceptional rows, checked against the embedded digest on first use.
pub fn table_k0() -> &'static [TableRow] {
    static ROWS: OnceLock<Vec<TableRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let digest: String = Sha256::digest(TABLE_K0.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(digest, TABLE_K0_SHA256, "embedded table is corrupt");
        TABLE_K0
            .lines()
            .map(|l| {
                let f: Vec<&str> = l.split_whitespace().collect();
                TableRow {
                    k: f[0].parse().expect("k"),
                    n: f[1].parse().expect("N"),
                    delta: parse_signed(f[2]).expect("delta"),
                    pattern: parse_signed(f[3]).expect("pattern"),
                }
            })
            .collect()
    })
}

pub fn table_lookup(k: u64) -> Option<TableRow> {
    let t = table_k0();
    t.binary_search_by_key(&k, |r| r.k).ok().map(|i| t[i])
}

/// `4` if `k mod 6 = 2`, `3` if `k` is odd, `2` otherwise.
pub fn pattern_offset(k: u64) -> u64 {
    match k % 6 {
        2 => 4,
        1 | 3 | 5 => 3,
        _ => 2,
    }
}

/// Maximum size of a k-nice set of height at most three.
pub fn height_le3_max(k: u64) -> Result<u64> {
    if k < 3 {
        return Err(Error::pre("height_le3_max needs k >= 3"));
    }
    k.checked_add(pattern_offset(k))
        .ok_or(Error::Overflow("adding the pattern offset"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueSource {
    Pattern,
    TableK0,
    TinyK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PatternValue {
    pub k: u64,
    pub value: u64,
    pub source: ValueSource,
}

pub fn pattern_or_table(k: u64) -> Result<PatternValue> {
    let (value, source) = match k {
        0 => return Err(Error::pre("k must be positive")),
        1 => (3, ValueSource::TinyK),
        2 => (4, ValueSource::TinyK),
        _ => match table_lookup(k) {
            Some(r) => (r.n, ValueSource::TableK0),
            None => (height_le3_max(k)?, ValueSource::Pattern),
        },
    };
    Ok(PatternValue { k, value, source })
}

fn to_i64(k: u64) -> Result<i64> {
    i64::try_from(k).map_err(|_| Error::Overflow("converting k"))
}

fn build(k: u64, pts: Vec<Point>) -> Result<NiceSet> {
    NiceSet::new(k, pts)
}

/// `{(1,0)} ∪ {(x,1) : 0 <= x <= k}`, size `k + 2`.
pub fn construct_height1(k: u64) -> Result<NiceSet> {
    if k == 0 {
        return Err(Error::pre("k must be positive"));
    }
    let kk = to_i64(k)?;
    let mut pts = vec![Point::new(1, 0)];
    pts.extend((0..=kk).map(|x| Point::new(x, 1)));
    build(k, pts)
}

/// Adds `(k,2)` to the height-one set; needs `k >= 3` odd. Size `k + 3`.
pub fn construct_height2(k: u64) -> Result<NiceSet> {
    if k.is_multiple_of(2) || k < 3 {
        return Err(Error::pre("height-two construction needs odd k >= 3"));
    }
    let kk = to_i64(k)?;
    let mut pts = construct_height1(k)?.points().to_vec();
    pts.push(Point::new(kk, 2));
    build(k, pts)
}

/// Three rows split at `s`, the least integer above `2k/3` with
/// `s ≡ 1 (mod 3)`; needs `k ≡ 2 (mod 6)`, `k >= 8`. Size `k + 4`.
pub fn construct_height3(k: u64) -> Result<NiceSet> {
    if k % 6 != 2 || k < 8 {
        return Err(Error::pre(
            "height-three construction needs k ≡ 2 (mod 6), k >= 8",
        ));
    }
    let kk = to_i64(k)?;
    let mut s = 2 * kk / 3 + 1;
    while s % 3 != 1 {
        s += 1;
    }
    let mut pts = vec![Point::new(1, 0)];
    pts.extend((0..=(kk + s) / 3).map(|x| Point::new(x, 1)));
    pts.extend(
        ((kk + 1) / 3..=(kk + 2 * s - 1) / 3)
            .filter(|x| x % 2 != 0)
            .map(|x| Point::new(x, 2)),
    );
    pts.extend((s..=kk).filter(|x| x % 3 != 0).map(|x| Point::new(x, 3)));
    build(k, pts)
}

/// Best closed-form set for `k >= 1`: height three when `k ≡ 2 (mod 6)`, `k >= 8`,
/// height two for odd `k >= 3`, height one otherwise.
pub fn construct_default(k: u64) -> Result<NiceSet> {
    if k % 6 == 2 && k >= 8 {
        construct_height3(k)
    } else if k % 2 == 1 && k >= 3 {
        construct_height2(k)
    } else {
        construct_height1(k)
    }
}

/// The sets of size `k + 6` for `k = p² - 1`, `p ∈ {5, 7, 11, 13}`.
pub fn construct_extremal(k: u64) -> Result<NiceSet> {
    let p: i64 = match k {
        24 => 5,
        48 => 7,
        120 => 11,
        168 => 13,
        _ => {
            return Err(Error::pre(
                "extremal construction exists for k in {24, 48, 120, 168}",
            ))
        }
    };
    let mut pts = vec![Point::new(1, 0)];
    for i in 1..=p {
        pts.extend(
            (p * i - p..=(p - 1) * i + p)
                .filter(|&z| gcd(z, i) == 1)
                .map(|z| Point::new(z, i)),
        );
    }
    build(k, pts)
}
