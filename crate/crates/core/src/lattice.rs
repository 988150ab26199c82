//! Lattice points, k-nice sets, unimodular maps and convex hulls.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::gcd;
use crate::rational::{frac, Rational};

/// A lattice point `(m, n)`.
///
/// Ordered by `n` first, then `m`, which is the row-by-row order used for
/// every set in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Point {
    pub m: i64,
    pub n: i64,
}

impl From<[i64; 2]> for Point {
    fn from([m, n]: [i64; 2]) -> Self {
        Point { m, n }
    }
}

impl From<Point> for [i64; 2] {
    fn from(p: Point) -> Self {
        [p.m, p.n]
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.m).cmp(&(other.n, other.m))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

impl std::ops::Neg for Point {
    type Output = Point;

    fn neg(self) -> Point {
        Point::new(-self.m, -self.n)
    }
}

impl Point {
    pub const fn new(m: i64, n: i64) -> Self {
        Point { m, n }
    }

    pub fn is_primitive(self) -> bool {
        gcd(self.m, self.n) == 1
    }

    /// Signed determinant `m * n' - m' * n`, checked.
    pub fn det(self, q: Point) -> Result<i64> {
        let a = self.m.checked_mul(q.n);
        let b = q.m.checked_mul(self.n);
        match (a, b) {
            (Some(a), Some(b)) => a
                .checked_sub(b)
                .ok_or(Error::Overflow("taking a determinant")),
            _ => Err(Error::Overflow("taking a determinant")),
        }
    }
}

/// `|p.m * q.n - q.m * p.n|`: the minimum number of crossings of the two
/// curve classes.
pub fn pair_measure(p: Point, q: Point) -> Result<u64> {
    Ok(p.det(q)?.unsigned_abs())
}

/// Largest coordinate magnitude accepted in a set.
pub const MAX_COORD: i64 = 1 << 40;

/// The first defining condition a candidate set fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    OutOfRange(Point),
    Zero,
    NotCoprime(Point),
    Duplicate(Point),
    Antipodal(Point),
    TooFar { p: Point, q: Point, measure: u64 },
    Overflow(Point, Point),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange(p) => write!(f, "{p} has a coordinate beyond 2^40"),
            Violation::Zero => write!(f, "contains (0,0)"),
            Violation::NotCoprime(p) => write!(f, "{p} is not a coprime pair"),
            Violation::Duplicate(p) => write!(f, "{p} appears twice"),
            Violation::Antipodal(p) => write!(f, "contains both {p} and {}", -*p),
            Violation::TooFar { p, q, measure } => {
                write!(f, "|det({p},{q})| = {measure} exceeds k")
            }
            Violation::Overflow(p, q) => write!(f, "det({p},{q}) overflows"),
        }
    }
}

/// Checks the three defining conditions, reporting the first failure.
pub fn check_k_nice(points: &[Point], k: u64) -> Result<(), Violation> {
    let mut seen = BTreeSet::new();
    for &p in points {
        if p.m.unsigned_abs() > MAX_COORD as u64 || p.n.unsigned_abs() > MAX_COORD as u64 {
            return Err(Violation::OutOfRange(p));
        }
        if p == Point::new(0, 0) {
            return Err(Violation::Zero);
        }
        if !p.is_primitive() {
            return Err(Violation::NotCoprime(p));
        }
        if !seen.insert(p) {
            return Err(Violation::Duplicate(p));
        }
    }
    for &p in points {
        if seen.contains(&-p) {
            return Err(Violation::Antipodal(p));
        }
    }
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            let measure = pair_measure(p, q).map_err(|_| Violation::Overflow(p, q))?;
            if measure > k {
                return Err(Violation::TooFar { p, q, measure });
            }
        }
    }
    Ok(())
}

pub fn is_k_nice(points: &[Point], k: u64) -> bool {
    check_k_nice(points, k).is_ok()
}

/// A validated k-nice set, stored sorted by `(n, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NiceSet {
    k: u64,
    points: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct NiceSetWire {
    k: u64,
    points: Vec<Point>,
}

impl NiceSet {
    pub fn new(k: u64, mut points: Vec<Point>) -> Result<Self> {
        if k == 0 {
            return Err(Error::pre("k must be positive"));
        }
        check_k_nice(&points, k).map_err(|v| Error::pre(format!("not {k}-nice: {v}")))?;
        points.sort();
        Ok(NiceSet { k, points })
    }

    /// For images of valid sets under maps known to preserve niceness.
    fn from_sorted_unchecked(k: u64, mut points: Vec<Point>) -> Self {
        points.sort();
        debug_assert!(is_k_nice(&points, k));
        NiceSet { k, points }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// Same points viewed under a larger budget.
    pub fn with_k(&self, k: u64) -> Result<Self> {
        NiceSet::new(k, self.points.clone())
    }

    pub fn height(&self) -> Result<u64> {
        self.points
            .iter()
            .map(|p| p.n.unsigned_abs())
            .max()
            .ok_or_else(|| Error::pre("height of an empty set"))
    }

    pub fn width(&self) -> Result<u64> {
        self.points
            .iter()
            .map(|p| p.m.unsigned_abs())
            .max()
            .ok_or_else(|| Error::pre("width of an empty set"))
    }

    pub fn is_y_nonneg(&self) -> bool {
        self.points.iter().all(|p| p.n >= 0)
    }

    pub fn is_x_nonneg(&self) -> bool {
        self.points.iter().all(|p| p.m >= 0)
    }

    pub fn apply(&self, a: &UnimodularMatrix) -> Result<NiceSet> {
        let pts = self
            .points
            .iter()
            .map(|&p| a.apply(p))
            .collect::<Result<Vec<_>>>()?;
        if pts
            .iter()
            .any(|p| p.m.abs() > MAX_COORD || p.n.abs() > MAX_COORD)
        {
            return Err(Error::Overflow("transformed coordinates exceed 2^40"));
        }
        Ok(NiceSet::from_sorted_unchecked(self.k, pts))
    }

    /// Negates every point below the x-axis, and `(-1, 0)`, so that all
    /// points satisfy `n > 0` or `(m, n) = (1, 0)`.
    pub fn normalize_y_nonneg(&self) -> NiceSet {
        let pts = self
            .points
            .iter()
            .map(|&p| {
                if p.n < 0 || (p.n == 0 && p.m < 0) {
                    -p
                } else {
                    p
                }
            })
            .collect();
        NiceSet::from_sorted_unchecked(self.k, pts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&NiceSetWire {
            k: self.k,
            points: self.points.clone(),
        })
        .expect("plain data serializes")
    }

    /// Parses `{"k": K, "points": [[m, n], ...]}` and re-validates niceness.
    pub fn from_json(s: &str) -> Result<NiceSet> {
        let w: NiceSetWire =
            serde_json::from_str(s).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        NiceSet::new(w.k, w.points)
    }

    /// One `m n` pair per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!("{} {}\n", p.m, p.n));
        }
        out
    }

    /// Parses `m n` lines; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str, k: u64) -> Result<NiceSet> {
        let mut pts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut coord = || -> Result<i64> {
                it.next()
                    .ok_or_else(|| Error::parse(i + 1, "expected `m n`"))?
                    .parse()
                    .map_err(|_| Error::parse(i + 1, "bad integer"))
            };
            let (m, n) = (coord()?, coord()?);
            if it.next().is_some() {
                return Err(Error::parse(i + 1, "trailing fields"));
            }
            pts.push(Point::new(m, n));
        }
        NiceSet::new(k, pts)
    }
}

/// Integer 2x2 matrix `((a, b), (c, d))` with determinant `+-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det.abs() != 1 {
            return Err(Error::pre(format!("determinant {det} is not +-1")));
        }
        Ok(UnimodularMatrix { a, b, c, d })
    }

    pub const IDENTITY: Self = UnimodularMatrix {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    /// `((1, 1), (0, 1))`: `(x, y) -> (x + y, y)`.
    pub const SHEAR: Self = UnimodularMatrix {
        a: 1,
        b: 1,
        c: 0,
        d: 1,
    };
    /// `((0, 1), (-1, 0))`: `(x, y) -> (y, -x)`.
    pub const ROTATION: Self = UnimodularMatrix {
        a: 0,
        b: 1,
        c: -1,
        d: 0,
    };
    /// `((-1, 0), (0, 1))`: reflection in the y-axis.
    pub const MIRROR: Self = UnimodularMatrix {
        a: -1,
        b: 0,
        c: 0,
        d: 1,
    };

    /// `SHEAR^m` for any integer `m`.
    pub fn shear_pow(m: i64) -> Self {
        UnimodularMatrix {
            a: 1,
            b: m,
            c: 0,
            d: 1,
        }
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: Point) -> Result<Point> {
        let ovf = || Error::Overflow("applying a unimodular matrix");
        let dot = |x: i64, y: i64| -> Result<i64> {
            x.checked_mul(p.m)
                .zip(y.checked_mul(p.n))
                .and_then(|(u, v)| u.checked_add(v))
                .ok_or_else(ovf)
        };
        Ok(Point::new(dot(self.a, self.b)?, dot(self.c, self.d)?))
    }

    /// `self * rhs`, i.e. apply `rhs` first.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        let ovf = || Error::Overflow("composing unimodular matrices");
        let e = |x: i64, y: i64, u: i64, v: i64| -> Result<i64> {
            x.checked_mul(u)
                .zip(y.checked_mul(v))
                .and_then(|(s, t)| s.checked_add(t))
                .ok_or_else(ovf)
        };
        Ok(UnimodularMatrix {
            a: e(self.a, self.b, rhs.a, rhs.c)?,
            b: e(self.a, self.b, rhs.b, rhs.d)?,
            c: e(self.c, self.d, rhs.a, rhs.c)?,
            d: e(self.c, self.d, rhs.b, rhs.d)?,
        })
    }
}

pub fn apply_matrix(q: &NiceSet, a: &UnimodularMatrix) -> Result<NiceSet> {
    q.apply(a)
}

pub fn normalize_y_nonneg(q: &NiceSet) -> NiceSet {
    q.normalize_y_nonneg()
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Greedy completion of a y-non-negative k-nice set to an inclusion-wise
/// maximal one.
///
/// Once the set holds two independent points `p`, `q` with `D = |det(p, q)|`,
/// every compatible point is `s p + t q` with `|s|, |t| <= k / D`, so the
/// candidates are the coprime points of that parallelogram's bounding box.
/// Candidates are visited in `(n, m)` order and a single pass reaches the
/// fixpoint because acceptance conditions only tighten.
pub fn maximal_closure(q: &NiceSet) -> Result<NiceSet> {
    if !q.is_y_nonneg() {
        return Err(Error::pre("maximal_closure needs a y-non-negative set"));
    }
    let k = q.k();
    let mut pts: Vec<Point> = q.points().to_vec();
    if pts.is_empty() {
        pts.push(Point::new(1, 0));
    }
    if pts.len() == 1 {
        // Complete to a basis: det(p, r) = 1.
        let p = pts[0];
        let (_, x, y) = ext_gcd(p.m, p.n);
        // p.m * x + p.n * y = 1, so r = (-y, x) has det(p, r) = 1.
        let mut r = Point::new(-y, x);
        if r.n < 0 || (r.n == 0 && r.m < 0) {
            r = -r;
        }
        pts.push(r);
    }
    let mut best: Option<(u64, Point, Point)> = None;
    for (i, &p) in pts.iter().enumerate() {
        for &r in &pts[i + 1..] {
            let d = pair_measure(p, r)?;
            if d > 0 && best.is_none_or(|(bd, _, _)| d > bd) {
                best = Some((d, p, r));
            }
        }
    }
    let (d, p, r) = best.expect("two distinct primitive y-non-negative points are independent");
    let kk = k as i128;
    let dd = d as i128;
    let xmax = kk * (p.m.unsigned_abs() as i128 + r.m.unsigned_abs() as i128) / dd;
    let ymax = kk * (p.n.unsigned_abs() as i128 + r.n.unsigned_abs() as i128) / dd;
    if xmax > i64::MAX as i128 / 4 || ymax > i64::MAX as i128 / 4 {
        return Err(Error::Overflow("bounding the closure region"));
    }
    let (xmax, ymax) = (xmax as i64, ymax as i64);

    let mut set: BTreeSet<Point> = pts.iter().copied().collect();
    for n in 0..=ymax {
        for m in -xmax..=xmax {
            let c = Point::new(m, n);
            if n == 0 && m.abs() != 1 {
                continue;
            }
            if set.contains(&c) || set.contains(&-c) || !c.is_primitive() {
                continue;
            }
            let mut ok = true;
            for &s in &set {
                if pair_measure(s, c)? > k {
                    ok = false;
                    break;
                }
            }
            if ok {
                set.insert(c);
            }
        }
    }
    NiceSet::new(k, set.into_iter().collect())
}

/// True when no y-non-negative point can be added without breaking niceness.
pub fn is_maximal(q: &NiceSet) -> Result<bool> {
    let y = q.normalize_y_nonneg();
    Ok(maximal_closure(&y)?.len() == y.len())
}

/// An equivalent set containing `(1,0)`, `(0,1)`, `(1,1)` and contained in
/// `{0..k} x {0..height}`.
///
/// Requires `q` to be inclusion-wise maximal with `1 <= height <= k`; no
/// canonical position is defined for non-maximal sets.
pub fn canonical_position(q: &NiceSet) -> Result<NiceSet> {
    let k = q.k();
    let y = q.normalize_y_nonneg();
    let h = y.height()?;
    if h < 1 || h > k {
        return Err(Error::pre(format!("height {h} outside 1..={k}")));
    }
    if maximal_closure(&y)?.len() != y.len() {
        return Err(Error::pre("set is not inclusion-wise maximal"));
    }
    if !y.contains(Point::new(1, 0)) {
        return Err(Error::Verification("maximal set lacks (1,0)".into()));
    }
    // Smallest m with x + m y >= 0 for every point.
    let m = y
        .points()
        .iter()
        .filter(|p| p.n > 0)
        .map(|p| div_ceil(-p.m, p.n))
        .max()
        .expect("height >= 1");
    let out = y.apply(&UnimodularMatrix::shear_pow(m))?;
    for need in [Point::new(1, 0), Point::new(0, 1), Point::new(1, 1)] {
        if !out.contains(need) {
            return Err(Error::Verification(format!("canonical set lacks {need}")));
        }
    }
    let kk = k as i64;
    let hh = h as i64;
    if !out
        .points()
        .iter()
        .all(|p| (0..=kk).contains(&p.m) && (0..=hh).contains(&p.n))
    {
        return Err(Error::Verification("canonical set leaves the box".into()));
    }
    Ok(out)
}

pub(crate) fn div_floor(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

pub(crate) fn div_ceil(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

/// Convex hull vertices in counter-clockwise order (monotone chain),
/// collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|p| (p.m, p.n)).collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts.into_iter().map(|(m, n)| Point::new(m, n)).collect();
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i128 {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull.into_iter().map(|(m, n)| Point::new(m, n)).collect()
}

/// Exact area of the convex hull; zero for fewer than three points or a
/// collinear set.
pub fn hull_area(q: &NiceSet) -> Rational {
    let h = convex_hull(q.points());
    if h.len() < 3 {
        return frac(0, 1);
    }
    let mut twice: i128 = 0;
    for i in 0..h.len() {
        let (p, r) = (h[i], h[(i + 1) % h.len()]);
        twice += p.m as i128 * r.n as i128 - r.m as i128 * p.n as i128;
    }
    Rational::new(twice.abs().into(), 2.into())
}
