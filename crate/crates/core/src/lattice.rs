//! Index sets of the hexagonal lattice, the sublattice of circle centers
//! and the deterministic order in which radii are computed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Vertex (k, l, m) of Z^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pub k: i64,
    pub l: i64,
    pub m: i64,
}

/// Sublattice label (K, L, M) of an even vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubIndex {
    pub k: i64,
    pub l: i64,
    pub m: i64,
}

impl MultiIndex {
    pub const fn new(k: i64, l: i64, m: i64) -> Self {
        MultiIndex { k, l, m }
    }

    pub fn sum(&self) -> i64 {
        self.k + self.l + self.m
    }

    pub fn is_even(&self) -> bool {
        self.sum().rem_euclid(2) == 0
    }

    /// Taxicab distance from the origin inside Q (k, l >= 0, m <= 0).
    pub fn taxicab(&self) -> i64 {
        self.k.abs() + self.l.abs() + self.m.abs()
    }

    pub fn offset(&self, dk: i64, dl: i64, dm: i64) -> Self {
        MultiIndex::new(self.k + dk, self.l + dl, self.m + dm)
    }

    /// The six axis neighbours, ordered +k, -k, +l, -l, +m, -m.
    pub fn axis_neighbours(&self) -> [MultiIndex; 6] {
        [
            self.offset(1, 0, 0),
            self.offset(-1, 0, 0),
            self.offset(0, 1, 0),
            self.offset(0, -1, 0),
            self.offset(0, 0, 1),
            self.offset(0, 0, -1),
        ]
    }
}

impl SubIndex {
    pub const fn new(k: i64, l: i64, m: i64) -> Self {
        SubIndex { k, l, m }
    }

    pub fn sum(&self) -> i64 {
        self.k + self.l + self.m
    }

    /// max(|K|, |L|, |M|)
    pub fn generation(&self) -> i64 {
        self.k.abs().max(self.l.abs()).max(self.m.abs())
    }

    /// Even vertex whose label is `self`.
    pub fn center(&self) -> MultiIndex {
        MultiIndex::new(-(self.l + self.m), -(self.m + self.k), -(self.k + self.l))
    }

    pub fn offset(&self, dk: i64, dl: i64, dm: i64) -> Self {
        SubIndex::new(self.k + dk, self.l + dl, self.m + dm)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.k, self.l, self.m)
    }
}

impl fmt::Display for SubIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.k, self.l, self.m)
    }
}

pub fn to_sub(p: MultiIndex) -> Result<SubIndex> {
    if !p.is_even() {
        return Err(Error::Parity(format!("{p} has odd sum")));
    }
    let s = p.sum() / 2;
    Ok(SubIndex::new(p.k - s, p.l - s, p.m - s))
}

/// Inverse of [`to_sub`]. The even sum of the original vertex is fixed by
/// the label itself (it equals `-2(K+L+M)`), so any other shift is rejected.
pub fn from_sub(q: SubIndex, parity_shift: i64) -> Result<MultiIndex> {
    if parity_shift.rem_euclid(2) != 0 {
        return Err(Error::Parity(format!("shift {parity_shift} is odd")));
    }
    let s = parity_shift / 2;
    if parity_shift != -2 * q.sum() {
        return Err(Error::Parity(format!(
            "label {q} belongs to the vertex with sum {}, not {parity_shift}",
            -2 * q.sum()
        )));
    }
    Ok(MultiIndex::new(q.k + s, q.l + s, q.m + s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// k >= 0, l >= 0, m <= 0
    Q,
    /// Q restricted to |k+l+m| <= 1
    QH,
    /// L+M <= 0, M+K <= 0, K+L >= 0
    TildeQ,
    /// TildeQ with K, L >= 0, M <= 0 and K+L+M in {0, 1}
    TildeQH,
    /// TildeQ with K+M = 0
    BorderPlaneKM,
    /// TildeQ with L+M = 0
    BorderPlaneLM,
    /// labels (n, 0, -n), n >= 0
    AxisK,
    /// labels (0, n, -n), n >= 0
    AxisL,
}

pub trait Triple {
    fn triple(&self) -> (i64, i64, i64);
}

impl Triple for MultiIndex {
    fn triple(&self) -> (i64, i64, i64) {
        (self.k, self.l, self.m)
    }
}

impl Triple for SubIndex {
    fn triple(&self) -> (i64, i64, i64) {
        (self.k, self.l, self.m)
    }
}

impl Region {
    /// Coordinates are read as (k,l,m) for Q and QH and as (K,L,M)
    /// for the sublattice regions.
    pub fn contains<P: Triple>(self, p: &P) -> bool {
        let (a, b, c) = p.triple();
        let tilde = b + c <= 0 && c + a <= 0 && a + b >= 0;
        match self {
            Region::Q => a >= 0 && b >= 0 && c <= 0,
            Region::QH => a >= 0 && b >= 0 && c <= 0 && (a + b + c).abs() <= 1,
            Region::TildeQ => tilde,
            Region::TildeQH => {
                tilde && a >= 0 && b >= 0 && c <= 0 && (a + b + c == 0 || a + b + c == 1)
            }
            Region::BorderPlaneKM => tilde && a + c == 0,
            Region::BorderPlaneLM => tilde && b + c == 0,
            Region::AxisK => b == 0 && a >= 0 && c == -a,
            Region::AxisL => a == 0 && b >= 0 && c == -b,
        }
    }
}

pub fn region_contains<P: Triple>(r: Region, p: &P) -> bool {
    r.contains(p)
}

/// Which relation produces a radius during the fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Seed,
    /// six-point relation around an intersection point (sum-one labels)
    Hex,
    /// three-point border relation on the K and L axes
    Border,
    /// three-circle relation for interior sum-zero labels
    Tri,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillEntry {
    pub site: SubIndex,
    pub source: Source,
    pub deps: Vec<SubIndex>,
}

/// Sum-zero label (K, L, -K-L).
pub fn a_site(k: i64, l: i64) -> SubIndex {
    SubIndex::new(k, l, -k - l)
}

/// Sum-one label (K, L, 1-K-L).
pub fn b_site(k: i64, l: i64) -> SubIndex {
    SubIndex::new(k, l, 1 - k - l)
}

/// Odd vertex whose six axis neighbours carry the labels used by the
/// hexagonal relation that produces `b_site(k, l)`.
pub fn hex_pivot(k: i64, l: i64) -> SubIndex {
    SubIndex::new(k - 1, l - 1, 1 - k - l)
}

/// Labels entering the hexagonal relation at pivot `p`, in slot order
/// r1..r6 (+k, m-1, +l, -k, m+1, -l).
pub fn hex_slots(p: SubIndex) -> [SubIndex; 6] {
    [
        p.offset(1, 0, 0),
        p.offset(1, 1, 0),
        p.offset(0, 1, 0),
        p.offset(0, 1, 1),
        p.offset(0, 0, 1),
        p.offset(1, 0, 1),
    ]
}

fn hex_entry(k: i64, l: i64) -> FillEntry {
    let p = hex_pivot(k, l);
    let slots = hex_slots(p);
    // zero coefficients drop their pair from the relation
    let ck = -(p.l + p.m + 1);
    let cl = -(p.m + p.k + 1);
    let mut deps = Vec::new();
    if ck != 0 {
        deps.push(slots[0]);
        deps.push(slots[3]);
    }
    if cl != 0 {
        deps.push(slots[2]);
        deps.push(slots[5]);
    }
    deps.push(slots[4]);
    FillEntry {
        site: b_site(k, l),
        source: Source::Hex,
        deps,
    }
}

fn border_entry(n: i64, along_k: bool) -> FillEntry {
    let (site, prev, prev2, side) = if along_k {
        (
            a_site(n, 0),
            a_site(n - 1, 0),
            a_site(n - 2, 0),
            b_site(n - 1, 1),
        )
    } else {
        (
            a_site(0, n),
            a_site(0, n - 1),
            a_site(0, n - 2),
            b_site(1, n - 1),
        )
    };
    FillEntry {
        site,
        source: Source::Border,
        deps: vec![prev, prev2, side],
    }
}

fn tri_entry(k: i64, l: i64) -> FillEntry {
    FillEntry {
        site: a_site(k, l),
        source: Source::Tri,
        deps: vec![b_site(k, l), a_site(k, l - 1), a_site(k - 1, l)],
    }
}

fn build_fill_order(n: i64) -> Vec<FillEntry> {
    let seed = |s: SubIndex| FillEntry {
        site: s,
        source: Source::Seed,
        deps: Vec::new(),
    };
    let mut out = vec![seed(a_site(0, 0))];
    if n == 0 {
        return out;
    }
    out.push(seed(a_site(1, 0)));
    out.push(seed(a_site(0, 1)));
    // sum-zero labels of level K+L need the sum-one labels of the same level
    for level in 2..=n + 1 {
        for k in 1..level {
            out.push(hex_entry(k, level - k));
        }
        if level > n {
            break;
        }
        out.push(border_entry(level, true));
        out.push(border_entry(level, false));
        for k in 1..level {
            out.push(tri_entry(k, level - k));
        }
    }
    out
}

/// Topologically sorted fill of TildeQH up to `generation() <= n`.
/// Results are cached per `n`.
pub fn fill_order(n: i64) -> Arc<[FillEntry]> {
    static CACHE: OnceLock<Mutex<BTreeMap<i64, Arc<[FillEntry]>>>> = OnceLock::new();
    let n = n.max(0);
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| build_fill_order(n).into())
        .clone()
}

/// Sites of TildeQH with generation <= n, enumerated directly from the
/// defining inequalities.
pub fn tilde_qh_sites(n: i64) -> Vec<SubIndex> {
    let mut out = Vec::new();
    for k in 0..=n {
        for l in 0..=n {
            for m in -n..=0 {
                let s = SubIndex::new(k, l, m);
                if Region::TildeQH.contains(&s) && s.generation() <= n {
                    out.push(s);
                }
            }
        }
    }
    out
}
