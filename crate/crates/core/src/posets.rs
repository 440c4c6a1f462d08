//! Pattern posets and their metrics.
//!
//! A [`Poset`] has at most [`MAX_POSET`] elements; its strict order is kept
//! transitively closed as one up-set bit mask per element.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::embedding;
use crate::lattice::{self, Subset};
use crate::{domain, invalid, matching, Result};

pub const MAX_POSET: usize = 32;
/// Largest `k` accepted for `B<k>`.
pub const MAX_BOOLEAN_PATTERN: u32 = 5;

#[derive(Clone)]
pub struct Poset {
    size: usize,
    /// `up[x]` has bit `y` set iff `x < y`.
    up: Vec<u32>,
    label: String,
    height: usize,
    width: usize,
    dim2: OnceLock<Option<u32>>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.up == other.up
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset({})", self.label)
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Explicit wire form: `{size, relations: [[a, b], ...]}` meaning `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitPoset {
    pub size: usize,
    pub relations: Vec<[usize; 2]>,
}

impl Poset {
    /// Builds a poset from generating relations `a < b`, closing them
    /// transitively and rejecting cycles.
    pub fn from_relations(size: usize, relations: &[[usize; 2]]) -> Result<Poset> {
        let up = closure(size, relations)?;
        let mut p = Poset::from_closed(size, up, String::new());
        p.label = serde_json::to_string(&p.to_explicit()).expect("serialisable");
        Ok(p)
    }

    fn from_closed(size: usize, up: Vec<u32>, label: String) -> Poset {
        let height = longest_chain(size, &up);
        let succ = succ_lists(&up);
        let width = size - matching::matching_size(size, &succ);
        Poset { size, up, label, height, width, dim2: OnceLock::new() }
    }

    pub fn chain(k: usize) -> Result<Poset> {
        check_size(k)?;
        let up = (0..k).map(|x| mask_range(x + 1, k)).collect();
        Ok(Poset::from_closed(k, up, format!("C{k}")))
    }

    pub fn antichain(k: usize) -> Result<Poset> {
        check_size(k)?;
        Ok(Poset::from_closed(k, vec![0; k], format!("A{k}")))
    }

    /// `B_k`: element `x` is the subset of `[k]` with mask `x`.
    pub fn boolean(k: u32) -> Result<Poset> {
        if k > MAX_BOOLEAN_PATTERN {
            return domain(format!("B{k} exceeds the pattern cap B{MAX_BOOLEAN_PATTERN}"));
        }
        let size = 1usize << k;
        let up = (0..size as u32)
            .map(|x| {
                (0..size as u32)
                    .filter(|&y| Subset(x).is_proper_subset(Subset(y)))
                    .fold(0u32, |acc, y| acc | (1 << y))
            })
            .collect();
        Ok(Poset::from_closed(size, up, format!("B{k}")))
    }

    /// `∨`: `a < b`, `a < c`.
    pub fn vee() -> Poset {
        let mut p = Poset::from_relations(3, &[[0, 1], [0, 2]]).expect("acyclic");
        p.label = "V".into();
        p
    }

    /// `∧`: `a < c`, `b < c`.
    pub fn wedge() -> Poset {
        let mut p = Poset::from_relations(3, &[[0, 2], [1, 2]]).expect("acyclic");
        p.label = "W".into();
        p
    }

    /// The poset induced by a family of subsets under inclusion.
    pub fn from_family(family: &[Subset]) -> Result<Poset> {
        check_size(family.len())?;
        let up = family
            .iter()
            .map(|x| {
                family
                    .iter()
                    .enumerate()
                    .filter(|(_, y)| x.is_proper_subset(**y))
                    .fold(0u32, |acc, (j, _)| acc | (1 << j))
            })
            .collect();
        let mut p = Poset::from_closed(family.len(), up, String::new());
        p.label = serde_json::to_string(&p.to_explicit()).expect("serialisable");
        Ok(p)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Poset {
        self.label = label.into();
        self
    }

    /// `x < y`.
    #[inline]
    pub fn less(&self, x: usize, y: usize) -> bool {
        self.up[x] >> y & 1 == 1
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.less(x, y) || self.less(y, x)
    }

    /// Bit mask of elements strictly above `x`.
    #[inline]
    pub fn up_mask(&self, x: usize) -> u32 {
        self.up[x]
    }

    /// Bit mask of elements strictly below `x`.
    pub fn down_mask(&self, x: usize) -> u32 {
        (0..self.size).filter(|&y| self.less(y, x)).fold(0, |acc, y| acc | (1 << y))
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.up[x] == 0
    }

    /// Strict-order matrix, row `x` column `y` true iff `x < y`.
    pub fn matrix(&self) -> Vec<Vec<bool>> {
        (0..self.size)
            .map(|x| (0..self.size).map(|y| self.less(x, y)).collect())
            .collect()
    }

    /// Size of a longest chain, `h(P)`.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Size of a largest antichain, `w(P)`.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Partition into `w(P)` chains; each chain bottom-up.
    pub fn dilworth_partition(&self) -> Vec<Vec<usize>> {
        matching::min_chain_partition(&succ_lists(&self.up))
            .into_iter()
            .map(|c| c.into_iter().map(|x| x as usize).collect())
            .collect()
    }

    /// A maximum antichain (ascending element indices).
    pub fn max_antichain(&self) -> Vec<usize> {
        matching::max_antichain(&succ_lists(&self.up))
            .into_iter()
            .map(|x| x as usize)
            .collect()
    }

    /// `Some(k)` iff the poset is the `k`-chain.
    pub fn as_chain(&self) -> Option<usize> {
        (self.height == self.size).then_some(self.size)
    }

    /// `Some(k)` iff the poset is the `k`-antichain.
    pub fn as_antichain(&self) -> Option<usize> {
        (self.width == self.size).then_some(self.size)
    }

    /// `Some(k)` iff the poset is isomorphic to `B_k`.
    pub fn as_boolean(&self) -> Option<u32> {
        if !self.size.is_power_of_two() {
            return None;
        }
        let k = self.size.trailing_zeros();
        let mins: Vec<usize> = (0..self.size).filter(|&x| self.down_mask(x) == 0).collect();
        let [bottom] = mins[..] else { return None };
        let atoms: Vec<usize> = (0..self.size)
            .filter(|&x| x != bottom && self.down_mask(x) == 1 << bottom)
            .collect();
        if atoms.len() != k as usize {
            return None;
        }
        let image: Vec<u32> = (0..self.size)
            .map(|x| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a == x || self.less(a, x))
                    .fold(0u32, |acc, (i, _)| acc | (1 << i))
            })
            .collect();
        let mut seen = vec![false; self.size];
        for &m in &image {
            if std::mem::replace(&mut seen[m as usize], true) {
                return None;
            }
        }
        for x in 0..self.size {
            for y in 0..self.size {
                if self.less(x, y) != Subset(image[x]).is_proper_subset(Subset(image[y])) {
                    return None;
                }
            }
        }
        Some(k)
    }

    /// 2-dimension with the default embedding budget, cached.
    pub fn dim2(&self) -> Option<u32> {
        *self
            .dim2
            .get_or_init(|| two_dimension(self, embedding::DEFAULT_EMBED_BUDGET).ok())
    }

    /// Explicit form listing the cover relations.
    pub fn to_explicit(&self) -> ExplicitPoset {
        let mut relations = Vec::new();
        for x in 0..self.size {
            for y in 0..self.size {
                if self.less(x, y) && self.up[x] & self.down_mask(y) == 0 {
                    relations.push([x, y]);
                }
            }
        }
        ExplicitPoset { size: self.size, relations }
    }
}

fn check_size(k: usize) -> Result<()> {
    if k > MAX_POSET {
        return domain(format!("pattern of {k} elements exceeds the cap of {MAX_POSET}"));
    }
    Ok(())
}

fn mask_range(lo: usize, hi: usize) -> u32 {
    (lo..hi).fold(0u32, |acc, y| acc | (1 << y))
}

fn closure(size: usize, relations: &[[usize; 2]]) -> Result<Vec<u32>> {
    check_size(size)?;
    let mut up = vec![0u32; size];
    for &[a, b] in relations {
        if a >= size || b >= size {
            return invalid(format!("relation [{a}, {b}] refers to an element outside 0..{size}"));
        }
        up[a] |= 1 << b;
    }
    // Warshall over bit rows.
    for k in 0..size {
        for i in 0..size {
            if up[i] >> k & 1 == 1 {
                up[i] |= up[k];
            }
        }
    }
    if let Some(x) = (0..size).find(|&x| up[x] >> x & 1 == 1) {
        return invalid(format!("relations contain a cycle through element {x}"));
    }
    Ok(up)
}

fn succ_lists(up: &[u32]) -> Vec<Vec<u32>> {
    up.iter()
        .map(|&m| Subset(m).elements().map(|e| e - 1).collect())
        .collect()
}

fn longest_chain(size: usize, up: &[u32]) -> usize {
    // Elements sorted by number of predecessors form a linear extension.
    let mut below = vec![0usize; size];
    for x in 0..size {
        for y in 0..size {
            if up[x] >> y & 1 == 1 {
                below[y] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by_key(|&x| below[x]);
    let mut best = vec![1usize; size];
    for &x in &order {
        for y in 0..size {
            if up[x] >> y & 1 == 1 {
                best[y] = best[y].max(best[x] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

/// Smallest `n` such that `B_n` contains `P` as a strong subposet.
///
/// Levels too short or too narrow for `P` are skipped without searching.
pub fn two_dimension(p: &Poset, budget: u64) -> Result<u32, embedding::BudgetExceeded> {
    let mut n = (p.size().max(1) as f64).log2().ceil() as u32;
    loop {
        let tall_enough = p.height() <= n as usize + 1;
        let wide_enough = p.width() as u64 <= lattice::binomial(n, n / 2);
        if tall_enough && wide_enough {
            let family = lattice::Lattice::new(n).expect("n ≤ pattern size ≤ 32").subsets().to_vec();
            if embedding::find_copy_budgeted(&family, p, budget)?.is_some() {
                return Ok(n);
            }
        }
        n += 1;
    }
}

/// Parses the pattern grammar: `C<k>`, `A<k>`, `B<k>`, `V`, `W`, or an
/// explicit `{size, relations}` JSON object.
pub fn parse_spec(spec: &str) -> Result<Poset> {
    let s = spec.trim();
    if s.starts_with('{') {
        let e: ExplicitPoset = serde_json::from_str(s)
            .map_err(|err| crate::Error::Invalid(format!("bad explicit poset {s:?}: {err}")))?;
        return Poset::from_relations(e.size, &e.relations);
    }
    match s {
        "V" | "v" | "∨" | "vee" => return Ok(Poset::vee()),
        "W" | "w" | "∧" | "wedge" => return Ok(Poset::wedge()),
        _ => {}
    }
    let mut chars = s.chars();
    let kind = chars.next().map(|c| c.to_ascii_uppercase());
    let num: Result<u32> = chars
        .as_str()
        .parse()
        .map_err(|_| crate::Error::Invalid(format!("unrecognised poset spec {s:?}")));
    match kind {
        Some('C') => Poset::chain(num? as usize),
        Some('A') => Poset::antichain(num? as usize),
        Some('B') => Poset::boolean(num?),
        _ => invalid(format!("unrecognised poset spec {s:?}")),
    }
}

impl FromStr for Poset {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec(s)
    }
}

impl Serialize for Poset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label)
    }
}

impl<'de> Deserialize<'de> for Poset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Spec(String),
            Explicit(ExplicitPoset),
        }
        match Wire::deserialize(deserializer)? {
            Wire::Spec(s) => parse_spec(&s).map_err(serde::de::Error::custom),
            Wire::Explicit(e) => {
                Poset::from_relations(e.size, &e.relations).map_err(serde::de::Error::custom)
            }
        }
    }
}
