//! Boolean lattice primitives.
//!
//! Every listing produced here uses the graded-colex order: ascending
//! cardinality, ties broken by ascending integer value of the mask.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{domain, Result};

/// Largest supported ground set. `2^20` subsets.
pub const MAX_GROUND: u32 = 20;

/// A subset of `[n]`, element `i` stored in bit `i - 1`.
///
/// The ground-set size is carried by the surrounding context (a lattice, a
/// coloring, a family) rather than by every mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// `[n] = {1, ..., n}`.
    pub fn full(n: u32) -> Subset {
        debug_assert!(n <= 32);
        if n == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    /// `[k]` as used by the principal-chain constructions; `[0] = ∅`.
    pub fn prefix(k: u32) -> Subset {
        Subset::full(k)
    }

    /// Builds a subset from 1-based elements, all of which must lie in `[n]`.
    pub fn from_elements(n: u32, elems: &[u32]) -> Result<Subset> {
        let mut bits = 0u32;
        for &e in elems {
            if e == 0 || e > n {
                return domain(format!("element {e} outside [{n}]"));
            }
            bits |= 1 << (e - 1);
        }
        Ok(Subset(bits))
    }

    pub fn singleton(elem: u32) -> Subset {
        debug_assert!(elem >= 1);
        Subset(1 << (elem - 1))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, elem: u32) -> bool {
        (1..=32).contains(&elem) && self.0 & (1 << (elem - 1)) != 0
    }

    /// `self ⊆ other`.
    #[inline]
    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// `self ⊊ other`.
    #[inline]
    pub fn is_proper_subset(self, other: Subset) -> bool {
        self.0 != other.0 && self.is_subset(other)
    }

    #[inline]
    pub fn comparable(self, other: Subset) -> bool {
        self.is_subset(other) || other.is_subset(self)
    }

    #[inline]
    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Complement inside `[n]`.
    #[inline]
    pub fn complement(self, n: u32) -> Subset {
        Subset(Subset::full(n).0 & !self.0)
    }

    pub fn with(self, elem: u32) -> Subset {
        Subset(self.0 | (1 << (elem - 1)))
    }

    pub fn without(self, elem: u32) -> Subset {
        Subset(self.0 & !(1 << (elem - 1)))
    }

    /// Smallest element (1-based), if any.
    pub fn min_element(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    /// 1-based elements in ascending order.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros();
                bits &= bits - 1;
                Some(e + 1)
            }
        })
    }

    /// Whether every set bit lies in `[n]`.
    pub fn fits(self, n: u32) -> bool {
        n >= 32 || self.0 >> n == 0
    }

    /// Graded-colex comparison key.
    #[inline]
    pub fn colex_key(self) -> (u32, u32) {
        (self.len(), self.0)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

pub(crate) fn check_ground(n: u32) -> Result<()> {
    if n > MAX_GROUND {
        return domain(format!("ground set size {n} exceeds the cap of {MAX_GROUND}"));
    }
    Ok(())
}

/// Sorts a family into graded-colex order.
pub fn sort_graded_colex(family: &mut [Subset]) {
    family.sort_unstable_by_key(|s| s.colex_key());
}

/// All subsets of `[n]` with a bidirectional index into graded-colex positions.
#[derive(Clone, Debug)]
pub struct Lattice {
    n: u32,
    order: Vec<Subset>,
    position: Vec<u32>,
}

impl Lattice {
    pub fn new(n: u32) -> Result<Lattice> {
        check_ground(n)?;
        let size = 1usize << n;
        let mut order: Vec<Subset> = (0..size as u32).map(Subset).collect();
        sort_graded_colex(&mut order);
        let mut position = vec![0u32; size];
        for (i, s) in order.iter().enumerate() {
            position[s.0 as usize] = i as u32;
        }
        Ok(Lattice { n, order, position })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Subsets in graded-colex order.
    pub fn subsets(&self) -> &[Subset] {
        &self.order
    }

    #[inline]
    pub fn at(&self, pos: usize) -> Subset {
        self.order[pos]
    }

    #[inline]
    pub fn position(&self, s: Subset) -> usize {
        self.position[s.0 as usize] as usize
    }
}

fn binomial_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C(n, k)` for `n ≤ 60`.
pub fn binomial(n: u32, k: u32) -> u64 {
    binomial_u64(n as u64, k as u64)
}

/// The `k`-th level: all `k`-subsets of `[n]` in colex order.
pub fn level(n: u32, k: u32) -> Result<Vec<Subset>> {
    check_ground(n)?;
    if k > n {
        return domain(format!("level {k} out of range for n = {n}"));
    }
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    if k == 0 {
        out.push(Subset::EMPTY);
        return Ok(out);
    }
    // Gosper's hack enumerates k-bit words in increasing order.
    let limit = 1u64 << n;
    let mut v: u64 = (1u64 << k) - 1;
    while v < limit {
        out.push(Subset(v as u32));
        let t = v | (v - 1);
        let w = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
        v = w;
    }
    Ok(out)
}

/// `[X, Y] = {Z : X ⊆ Z ⊆ Y}` in graded-colex order.
pub fn interval(lower: Subset, upper: Subset) -> Result<Vec<Subset>> {
    if !lower.is_subset(upper) {
        return domain(format!("{lower} is not a subset of {upper}"));
    }
    let free = upper.difference(lower).0;
    let mut out = Vec::with_capacity(1 << free.count_ones());
    let mut sub = free;
    loop {
        out.push(Subset(lower.0 | sub));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    sort_graded_colex(&mut out);
    Ok(out)
}

fn check_pair(n: u32, i: u32, j: u32) -> Result<()> {
    check_ground(n)?;
    if i == j {
        return domain(format!("elements must differ, got i = j = {i}"));
    }
    if i == 0 || j == 0 || i > n || j > n {
        return domain(format!("elements {i}, {j} must lie in [{n}]"));
    }
    Ok(())
}

/// `B_{i,j} = {X ⊆ [n] : i ∈ X, j ∉ X}`, isomorphic to `B_{n-2}`.
pub fn sub_ij(n: u32, i: u32, j: u32) -> Result<Vec<Subset>> {
    check_pair(n, i, j)?;
    let base = Subset::singleton(i);
    let top = Subset::full(n).without(j);
    interval(base, top)
}

/// `{X : {i} ⊊ X ⊊ [n]∖{j}} ∪ {∅, [n]}`, also isomorphic to `B_{n-2}`.
pub fn sub_updown(n: u32, i: u32, j: u32) -> Result<Vec<Subset>> {
    check_pair(n, i, j)?;
    if n < 4 {
        return domain(format!("sub_updown needs n ≥ 4, got {n}"));
    }
    let base = Subset::singleton(i);
    let top = Subset::full(n).without(j);
    let mut out: Vec<Subset> = interval(base, top)?
        .into_iter()
        .filter(|&x| x != base && x != top)
        .collect();
    out.push(Subset::EMPTY);
    out.push(Subset::full(n));
    sort_graded_colex(&mut out);
    Ok(out)
}

/// Result of complementing a family inside `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complemented {
    pub sets: Vec<Subset>,
    /// Set when the input has a comparable pair, whose inclusion the output reverses.
    pub reverses_order: bool,
}

/// Replaces every set by its complement in `[n]`, keeping positions.
pub fn complement_family(n: u32, family: &[Subset]) -> Result<Complemented> {
    check_ground(n)?;
    if let Some(bad) = family.iter().find(|s| !s.fits(n)) {
        return domain(format!("{bad} does not fit in [{n}]"));
    }
    let sets = family.iter().map(|s| s.complement(n)).collect();
    let reverses_order = family
        .iter()
        .enumerate()
        .any(|(a, x)| family[a + 1..].iter().any(|y| x.is_proper_subset(*y) || y.is_proper_subset(*x)));
    Ok(Complemented { sets, reverses_order })
}

/// A list of chains in `B_n`, each listed bottom-up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFamily {
    pub n: u32,
    pub chains: Vec<Vec<Subset>>,
}

impl ChainFamily {
    pub fn chain_lengths(&self) -> Vec<usize> {
        self.chains.iter().map(Vec::len).collect()
    }

    /// Consecutive members of every chain are strictly nested.
    pub fn chains_are_strict(&self) -> bool {
        self.chains
            .iter()
            .all(|c| c.windows(2).all(|w| w[0].is_proper_subset(w[1])))
    }

    /// Every set of `B_n` appears in exactly one chain.
    pub fn is_partition(&self) -> bool {
        let mut seen = vec![false; 1usize << self.n];
        let mut count = 0usize;
        for s in self.chains.iter().flatten() {
            if !s.fits(self.n) || std::mem::replace(&mut seen[s.0 as usize], true) {
                return false;
            }
            count += 1;
        }
        count == seen.len()
    }

    /// Sets drawn from two different chains are never comparable.
    pub fn is_incomparable(&self) -> bool {
        for (a, ca) in self.chains.iter().enumerate() {
            for cb in &self.chains[a + 1..] {
                for x in ca {
                    if cb.iter().any(|y| x.comparable(*y)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Each chain is saturated and symmetric about the middle level.
    pub fn is_symmetric(&self) -> bool {
        self.chains.iter().all(|c| {
            let (Some(first), Some(last)) = (c.first(), c.last()) else {
                return false;
            };
            first.len() + last.len() == self.n
                && c.windows(2).all(|w| w[0].is_proper_subset(w[1]) && w[1].len() == w[0].len() + 1)
        })
    }
}

/// Symmetric chain decomposition of `B_n` by the bracketing construction.
///
/// A subset is read as a word over positions `1..=n`, with members as `)`
/// and non-members as `(`. Matched brackets are frozen; the unmatched
/// positions always read `)…)(…(` and sweeping the boundary left to right
/// generates the chain. Chains are emitted in graded-colex order of their
/// bottom sets.
pub fn symmetric_chain_decomposition(n: u32) -> Result<ChainFamily> {
    check_ground(n)?;
    let lattice = Lattice::new(n)?;
    let mut chains = Vec::with_capacity(binomial(n, n / 2) as usize);
    for &s in lattice.subsets() {
        let unmatched = unmatched_positions(n, s);
        // Bottom of its chain iff no unmatched position is a member.
        if unmatched.iter().any(|&p| s.contains(p)) {
            continue;
        }
        let mut chain = Vec::with_capacity(unmatched.len() + 1);
        let mut cur = s;
        chain.push(cur);
        for &p in &unmatched {
            cur = cur.with(p);
            chain.push(cur);
        }
        chains.push(chain);
    }
    Ok(ChainFamily { n, chains })
}

fn unmatched_positions(n: u32, s: Subset) -> Vec<u32> {
    let mut open: Vec<u32> = Vec::new();
    let mut unmatched_close: Vec<u32> = Vec::new();
    for p in 1..=n {
        if s.contains(p) {
            if open.pop().is_none() {
                unmatched_close.push(p);
            }
        } else {
            open.push(p);
        }
    }
    unmatched_close.extend(open);
    unmatched_close.sort_unstable();
    unmatched_close
}
