//! Colorings of `B_N`, the extremal constructions and the avoidance verifier.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::embedding::{self, Embedding};
use crate::lattice::{self, ChainFamily, Lattice, Subset};
use crate::posets::Poset;
use crate::{domain, invalid, Result};

/// A total map from the subsets of `[n]` to color ids.
///
/// Colors are stored by mask. The palette is `max id + 1`; constructions
/// always produce dense palettes, while search witnesses under a fixed
/// palette may leave some ids unused (see [`Coloring::is_dense`]).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    n: u32,
    by_mask: Vec<u32>,
    palette: u32,
}

impl std::fmt::Debug for Coloring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Coloring(n={}, {:?})", self.n, self.colors())
    }
}

impl Coloring {
    /// Builds a coloring from ids listed in graded-colex order.
    pub fn new(n: u32, colors: Vec<u32>) -> Result<Coloring> {
        let lattice = Lattice::new(n)?;
        if colors.len() != lattice.len() {
            return invalid(format!(
                "a coloring of B_{n} needs {} colors, found {}",
                lattice.len(),
                colors.len()
            ));
        }
        let mut by_mask = vec![0; lattice.len()];
        for (&s, &c) in lattice.subsets().iter().zip(&colors) {
            by_mask[s.0 as usize] = c;
        }
        Ok(Coloring::from_masks(n, by_mask))
    }

    /// Colors `s` by `f(s)`, then renumbers ids densely in first-use order.
    pub fn from_fn(n: u32, f: impl Fn(Subset) -> u32) -> Result<Coloring> {
        lattice::check_ground(n)?;
        let by_mask = (0..1u32 << n).map(|m| f(Subset(m))).collect();
        Ok(Coloring::from_masks(n, by_mask).canonical())
    }

    pub(crate) fn from_masks(n: u32, by_mask: Vec<u32>) -> Coloring {
        let palette = by_mask.iter().copied().max().map_or(0, |m| m + 1);
        Coloring { n, by_mask, palette }
    }

    /// Every subset gets color 0.
    pub fn constant(n: u32) -> Result<Coloring> {
        Coloring::from_fn(n, |_| 0)
    }

    /// Renumbers ids so they first appear in increasing order along
    /// graded-colex (a restricted growth string).
    pub fn canonical(&self) -> Coloring {
        let lattice = Lattice::new(self.n).expect("validated ground size");
        let mut map = vec![u32::MAX; self.palette as usize];
        let mut next = 0;
        for &s in lattice.subsets() {
            let c = self.by_mask[s.0 as usize] as usize;
            if map[c] == u32::MAX {
                map[c] = next;
                next += 1;
            }
        }
        let by_mask = self.by_mask.iter().map(|&c| map[c as usize]).collect();
        Coloring::from_masks(self.n, by_mask)
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn color(&self, s: Subset) -> u32 {
        self.by_mask[s.0 as usize]
    }

    /// One plus the largest id.
    pub fn palette(&self) -> u32 {
        self.palette
    }

    /// Number of ids actually used.
    pub fn palette_used(&self) -> u32 {
        let mut seen = vec![false; self.palette as usize];
        for &c in &self.by_mask {
            seen[c as usize] = true;
        }
        seen.iter().filter(|&&b| b).count() as u32
    }

    /// Every id below the palette size is used.
    pub fn is_dense(&self) -> bool {
        self.palette_used() == self.palette
    }

    /// Ids in graded-colex order.
    pub fn colors(&self) -> Vec<u32> {
        let lattice = Lattice::new(self.n).expect("validated ground size");
        lattice.subsets().iter().map(|&s| self.color(s)).collect()
    }

    /// Color classes by ascending id, each in graded-colex order. Unused ids
    /// give empty classes.
    pub fn classes(&self) -> Vec<Vec<Subset>> {
        let lattice = Lattice::new(self.n).expect("validated ground size");
        let mut classes = vec![Vec::new(); self.palette as usize];
        for &s in lattice.subsets() {
            classes[self.color(s) as usize].push(s);
        }
        classes
    }

    pub fn class(&self, color: u32) -> Vec<Subset> {
        let lattice = Lattice::new(self.n).expect("validated ground size");
        lattice.subsets().iter().copied().filter(|&s| self.color(s) == color).collect()
    }

    /// A copy with the color of one set replaced.
    pub fn recolored(&self, s: Subset, color: u32) -> Coloring {
        let mut by_mask = self.by_mask.clone();
        by_mask[s.0 as usize] = color;
        Coloring::from_masks(self.n, by_mask)
    }
}

#[derive(Serialize, Deserialize)]
struct ColoringWire {
    n: u32,
    colors: Vec<u32>,
}

impl Serialize for Coloring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ColoringWire { n: self.n, colors: self.colors() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = ColoringWire::deserialize(deserializer)?;
        Coloring::new(wire.n, wire.colors).map_err(serde::de::Error::custom)
    }
}

fn check_m(m: u32) -> Result<()> {
    if m < 2 {
        return domain(format!("m must be at least 2, got {m}"));
    }
    Ok(())
}

/// `c(X) = ⌊|X| / (m - 1)⌋`.
pub fn level_block(n: u32, m: u32) -> Result<Coloring> {
    check_m(m)?;
    Coloring::from_fn(n, |s| s.len() / (m - 1))
}

/// `c(X) = |X|`.
pub fn rank(n: u32) -> Result<Coloring> {
    Coloring::from_fn(n, |s| s.len())
}

/// Chains of the symmetric chain decomposition, `m - 1` per color, in
/// construction order.
pub fn scd_block(n: u32, m: u32) -> Result<Coloring> {
    check_m(m)?;
    let scd = lattice::symmetric_chain_decomposition(n)?;
    let mut by_mask = vec![0; 1 << n];
    for (i, chain) in scd.chains.iter().enumerate() {
        for &s in chain {
            by_mask[s.0 as usize] = i as u32 / (m - 1);
        }
    }
    Ok(Coloring::from_masks(n, by_mask).canonical())
}

/// `c(X) = ⌈|X| / (m - 1)⌉`.
pub fn ceil_size(n: u32, m: u32) -> Result<Coloring> {
    check_m(m)?;
    Coloring::from_fn(n, |s| s.len().div_ceil(m - 1))
}

/// `∅` and `[n]` share a color; every other set has a color of its own.
pub fn near_constant(n: u32) -> Result<Coloring> {
    if n == 0 {
        return domain("near_constant needs n ≥ 1");
    }
    let full = Subset::full(n);
    Coloring::from_fn(n, |s| if s == full { 0 } else { s.0 })
}

/// Colors `Z` by `Z ∩ Y` where `Y` is the top `ysize` elements of `[n]`.
pub fn trace(n: u32, ysize: u32) -> Result<Coloring> {
    if ysize > n {
        return domain(format!("trace needs ysize ≤ n, got {ysize} > {n}"));
    }
    let y = Subset::full(n).difference(Subset::prefix(n - ysize));
    Coloring::from_fn(n, |s| s.intersection(y).0)
}

/// Two colors on `B_{2h-3}`, `h = h(P)`: the bottom `h - 1` levels and the
/// top `h - 1` levels.
pub fn halves(p: &Poset) -> Result<Coloring> {
    let h = p.height() as u32;
    if h < 2 {
        return domain(format!("halves needs h(P) ≥ 2, got {h}"));
    }
    Coloring::from_fn(2 * h - 3, |s| u32::from(s.len() >= h - 1))
}

/// Which incomparable-chain construction to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainCase {
    /// `N = n + 2`, chain `i` has `i` sets.
    A,
    /// `N = (m - 1)(n - 1) + 2`, chain `i` has `(m - 1)(i - 1) + 1` sets.
    B,
}

/// Ground size of a case, or an error when the parameters are outside it.
pub fn chain_case_ground(case: ChainCase, m: u32, n: u32) -> Result<u32> {
    match case {
        ChainCase::A if n >= 2 => Ok(n + 2),
        ChainCase::B if n >= 2 && ((m == 2 && n == 2) || m >= 3) => Ok((m - 1) * (n - 1) + 2),
        _ => domain(format!("no incomparable-chain construction for case {case:?}, m = {m}, n = {n}")),
    }
}

/// `n` pairwise incomparable chains in `B_N`. Case B is used whenever its
/// ground size matches, otherwise case A.
pub fn incomparable_chains(big_n: u32, m: u32, n: u32) -> Result<ChainFamily> {
    for case in [ChainCase::B, ChainCase::A] {
        if chain_case_ground(case, m, n).ok() == Some(big_n) {
            return incomparable_chains_case(case, m, n);
        }
    }
    domain(format!("N = {big_n} matches neither incomparable-chain case for m = {m}, n = {n}"))
}

pub fn incomparable_chains_case(case: ChainCase, m: u32, n: u32) -> Result<ChainFamily> {
    let big_n = chain_case_ground(case, m, n)?;
    lattice::check_ground(big_n)?;
    let (mut chains, mut ground) = match case {
        ChainCase::A => (
            vec![vec![Subset(0b11)], vec![Subset(0b1000), Subset(0b1001)]],
            4,
        ),
        ChainCase::B => (
            vec![
                vec![Subset::singleton(m)],
                (0..m).map(|j| Subset::singleton(m + 1).union(Subset::prefix(j))).collect(),
            ],
            m + 1,
        ),
    };
    for k in 2..n {
        let top = match case {
            ChainCase::A => k + 2,
            ChainCase::B => (m - 1) * k + 1,
        };
        debug_assert!(top >= ground);
        for chain in &mut chains {
            let mut c = lattice::complement_family(top, chain)?.sets;
            c.reverse();
            *chain = c;
        }
        let fresh = Subset::singleton(top + 1);
        let len = match case {
            ChainCase::A => k + 1,
            ChainCase::B => (m - 1) * k + 1,
        };
        chains.push((0..len).map(|j| fresh.union(Subset::prefix(j))).collect());
        ground = top + 1;
    }
    debug_assert!(ground <= big_n);
    Ok(ChainFamily { n: big_n, chains })
}

/// Result of checking a coloring against monochromatic and rainbow targets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceReport {
    pub mono_witness: Option<(usize, Embedding)>,
    pub rainbow_witness: Option<(usize, Embedding)>,
    pub avoided: bool,
}

impl AvoidanceReport {
    fn new(mono: Option<(usize, Embedding)>, rainbow: Option<(usize, Embedding)>) -> Self {
        let avoided = mono.is_none() && rainbow.is_none();
        AvoidanceReport { mono_witness: mono, rainbow_witness: rainbow, avoided }
    }
}

/// Looks for a monochromatic `P ∈ ps` (any color) and a rainbow `Q ∈ qs`.
pub fn verify(c: &Coloring, ps: &[Poset], qs: &[Poset]) -> AvoidanceReport {
    let mono = ps
        .iter()
        .enumerate()
        .find_map(|(i, p)| embedding::find_monochromatic(c, p).map(|e| (i, e)));
    let rainbow = qs
        .iter()
        .enumerate()
        .find_map(|(i, q)| embedding::find_rainbow(c, q).map(|e| (i, e)));
    AvoidanceReport::new(mono, rainbow)
}

/// Fixed-palette check: a copy of `ps[i]` in color `i`.
pub fn verify_palette(c: &Coloring, ps: &[Poset]) -> Result<AvoidanceReport> {
    if c.palette() as usize > ps.len() {
        return invalid(format!("coloring uses color {} but only {} patterns were given", c.palette() - 1, ps.len()));
    }
    let classes = c.classes();
    let mono = ps.iter().zip(&classes).enumerate().find_map(|(i, (p, class))| {
        embedding::find_copy(class, p)
            .expect("classes are duplicate-free")
            .map(|e| (i, e.annotate(c)))
    });
    Ok(AvoidanceReport::new(mono, None))
}
