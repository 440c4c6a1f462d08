//! Constructive proofs run as algorithms.
//!
//! Each extractor takes a coloring and returns either the rainbow structure
//! it promises or a monochromatic certificate found on the way. Every
//! witness is re-verified against the coloring before it is returned.

use serde::{Deserialize, Serialize};

use crate::colorings::{self, ChainCase, Coloring};
use crate::embedding::{self, Embedding};
use crate::lattice::{Lattice, Subset};
use crate::posets::{Poset, MAX_BOOLEAN_PATTERN};
use crate::{domain, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtractionOutcome {
    Rainbow {
        witness: Embedding,
        /// Chain length reached by the peeling extractor.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        achieved_length: Option<usize>,
    },
    Monochromatic {
        witness: Embedding,
    },
    PreconditionUnmet {
        description: String,
    },
}

impl ExtractionOutcome {
    pub fn witness(&self) -> Option<&Embedding> {
        match self {
            ExtractionOutcome::Rainbow { witness, .. } | ExtractionOutcome::Monochromatic { witness } => {
                Some(witness)
            }
            ExtractionOutcome::PreconditionUnmet { .. } => None,
        }
    }

    pub fn is_rainbow(&self) -> bool {
        matches!(self, ExtractionOutcome::Rainbow { .. })
    }

    pub fn is_monochromatic(&self) -> bool {
        matches!(self, ExtractionOutcome::Monochromatic { .. })
    }

    /// Re-checks the witness against `c`.
    pub fn verify(&self, c: &Coloring) -> Result<()> {
        let checked = match self {
            ExtractionOutcome::Rainbow { witness, .. } => witness.check_rainbow(),
            ExtractionOutcome::Monochromatic { witness } => witness.check_monochromatic(),
            ExtractionOutcome::PreconditionUnmet { .. } => return Ok(()),
        };
        let witness = self.witness().expect("witness present");
        checked
            .and_then(|_| witness.check_colors_against(c))
            .map_err(|e| Error::Verification(format!("extractor produced a bad witness: {e}")))
    }
}

fn unmet(description: impl Into<String>) -> Result<ExtractionOutcome> {
    Ok(ExtractionOutcome::PreconditionUnmet { description: description.into() })
}

fn rainbow(c: &Coloring, pattern: Poset, images: Vec<Subset>) -> Result<ExtractionOutcome> {
    let witness = Embedding { pattern, images, colors: None }.annotate(c);
    checked(c, ExtractionOutcome::Rainbow { witness, achieved_length: None })
}

fn mono(c: &Coloring, pattern: Poset, images: Vec<Subset>) -> Result<ExtractionOutcome> {
    let witness = Embedding { pattern, images, colors: None }.annotate(c);
    checked(c, ExtractionOutcome::Monochromatic { witness })
}

fn checked(c: &Coloring, outcome: ExtractionOutcome) -> Result<ExtractionOutcome> {
    outcome.verify(c)?;
    Ok(outcome)
}

/// The first `m` sets of `chain` sharing a color, if any color repeats `m` times.
fn repeated_color(c: &Coloring, chain: &[Subset], m: usize) -> Option<Vec<Subset>> {
    let mut count = vec![0usize; c.palette() as usize];
    let hit = chain.iter().find_map(|&s| {
        let col = c.color(s);
        count[col as usize] += 1;
        (count[col as usize] == m).then_some(col)
    })?;
    Some(chain.iter().copied().filter(|&s| c.color(s) == hit).take(m).collect())
}

fn chain_pattern(k: usize) -> Result<Poset> {
    Poset::chain(k)
}

/// Rainbow `B_n` from a coloring of `B_N` with no monochromatic `C_m`, via
/// principal chains, for `N ≥ (m - 1)(2^n - 1)`.
///
/// The top `n` elements of `[N]` play `x_1..x_n`; each `X` is lifted to
/// `X ∪ [s]` with the least shift `s` that is at least every parent's shift
/// and gives a color not used so far.
pub fn rainbow_boolean(c: &Coloring, n: u32, m: u32) -> Result<ExtractionOutcome> {
    if m < 2 {
        return domain(format!("m must be at least 2, got {m}"));
    }
    if n > MAX_BOOLEAN_PATTERN {
        return domain(format!("B{n} exceeds the pattern cap B{MAX_BOOLEAN_PATTERN}"));
    }
    let big_n = c.n();
    let need = (m as u64 - 1) * ((1u64 << n) - 1);
    if (big_n as u64) < need || big_n < n {
        return unmet(format!("N = {big_n} is below (m - 1)(2^n - 1) = {need}"));
    }
    let room = big_n - n;
    let lift = |x: u32| Subset(x << room);
    let order = Lattice::new(n)?;
    let size = 1usize << n;
    let mut shift = vec![0u32; size];
    let mut chains: Vec<Vec<Subset>> = vec![Vec::new(); size];
    let mut used = vec![false; c.palette() as usize];
    used[c.color(Subset::EMPTY) as usize] = true;
    chains[0] = vec![Subset::EMPTY];
    for &x in &order.subsets()[1..] {
        let parent = x
            .elements()
            .map(|e| x.without(e).0 as usize)
            .max_by_key(|&p| (shift[p], std::cmp::Reverse(p)))
            .expect("nonempty");
        let base = shift[parent];
        let top = lift(x.0);
        let fresh = (base..=room).find(|&i| !used[c.color(top.union(Subset::prefix(i))) as usize]);
        let end = fresh.unwrap_or(room);
        let mut chain = chains[parent].clone();
        chain.extend((base..=end).map(|i| top.union(Subset::prefix(i))));
        match fresh {
            Some(i) => {
                used[c.color(top.union(Subset::prefix(i))) as usize] = true;
                shift[x.0 as usize] = i;
                chains[x.0 as usize] = chain;
            }
            None => {
                let Some(images) = repeated_color(c, &chain, m as usize) else {
                    return Err(Error::Verification(format!(
                        "principal chain through {x} has no color repeated {m} times"
                    )));
                };
                return mono(c, chain_pattern(m as usize)?, images);
            }
        }
    }
    let images = (0..size as u32)
        .map(|x| lift(x).union(Subset::prefix(shift[x as usize])))
        .collect();
    rainbow(c, Poset::boolean(n)?, images)
}

/// Rainbow `C_n` on `B_n` when no color class contains two incomparable sets.
pub fn rainbow_chain_a2(c: &Coloring) -> Result<ExtractionOutcome> {
    let a2 = Poset::antichain(2)?;
    if let Some(e) = embedding::find_monochromatic(c, &a2) {
        return checked(c, ExtractionOutcome::Monochromatic { witness: e });
    }
    let n = c.n();
    let chain = a2_chain(c, Subset::full(n), c.color(Subset::EMPTY));
    debug_assert_eq!(chain.len(), n as usize);
    rainbow(c, chain_pattern(chain.len())?, chain)
}

/// A chain of `|g|` subsets of `g`, rainbow when `∅` is recolored `empty`.
fn a2_chain(c: &Coloring, g: Subset, empty: u32) -> Vec<Subset> {
    if g.len() <= 1 {
        return if g.is_empty() { vec![] } else { vec![Subset::EMPTY] };
    }
    let color_of = |s: Subset| if s.is_empty() { empty } else { c.color(s) };
    let top = c.color(g);
    let lowest = |g: Subset| {
        let mut members: Vec<Subset> = sub_iter(g).filter(|&s| !s.is_empty() && c.color(s) == top).collect();
        members.sort_by_key(|s| s.colex_key());
        members[0].min_element().expect("nonempty")
    };
    if color_of(Subset::EMPTY) != top {
        let pivot = lowest(g);
        let mut chain = a2_chain(c, g.without(pivot), empty);
        chain.push(g);
        chain
    } else {
        let pivot = lowest(g);
        let rest = g.without(pivot);
        let mut chain = a2_chain(c, rest, c.color(rest));
        if chain.first() == Some(&Subset::EMPTY) {
            chain.remove(0);
            chain.push(rest);
        }
        chain.insert(0, Subset::EMPTY);
        chain
    }
}

fn sub_iter(g: Subset) -> impl Iterator<Item = Subset> {
    let g = g.0;
    let mut s = Some(0u32);
    std::iter::from_fn(move || {
        let cur = s?;
        s = (cur != g).then(|| (cur.wrapping_sub(g)) & g);
        Some(Subset(cur))
    })
}

/// Rainbow chain by peeling the top color class, when no color class
/// contains `m` pairwise incomparable sets. `m = 2` runs [`rainbow_chain_a2`].
pub fn rainbow_chain_am(c: &Coloring, m: u32) -> Result<ExtractionOutcome> {
    if m < 2 {
        return domain(format!("m must be at least 2, got {m}"));
    }
    if m == 2 {
        return rainbow_chain_a2(c).map(|o| match o {
            ExtractionOutcome::Rainbow { witness, .. } => {
                let len = witness.images.len();
                ExtractionOutcome::Rainbow { witness, achieved_length: Some(len) }
            }
            other => other,
        });
    }
    let am = Poset::antichain(m as usize)?;
    if let Some(e) = embedding::find_monochromatic(c, &am) {
        return checked(c, ExtractionOutcome::Monochromatic { witness: e });
    }
    let chain = am_chain(c, Subset::full(c.n()), c.color(Subset::EMPTY));
    let len = chain.len();
    let witness = Embedding { pattern: chain_pattern(len)?, images: chain, colors: None }.annotate(c);
    checked(c, ExtractionOutcome::Rainbow { witness, achieved_length: Some(len) })
}

fn am_chain(c: &Coloring, g: Subset, empty: u32) -> Vec<Subset> {
    if g.is_empty() {
        return vec![Subset::EMPTY];
    }
    let top = c.color(g);
    let mut class: Vec<Subset> = sub_iter(g).filter(|&s| !s.is_empty() && c.color(s) == top).collect();
    class.sort_by_key(|s| s.colex_key());
    let mut s = g;
    for chain in embedding::chain_partition(&class) {
        s = s.without(chain[0].min_element().expect("nonempty"));
    }
    if s.is_empty() {
        return if empty != top { vec![Subset::EMPTY, g] } else { vec![g] };
    }
    let mut chain = am_chain(c, s, c.color(s));
    if chain.first() == Some(&Subset::EMPTY) {
        chain.remove(0);
        chain.push(s);
    }
    chain.push(g);
    chain
}

/// Rainbow `A_n` from the incomparable chains of `B_N`, when no chain has
/// `m` sets of one color.
pub fn rainbow_antichain(c: &Coloring, m: u32, n: u32) -> Result<ExtractionOutcome> {
    if m < 2 || n < 2 {
        return domain(format!("rainbow_antichain needs m, n ≥ 2, got m = {m}, n = {n}"));
    }
    let big_n = c.n();
    let case = if colorings::chain_case_ground(ChainCase::B, m, n).ok() == Some(big_n) {
        ChainCase::B
    } else if m == 2 && big_n == n + 2 {
        ChainCase::A
    } else {
        return unmet(format!("N = {big_n} matches no incomparable-chain case for m = {m}, n = {n}"));
    };
    let family = colorings::incomparable_chains_case(case, m, n)?;
    for chain in &family.chains {
        if let Some(images) = repeated_color(c, chain, m as usize) {
            return mono(c, chain_pattern(m as usize)?, images);
        }
    }
    let mut chosen: Vec<Subset> = Vec::with_capacity(n as usize);
    let mut colors: Vec<u32> = Vec::with_capacity(n as usize);
    for chain in &family.chains {
        let Some(&s) = chain.iter().find(|&&s| !colors.contains(&c.color(s))) else {
            return Err(Error::Verification("incomparable chain carries too few colors".into()));
        };
        chosen.push(s);
        colors.push(c.color(s));
    }
    rainbow(c, Poset::antichain(n as usize)?, chosen)
}

/// Default interval sizes `r_1..r_{2^n-1}` for [`rainbow_boolean_bm`].
pub fn default_r(m: u32, n: u32) -> Vec<u64> {
    let meroueh = |i: u64| {
        1000u64
            .saturating_mul((m as u64).saturating_pow(7))
            .saturating_mul(16u64.saturating_pow(m))
            .saturating_mul(i)
    };
    (1..(1u64 << n))
        .map(|i| match (m, i) {
            (_, 1) => m as u64,
            (2, 2) => 4,
            (2, 3) => 6,
            _ => meroueh(i),
        })
        .collect()
}

/// Rainbow `B_n` from disjoint intervals of sizes `r`, or a monochromatic
/// `B_m` inside an interval that carries only used colors.
///
/// The nonempty subsets `I` of `[n]` are taken in graded-colex order; `Y_I`
/// is sought in `[U, X_I ∪ U]` where `U` is the union of `Y_J` over all
/// proper subsets `J` of `I` and `X_I` is the block of size `r_I`.
pub fn rainbow_boolean_bm(c: &Coloring, m: u32, n: u32, r: Option<&[u64]>) -> Result<ExtractionOutcome> {
    if m < 1 || n > MAX_BOOLEAN_PATTERN || m > MAX_BOOLEAN_PATTERN {
        return domain(format!("rainbow_boolean_bm needs 1 ≤ m ≤ 5 and n ≤ 5, got m = {m}, n = {n}"));
    }
    let r: Vec<u64> = match r {
        Some(r) => r.to_vec(),
        None => default_r(m, n),
    };
    let parts = (1usize << n) - 1;
    if r.len() != parts {
        return domain(format!("expected {parts} interval sizes, got {}", r.len()));
    }
    let total: u64 = r.iter().fold(0u64, |a, &b| a.saturating_add(b));
    if (c.n() as u64) < total {
        return unmet(format!("N = {} is below the sum of interval sizes {total}", c.n()));
    }
    let bm = Poset::boolean(m)?;
    let order = Lattice::new(n)?;
    let mut y = vec![Subset::EMPTY; 1 << n];
    let mut used = vec![c.color(Subset::EMPTY)];
    let mut offset = 0u32;
    for (i, &idx) in order.subsets()[1..].iter().enumerate() {
        let width = r[i] as u32;
        let block = Subset::prefix(offset + width).difference(Subset::prefix(offset));
        offset += width;
        let low = sub_iter(idx)
            .filter(|&j| j != idx)
            .fold(Subset::EMPTY, |acc, j| acc.union(y[j.0 as usize]));
        let mut interval = crate::lattice::interval(low, low.union(block))?;
        crate::lattice::sort_graded_colex(&mut interval);
        if let Some(&pick) = interval.iter().find(|&&z| !used.contains(&c.color(z))) {
            y[idx.0 as usize] = pick;
            used.push(c.color(pick));
            continue;
        }
        for &col in &used {
            let class: Vec<Subset> = interval.iter().copied().filter(|&z| c.color(z) == col).collect();
            if let Some(e) = embedding::find_copy(&class, &bm)? {
                return checked(c, ExtractionOutcome::Monochromatic { witness: e.annotate(c) });
            }
        }
        return unmet(format!(
            "interval {} of size {width} uses only {} colors without a monochromatic B{m}; r_{} is too small",
            i + 1,
            used.len(),
            i + 1
        ));
    }
    rainbow(c, Poset::boolean(n)?, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{ceil_size, level_block, near_constant, rank, trace};

    #[test]
    fn boolean_examples() {
        let o = rainbow_boolean(&rank(3).unwrap(), 2, 2).unwrap();
        assert!(o.is_rainbow(), "{o:?}");
        let o = rainbow_boolean(&level_block(6, 3).unwrap(), 2, 3).unwrap();
        assert!(o.is_rainbow(), "{o:?}");
        let o = rainbow_boolean(&Coloring::constant(3).unwrap(), 2, 2).unwrap();
        assert!(o.is_monochromatic());
        let o = rainbow_boolean(&rank(2).unwrap(), 2, 2).unwrap();
        assert!(matches!(o, ExtractionOutcome::PreconditionUnmet { .. }));
    }

    #[test]
    fn chain_a2_examples() {
        let o = rainbow_chain_a2(&near_constant(3).unwrap()).unwrap();
        assert_eq!(o.witness().unwrap().images.len(), 3);
        assert!(o.is_rainbow());
        // classes {∅,{1},{1,2}} and {{2}}
        let c = Coloring::new(2, vec![0, 0, 1, 0]).unwrap();
        assert!(rainbow_chain_a2(&c).unwrap().is_rainbow());
        let c = Coloring::new(2, vec![0, 1, 1, 2]).unwrap();
        assert!(rainbow_chain_a2(&c).unwrap().is_monochromatic());
        assert!(rainbow_chain_a2(&Coloring::constant(0).unwrap()).unwrap().is_rainbow());
    }

    #[test]
    fn chain_am_examples() {
        assert!(rainbow_chain_am(&rank(4).unwrap(), 2).unwrap().is_monochromatic());
        let o = rainbow_chain_am(&trace(4, 2).unwrap(), 3).unwrap();
        assert!(o.is_rainbow());
        assert!(o.witness().unwrap().images.len() >= 2);
        let o = rainbow_chain_am(&near_constant(4).unwrap(), 3).unwrap();
        assert_eq!(o.witness().unwrap().images.len(), 4);
    }

    #[test]
    fn antichain_examples() {
        let o = rainbow_antichain(&rank(5).unwrap(), 2, 3).unwrap();
        assert!(o.is_rainbow());
        assert!(rainbow_antichain(&Coloring::constant(4).unwrap(), 2, 2).unwrap().is_monochromatic());
        assert!(rainbow_antichain(&ceil_size(4, 3).unwrap(), 3, 2).unwrap().is_rainbow());
        assert!(matches!(
            rainbow_antichain(&rank(6).unwrap(), 2, 3).unwrap(),
            ExtractionOutcome::PreconditionUnmet { .. }
        ));
    }

    #[test]
    fn bm_examples() {
        let r = [2, 4, 6];
        assert!(rainbow_boolean_bm(&rank(12).unwrap(), 2, 2, Some(&r)).unwrap().is_rainbow());
        assert!(rainbow_boolean_bm(&Coloring::constant(12).unwrap(), 2, 2, Some(&r))
            .unwrap()
            .is_monochromatic());
        assert!(matches!(
            rainbow_boolean_bm(&rank(11).unwrap(), 2, 2, Some(&r)).unwrap(),
            ExtractionOutcome::PreconditionUnmet { .. }
        ));
        assert_eq!(default_r(2, 2), vec![2, 4, 6]);
    }

    #[test]
    fn subsets_of_mask() {
        let all: Vec<u32> = sub_iter(Subset(0b101)).map(|s| s.0).collect();
        assert_eq!(all, vec![0, 1, 4, 5]);
    }
}
