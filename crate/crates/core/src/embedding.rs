//! Strong-subposet containment: plain, monochromatic and rainbow.
//!
//! The general engine is a backtracking matcher over pattern elements in
//! most-constrained-first order. Each candidate image is checked against
//! every placed element for the two-sided condition `x < y ⟺ φ(x) ⊊ φ(y)`.
//! Chains and antichains are answered directly (longest chain, König
//! antichain); rainbow chains over a whole lattice use a run-count bound and
//! an exact dynamic program before falling back to backtracking.

use serde::{Deserialize, Serialize};

use crate::colorings::Coloring;
use crate::lattice::{self, Subset};
use crate::posets::Poset;
use crate::{invalid, matching, Result};

/// Default node budget for embedding searches that accept one.
pub const DEFAULT_EMBED_BUDGET: u64 = 50_000_000;

const NIL: u32 = u32::MAX;

/// An embedding search ran out of nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("embedding search exceeded its budget after {nodes} nodes")]
pub struct BudgetExceeded {
    pub nodes: u64,
}

/// A witness copy of a pattern: `images[x]` is the set playing element `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub pattern: Poset,
    pub images: Vec<Subset>,
    pub colors: Option<Vec<u32>>,
}

/// Why an embedding fails its invariants.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingDefect {
    #[error("expected {expected} images, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("images of elements {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("order mismatch between elements {0} and {1}")]
    Order(usize, usize),
    #[error("color annotation has wrong length")]
    ColorArity,
    #[error("images of elements {0} and {1} share a color")]
    NotRainbow(usize, usize),
    #[error("images of elements {0} and {1} have different colors")]
    NotMonochromatic(usize, usize),
    #[error("annotated color of element {0} disagrees with the coloring")]
    ColorMismatch(usize),
}

impl Embedding {
    /// Checks distinct images and the two-sided order condition.
    pub fn check_strong(&self) -> Result<(), EmbeddingDefect> {
        let p = &self.pattern;
        if self.images.len() != p.size() {
            return Err(EmbeddingDefect::Arity { expected: p.size(), found: self.images.len() });
        }
        for x in 0..p.size() {
            for y in 0..p.size() {
                if x == y {
                    continue;
                }
                if x < y && self.images[x] == self.images[y] {
                    return Err(EmbeddingDefect::Duplicate(x, y));
                }
                if p.less(x, y) != self.images[x].is_proper_subset(self.images[y]) {
                    return Err(EmbeddingDefect::Order(x, y));
                }
            }
        }
        Ok(())
    }

    fn annotated(&self) -> Result<&[u32], EmbeddingDefect> {
        match &self.colors {
            Some(c) if c.len() == self.images.len() => Ok(c),
            _ => Err(EmbeddingDefect::ColorArity),
        }
    }

    /// Strong copy whose annotated colors are pairwise distinct.
    pub fn check_rainbow(&self) -> Result<(), EmbeddingDefect> {
        self.check_strong()?;
        let c = self.annotated()?;
        for x in 0..c.len() {
            for y in x + 1..c.len() {
                if c[x] == c[y] {
                    return Err(EmbeddingDefect::NotRainbow(x, y));
                }
            }
        }
        Ok(())
    }

    /// Strong copy whose annotated colors all agree.
    pub fn check_monochromatic(&self) -> Result<(), EmbeddingDefect> {
        self.check_strong()?;
        let c = self.annotated()?;
        if let Some(y) = (1..c.len()).find(|&y| c[y] != c[0]) {
            return Err(EmbeddingDefect::NotMonochromatic(0, y));
        }
        Ok(())
    }

    /// Annotated colors agree with `coloring`.
    pub fn check_colors_against(&self, coloring: &Coloring) -> Result<(), EmbeddingDefect> {
        let c = self.annotated()?;
        for (x, (&s, &col)) in self.images.iter().zip(c).enumerate() {
            if !s.fits(coloring.n()) || coloring.color(s) != col {
                return Err(EmbeddingDefect::ColorMismatch(x));
            }
        }
        Ok(())
    }

    pub(crate) fn annotate(mut self, coloring: &Coloring) -> Embedding {
        self.colors = Some(self.images.iter().map(|&s| coloring.color(s)).collect());
        self
    }
}

/// Rejects families with repeated sets.
pub fn check_family(family: &[Subset]) -> Result<()> {
    let mut sorted = family.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return invalid(format!("family contains {} more than once", w[0]));
    }
    Ok(())
}

/// Finds a strong copy of `p` inside `family`.
pub fn find_copy(family: &[Subset], p: &Poset) -> Result<Option<Embedding>> {
    check_family(family)?;
    Ok(find_in_family(family, p, u64::MAX).expect("unbounded search"))
}

/// As [`find_copy`] with a node budget; the family is assumed duplicate-free.
pub fn find_copy_budgeted(
    family: &[Subset],
    p: &Poset,
    budget: u64,
) -> Result<Option<Embedding>, BudgetExceeded> {
    find_in_family(family, p, budget)
}

fn embedding_of(p: &Poset, family: &[Subset], assign: &[u32]) -> Embedding {
    Embedding {
        pattern: p.clone(),
        images: assign.iter().map(|&f| family[f as usize]).collect(),
        colors: None,
    }
}

fn find_in_family(family: &[Subset], p: &Poset, budget: u64) -> Result<Option<Embedding>, BudgetExceeded> {
    if p.size() == 0 {
        return Ok(Some(Embedding { pattern: p.clone(), images: vec![], colors: None }));
    }
    if family.len() < p.size() {
        return Ok(None);
    }
    if let Some(k) = p.as_chain() {
        let chain = longest_chain(family);
        return Ok((chain.len() >= k).then(|| Embedding {
            pattern: p.clone(),
            images: chain[..k].to_vec(),
            colors: None,
        }));
    }
    if let Some(k) = p.as_antichain() {
        let anti = max_antichain(family);
        return Ok((anti.len() >= k).then(|| Embedding {
            pattern: p.clone(),
            images: anti[..k].to_vec(),
            colors: None,
        }));
    }
    if longest_chain(family).len() < p.height() || max_antichain(family).len() < p.width() {
        return Ok(None);
    }
    let mut found = None;
    let mut engine = Engine::new(p, family, None, false, None, budget);
    engine.run(&mut |assign| {
        found = Some(embedding_of(p, family, assign));
        false
    })?;
    Ok(found)
}

/// Every distinct subfamily of `family` forming a strong copy of `p`, each
/// as a graded-colex sorted list. Fails once more than `cap` copies exist.
pub fn all_copies(family: &[Subset], p: &Poset, cap: usize) -> Result<Vec<Vec<Subset>>> {
    check_family(family)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut overflow = false;
    let mut engine = Engine::new(p, family, None, false, None, u64::MAX);
    engine
        .run(&mut |assign| {
            let mut set: Vec<Subset> = assign.iter().map(|&f| family[f as usize]).collect();
            lattice::sort_graded_colex(&mut set);
            if seen.insert(set.clone()) {
                out.push(set);
                if out.len() > cap {
                    overflow = true;
                    return false;
                }
            }
            true
        })
        .expect("unbounded search");
    if overflow {
        return Err(crate::Error::Limit(format!("more than {cap} copies of {p}")));
    }
    Ok(out)
}

/// A monochromatic copy of `p`, scanning color classes in ascending id.
pub fn find_monochromatic(c: &Coloring, p: &Poset) -> Option<Embedding> {
    for class in c.classes() {
        if let Some(e) = find_in_family(&class, p, u64::MAX).expect("unbounded search") {
            return Some(e.annotate(c));
        }
    }
    None
}

/// A rainbow copy of `q` anywhere in the lattice.
pub fn find_rainbow(c: &Coloring, q: &Poset) -> Option<Embedding> {
    if q.size() == 0 {
        return Some(Embedding { pattern: q.clone(), images: vec![], colors: Some(vec![]) });
    }
    if (c.palette_used() as usize) < q.size() {
        return None;
    }
    let lattice = lattice::Lattice::new(c.n()).expect("coloring ground size is capped");
    let family = lattice.subsets();
    let colors: Vec<u32> = family.iter().map(|&s| c.color(s)).collect();
    if let Some(k) = q.as_antichain() {
        return rainbow_antichain(family, &colors, k).map(|images| {
            Embedding { pattern: q.clone(), images, colors: None }.annotate(c)
        });
    }
    if let Some(k) = q.as_chain() {
        match rainbow_chain_full(c, k) {
            ChainAnswer::Found(images) => {
                return Some(Embedding { pattern: q.clone(), images, colors: None }.annotate(c))
            }
            ChainAnswer::Absent => return None,
            ChainAnswer::Unknown => {}
        }
    }
    let mut found = None;
    let mut engine = Engine::new(q, family, Some(&colors), true, None, u64::MAX);
    engine
        .run(&mut |assign| {
            found = Some(embedding_of(q, family, assign));
            false
        })
        .expect("unbounded search");
    found.map(|e| e.annotate(c))
}

/// Outcome of an incremental check at the newest assigned set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendReport {
    /// `(index into P-list, witness)` for a monochromatic copy through `newest`.
    pub mono: Option<(usize, Embedding)>,
    /// `(index into Q-list, witness)` for a rainbow copy through `newest`.
    pub rainbow: Option<(usize, Embedding)>,
}

impl ExtendReport {
    pub fn violated(&self) -> bool {
        self.mono.is_some() || self.rainbow.is_some()
    }
}

/// Checks only the copies that use `newest`, the last set of a graded-colex
/// prefix of `B_n` colored by `prefix`.
pub fn extend_check(
    n: u32,
    prefix: &[u32],
    newest: Subset,
    ps: &[Poset],
    qs: &[Poset],
) -> Result<ExtendReport> {
    let lattice = lattice::Lattice::new(n)?;
    if prefix.is_empty() || prefix.len() > lattice.len() {
        return invalid(format!("prefix length {} out of range for n = {n}", prefix.len()));
    }
    let last = prefix.len() - 1;
    if lattice.at(last) != newest {
        return invalid(format!(
            "newest set {newest} is not the last set {} of the prefix",
            lattice.at(last)
        ));
    }
    let family = &lattice.subsets()[..prefix.len()];
    let annotate = |mut e: Embedding| {
        e.colors = Some(e.images.iter().map(|&s| prefix[lattice.position(s)]).collect());
        e
    };
    let mut report = ExtendReport { mono: None, rainbow: None };
    let newest_color = prefix[last];
    let class: Vec<Subset> = family
        .iter()
        .zip(prefix)
        .filter(|(_, &c)| c == newest_color)
        .map(|(&s, _)| s)
        .collect();
    let pinned_idx = (class.len() - 1) as u32;
    for (i, p) in ps.iter().enumerate() {
        if let Some(e) = find_through(p, &class, None, false, pinned_idx) {
            report.mono = Some((i, annotate(e)));
            break;
        }
    }
    for (i, q) in qs.iter().enumerate() {
        if let Some(e) = find_through(q, family, Some(prefix), true, last as u32) {
            report.rainbow = Some((i, annotate(e)));
            break;
        }
    }
    Ok(report)
}

/// A copy of `p` in `family` using `family[pinned]` as one of its images.
pub(crate) fn find_through(
    p: &Poset,
    family: &[Subset],
    colors: Option<&[u32]>,
    rainbow: bool,
    pinned: u32,
) -> Option<Embedding> {
    if p.size() == 0 || family.len() < p.size() {
        return None;
    }
    let at = family[pinned as usize];
    let on_top = !family.iter().any(|&s| at.is_proper_subset(s));
    for x in 0..p.size() {
        if on_top && !p.is_maximal(x) {
            continue;
        }
        let mut found = None;
        let mut engine = Engine::new(p, family, colors, rainbow, Some((x, pinned)), u64::MAX);
        engine
            .run(&mut |assign| {
                found = Some(embedding_of(p, family, assign));
                false
            })
            .expect("unbounded search");
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Longest chain in a family, bottom-up.
pub fn longest_chain(family: &[Subset]) -> Vec<Subset> {
    if family.is_empty() {
        return vec![];
    }
    let mut idx: Vec<usize> = (0..family.len()).collect();
    idx.sort_by_key(|&i| family[i].colex_key());
    let mut best = vec![1u32; idx.len()];
    let mut prev = vec![NIL; idx.len()];
    for a in 0..idx.len() {
        let x = family[idx[a]];
        for b in 0..a {
            if family[idx[b]].is_proper_subset(x) && best[b] + 1 > best[a] {
                best[a] = best[b] + 1;
                prev[a] = b as u32;
            }
        }
    }
    let mut top = (0..idx.len()).max_by_key(|&a| (best[a], std::cmp::Reverse(a))).unwrap();
    let mut chain = vec![family[idx[top]]];
    while prev[top] != NIL {
        top = prev[top] as usize;
        chain.push(family[idx[top]]);
    }
    chain.reverse();
    chain
}

fn family_succ(family: &[Subset]) -> Vec<Vec<u32>> {
    family
        .iter()
        .map(|&x| {
            family
                .iter()
                .enumerate()
                .filter(|(_, &y)| x.is_proper_subset(y))
                .map(|(j, _)| j as u32)
                .collect()
        })
        .collect()
}

/// A maximum antichain of a family, in family order.
pub fn max_antichain(family: &[Subset]) -> Vec<Subset> {
    matching::max_antichain(&family_succ(family))
        .into_iter()
        .map(|i| family[i as usize])
        .collect()
}

/// Minimum chain partition of a family (Dilworth), each chain bottom-up.
pub fn chain_partition(family: &[Subset]) -> Vec<Vec<Subset>> {
    matching::min_chain_partition(&family_succ(family))
        .into_iter()
        .map(|c| c.into_iter().map(|i| family[i as usize]).collect())
        .collect()
}

/// Branch and bound for an antichain of `k` sets with pairwise distinct
/// colors. Sets are chosen in family order; a branch is cut when the
/// distinct colors left among its candidates cannot complete it.
pub(crate) fn rainbow_antichain(family: &[Subset], colors: &[u32], k: usize) -> Option<Vec<Subset>> {
    if k == 0 {
        return Some(vec![]);
    }
    let palette = colors.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut stamp = vec![0u32; palette];
    let mut epoch = 0u32;
    let root: Vec<u32> = (0..family.len() as u32).collect();
    let mut chosen: Vec<u32> = Vec::with_capacity(k);
    fn distinct(cands: &[u32], colors: &[u32], stamp: &mut [u32], epoch: &mut u32) -> usize {
        *epoch += 1;
        let mut count = 0;
        for &f in cands {
            let c = colors[f as usize] as usize;
            if stamp[c] != *epoch {
                stamp[c] = *epoch;
                count += 1;
            }
        }
        count
    }
    fn go(
        family: &[Subset],
        colors: &[u32],
        k: usize,
        cands: &[u32],
        chosen: &mut Vec<u32>,
        stamp: &mut [u32],
        epoch: &mut u32,
    ) -> bool {
        if chosen.len() == k {
            return true;
        }
        if chosen.len() + distinct(cands, colors, stamp, epoch) < k {
            return false;
        }
        for (i, &f) in cands.iter().enumerate() {
            let s = family[f as usize];
            let c = colors[f as usize];
            let next: Vec<u32> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&g| colors[g as usize] != c && !s.comparable(family[g as usize]))
                .collect();
            chosen.push(f);
            if go(family, colors, k, &next, chosen, stamp, epoch) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(family, colors, k, &root, &mut chosen, &mut stamp, &mut epoch)
        .then(|| chosen.iter().map(|&f| family[f as usize]).collect())
}

enum ChainAnswer {
    Found(Vec<Subset>),
    Absent,
    Unknown,
}

/// Largest number of shared colors for which the exact chain program runs.
const MAX_TRACKED_COLORS: u32 = 8;

/// Rainbow `k`-chain over the whole lattice of `c`.
///
/// Distinct colors on a chain never exceed the number of color runs along a
/// saturated chain through it, which bounds the answer from above. When few
/// colors occur more than once, an exact program over (set, used repeated
/// colors) settles the question.
fn rainbow_chain_full(c: &Coloring, k: usize) -> ChainAnswer {
    let n = c.n();
    let size = 1usize << n;
    let full = Subset::full(n).0 as usize;
    let mut runs = vec![1u32; size];
    for z in (0..size).rev() {
        let cz = c.color(Subset(z as u32));
        let mut free = !z & full;
        while free != 0 {
            let bit = free & free.wrapping_neg();
            free &= free - 1;
            let w = z | bit;
            let r = runs[w] + u32::from(c.color(Subset(w as u32)) != cz);
            runs[z] = runs[z].max(r);
        }
    }
    if (runs[0] as usize) < k {
        return ChainAnswer::Absent;
    }
    let mut mult = vec![0u32; c.palette() as usize];
    for z in 0..size {
        mult[c.color(Subset(z as u32)) as usize] += 1;
    }
    let shared: Vec<u32> = (0..mult.len() as u32).filter(|&col| mult[col as usize] > 1).collect();
    if shared.len() as u32 > MAX_TRACKED_COLORS {
        return ChainAnswer::Unknown;
    }
    let mut shared_bit = vec![0u32; mult.len()];
    for (i, &col) in shared.iter().enumerate() {
        shared_bit[col as usize] = 1 << i;
    }
    let masks = 1usize << shared.len();
    // best[z * masks + u]: longest rainbow chain of sets ⊇ z avoiding used repeated colors u.
    let mut best = vec![0u8; size * masks];
    for z in (0..size).rev() {
        let bit = shared_bit[c.color(Subset(z as u32)) as usize];
        for u in 0..masks {
            let mut skip = 0u8;
            let mut after_take = 0u8;
            let mut free = !z & full;
            while free != 0 {
                let b = free & free.wrapping_neg();
                free &= free - 1;
                let w = z | b;
                skip = skip.max(best[w * masks + u]);
                if bit as usize & u == 0 {
                    after_take = after_take.max(best[w * masks + (u | bit as usize)]);
                }
            }
            let take = if bit as usize & u == 0 { after_take + 1 } else { 0 };
            best[z * masks + u] = skip.max(take);
        }
    }
    if (best[0] as usize) < k {
        return ChainAnswer::Absent;
    }
    // Walk the program back to recover a chain.
    let mut chain = Vec::new();
    let (mut z, mut u) = (0usize, 0usize);
    loop {
        let target = best[z * masks + u];
        if target == 0 {
            break;
        }
        let bit = shared_bit[c.color(Subset(z as u32)) as usize] as usize;
        let mut free = !z & full;
        let mut moved = false;
        if bit & u == 0 {
            let mut after = 0u8;
            let mut f = free;
            while f != 0 {
                let b = f & f.wrapping_neg();
                f &= f - 1;
                after = after.max(best[(z | b) * masks + (u | bit)]);
            }
            if after + 1 == target {
                chain.push(Subset(z as u32));
                u |= bit;
                if target == 1 {
                    break;
                }
                while free != 0 {
                    let b = free & free.wrapping_neg();
                    free &= free - 1;
                    if best[(z | b) * masks + u] == after {
                        z |= b;
                        moved = true;
                        break;
                    }
                }
                debug_assert!(moved);
                continue;
            }
        }
        while free != 0 {
            let b = free & free.wrapping_neg();
            free &= free - 1;
            if best[(z | b) * masks + u] == target {
                z |= b;
                moved = true;
                break;
            }
        }
        debug_assert!(moved);
    }
    chain.truncate(k);
    ChainAnswer::Found(chain)
}

/// Backtracking matcher state.
struct Engine<'a> {
    p: &'a Poset,
    family: &'a [Subset],
    colors: Option<&'a [u32]>,
    rainbow: bool,
    order: Vec<usize>,
    domains: Vec<Vec<u32>>,
    assign: Vec<u32>,
    used: Vec<bool>,
    used_colors: Vec<u32>,
    nodes: u64,
    budget: u64,
}

/// Families larger than this skip the up/down count filter.
const COUNT_FILTER_LIMIT: usize = 2048;

impl<'a> Engine<'a> {
    fn new(
        p: &'a Poset,
        family: &'a [Subset],
        colors: Option<&'a [u32]>,
        rainbow: bool,
        pinned: Option<(usize, u32)>,
        budget: u64,
    ) -> Engine<'a> {
        let size = p.size();
        let up_need: Vec<u32> = (0..size).map(|x| p.up_mask(x).count_ones()).collect();
        let down_need: Vec<u32> = (0..size).map(|x| p.down_mask(x).count_ones()).collect();
        let counts = (family.len() <= COUNT_FILTER_LIMIT).then(|| {
            let mut up = vec![0u32; family.len()];
            let mut down = vec![0u32; family.len()];
            for (i, &a) in family.iter().enumerate() {
                for (j, &b) in family.iter().enumerate() {
                    if a.is_proper_subset(b) {
                        up[i] += 1;
                        down[j] += 1;
                    }
                }
            }
            (up, down)
        });
        let domains: Vec<Vec<u32>> = (0..size)
            .map(|x| match pinned {
                Some((px, f)) if px == x => vec![f],
                _ => (0..family.len() as u32)
                    .filter(|&f| {
                        let f = f as usize;
                        // A strict chain of d sets below forces |image| ≥ d.
                        if family[f].len() < down_need[x].min(1) {
                            return false;
                        }
                        counts
                            .as_ref()
                            .is_none_or(|(up, down)| up[f] >= up_need[x] && down[f] >= down_need[x])
                    })
                    .collect(),
            })
            .collect();
        let order = placement_order(p, pinned.map(|(x, _)| x), &domains);
        Engine {
            p,
            family,
            colors,
            rainbow,
            order,
            domains,
            assign: vec![NIL; size],
            used: vec![false; family.len()],
            used_colors: Vec::with_capacity(size),
            nodes: 0,
            budget,
        }
    }

    /// Runs the search; `visit` receives every complete assignment (indexed
    /// by pattern element) and returns whether to keep going.
    fn run(&mut self, visit: &mut dyn FnMut(&[u32]) -> bool) -> Result<(), BudgetExceeded> {
        if self.domains.iter().any(Vec::is_empty) {
            return Ok(());
        }
        self.step(0, visit).map(|_| ())
    }

    /// Returns `Ok(false)` once the visitor asks to stop.
    fn step(&mut self, depth: usize, visit: &mut dyn FnMut(&[u32]) -> bool) -> Result<bool, BudgetExceeded> {
        if depth == self.order.len() {
            return Ok(visit(&self.assign));
        }
        let x = self.order[depth];
        for di in 0..self.domains[x].len() {
            let f = self.domains[x][di];
            if self.used[f as usize] {
                continue;
            }
            let color = self.colors.map(|c| c[f as usize]);
            if self.rainbow && self.used_colors.contains(&color.unwrap()) {
                continue;
            }
            let s = self.family[f as usize];
            let consistent = self.order[..depth].iter().all(|&y| {
                let t = self.family[self.assign[y] as usize];
                self.p.less(x, y) == s.is_proper_subset(t) && self.p.less(y, x) == t.is_proper_subset(s)
            });
            if !consistent {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(BudgetExceeded { nodes: self.nodes });
            }
            self.assign[x] = f;
            self.used[f as usize] = true;
            if self.rainbow {
                self.used_colors.push(color.unwrap());
            }
            let keep_going = self.step(depth + 1, visit)?;
            if self.rainbow {
                self.used_colors.pop();
            }
            self.used[f as usize] = false;
            self.assign[x] = NIL;
            if !keep_going {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Most-constrained-first: the pinned element (if any), then repeatedly the
/// element with most relations to placed elements, breaking ties by
/// comparability degree, up-set size and domain size.
fn placement_order(p: &Poset, pinned: Option<usize>, domains: &[Vec<u32>]) -> Vec<usize> {
    let size = p.size();
    let degree: Vec<u32> = (0..size)
        .map(|x| (0..size).filter(|&y| p.comparable(x, y)).count() as u32)
        .collect();
    let mut order = Vec::with_capacity(size);
    let mut placed = vec![false; size];
    if let Some(x) = pinned {
        order.push(x);
        placed[x] = true;
    }
    while order.len() < size {
        let next = (0..size)
            .filter(|&x| !placed[x])
            .max_by_key(|&x| {
                let links = order.iter().filter(|&&y| p.comparable(x, y)).count();
                (
                    links,
                    degree[x],
                    p.up_mask(x).count_ones(),
                    std::cmp::Reverse(domains[x].len()),
                    std::cmp::Reverse(x),
                )
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    order
}
