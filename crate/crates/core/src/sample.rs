//! Seeded random colorings with prescribed class structure.
//!
//! Every sampler walks the subsets in a random order and puts each one into
//! a random admissible class, opening a new class with probability `fresh`
//! or when no existing class admits it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::colorings::Coloring;
use crate::embedding;
use crate::lattice::{self, Lattice, Subset};
use crate::Result;

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn greedy<R: Rng>(
    n: u32,
    rng: &mut R,
    fresh: f64,
    admits: impl Fn(&[Subset], Subset) -> bool,
) -> Result<Coloring> {
    let lattice = Lattice::new(n)?;
    let mut order = lattice.subsets().to_vec();
    order.shuffle(rng);
    let mut classes: Vec<Vec<Subset>> = Vec::new();
    let mut by_mask = vec![0u32; lattice.len()];
    for s in order {
        let open: Vec<usize> = (0..classes.len()).filter(|&i| admits(&classes[i], s)).collect();
        let i = if open.is_empty() || rng.gen_bool(fresh) {
            classes.push(Vec::new());
            classes.len() - 1
        } else {
            open[rng.gen_range(0..open.len())]
        };
        classes[i].push(s);
        by_mask[s.0 as usize] = i as u32;
    }
    Ok(Coloring::from_masks(n, by_mask).canonical())
}

/// Every class is an antichain (no monochromatic `C_2`).
pub fn antichain_classes<R: Rng>(n: u32, rng: &mut R, fresh: f64) -> Result<Coloring> {
    greedy(n, rng, fresh, |class, s| class.iter().all(|t| !t.comparable(s)))
}

/// Every class is a chain (no monochromatic `A_2`).
pub fn chain_classes<R: Rng>(n: u32, rng: &mut R, fresh: f64) -> Result<Coloring> {
    greedy(n, rng, fresh, |class, s| class.iter().all(|t| t.comparable(s)))
}

/// No class contains a chain of `m` sets.
pub fn no_mono_chain<R: Rng>(n: u32, m: usize, rng: &mut R, fresh: f64) -> Result<Coloring> {
    greedy(n, rng, fresh, |class, s| {
        let below = class.iter().filter(|t| t.is_proper_subset(s)).copied().collect::<Vec<_>>();
        let above = class.iter().filter(|t| s.is_proper_subset(**t)).copied().collect::<Vec<_>>();
        embedding::longest_chain(&below).len() + 1 + embedding::longest_chain(&above).len() < m
    })
}

/// No class contains `m` pairwise incomparable sets.
pub fn no_mono_antichain<R: Rng>(n: u32, m: usize, rng: &mut R, fresh: f64) -> Result<Coloring> {
    greedy(n, rng, fresh, |class, s| {
        let others: Vec<Subset> = class.iter().filter(|t| !t.comparable(s)).copied().collect();
        embedding::max_antichain(&others).len() + 1 < m
    })
}

/// Independent uniform colors from `0..k`, renumbered densely.
pub fn uniform<R: Rng>(n: u32, k: u32, rng: &mut R) -> Result<Coloring> {
    lattice::check_ground(n)?;
    let by_mask = (0..1u32 << n).map(|_| rng.gen_range(0..k.max(1))).collect();
    Ok(Coloring::from_masks(n, by_mask).canonical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::verify;
    use crate::posets::parse_spec;

    #[test]
    fn samplers_respect_their_classes() {
        let mut r = rng(7);
        for _ in 0..20 {
            let c = antichain_classes(4, &mut r, 0.1).unwrap();
            assert!(verify(&c, &[parse_spec("C2").unwrap()], &[]).avoided);
            let c = chain_classes(4, &mut r, 0.1).unwrap();
            assert!(verify(&c, &[parse_spec("A2").unwrap()], &[]).avoided);
            let c = no_mono_chain(4, 3, &mut r, 0.1).unwrap();
            assert!(verify(&c, &[parse_spec("C3").unwrap()], &[]).avoided);
            let c = no_mono_antichain(4, 3, &mut r, 0.1).unwrap();
            assert!(verify(&c, &[parse_spec("A3").unwrap()], &[]).avoided);
            assert!(uniform(3, 3, &mut r).unwrap().is_dense());
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = chain_classes(5, &mut rng(3), 0.2).unwrap();
        let b = chain_classes(5, &mut rng(3), 0.2).unwrap();
        assert_eq!(a, b);
    }
}
