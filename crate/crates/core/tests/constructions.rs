mod common;

use common::p;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rainbow_ramsey::bounds::{self, lubell};
use rainbow_ramsey::colorings::{self, Coloring};
use rainbow_ramsey::extractors::{self, ExtractionOutcome};
use rainbow_ramsey::lattice::{binomial, level, Lattice, Subset};
use rainbow_ramsey::{embedding, sample};

fn total(outcome: &ExtractionOutcome, c: &Coloring) -> Result<(), TestCaseError> {
    prop_assert!(outcome.is_rainbow() || outcome.is_monochromatic(), "{:?}", outcome);
    prop_assert!(outcome.verify(c).is_ok());
    let json = serde_json::to_string(outcome).unwrap();
    prop_assert_eq!(&serde_json::from_str::<ExtractionOutcome>(&json).unwrap(), outcome);
    Ok(())
}

proptest! {
    #[test]
    fn constructions_are_canonical(big_n in 0u32..=12, m in 2u32..=5, y in 0u32..=12) {
        let mut all = vec![
            colorings::level_block(big_n, m).unwrap(),
            colorings::rank(big_n).unwrap(),
            colorings::scd_block(big_n, m).unwrap(),
            colorings::ceil_size(big_n, m).unwrap(),
            colorings::trace(big_n, y.min(big_n)).unwrap(),
        ];
        if big_n >= 1 {
            all.push(colorings::near_constant(big_n).unwrap());
        }
        for c in &all {
            prop_assert_eq!(c.n(), big_n);
            prop_assert!(c.is_dense());
            prop_assert!(c.is_canonical());
        }
        prop_assert_eq!(all[0].palette(), (big_n + 1).div_ceil(m - 1));
        prop_assert_eq!(all[4].palette(), 1 << y.min(big_n));
    }

    #[test]
    fn coloring_json_round_trip(colors in proptest::collection::vec(0u32..6, 32)) {
        let c = Coloring::new(5, colors).unwrap();
        let back: Coloring = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(&back, &c);
        let canon = c.canonical();
        prop_assert!(canon.is_canonical());
        prop_assert_eq!(canon.classes().len(), c.palette_used() as usize);
    }

    #[test]
    fn lubell_is_additive(bits in any::<u64>(), split in any::<u64>()) {
        let sets = Lattice::new(6).unwrap().subsets().to_vec();
        let pick = |f: &dyn Fn(usize) -> bool| -> Vec<Subset> {
            sets.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1 && f(*i)).map(|(_, s)| *s).collect()
        };
        let a = pick(&|i| split >> i & 1 == 1);
        let b = pick(&|i| split >> i & 1 == 0);
        let both = pick(&|_| true);
        prop_assert_eq!(lubell(6, &a).unwrap() + lubell(6, &b).unwrap(), lubell(6, &both).unwrap());
        let anti = embedding::max_antichain(&both);
        prop_assert!(lubell(6, &anti).unwrap() <= BigRational::one());
    }

    #[test]
    fn chain_extractors_are_total(seed in any::<u64>(), n in 1u32..=6, k in 1u32..=6, m in 2u32..=4) {
        let mut rng = sample::rng(seed);
        let c = sample::uniform(n, k, &mut rng).unwrap();
        total(&extractors::rainbow_chain_a2(&c).unwrap(), &c)?;
        let am = extractors::rainbow_chain_am(&c, m).unwrap();
        total(&am, &c)?;
        prop_assert_eq!(extractors::rainbow_chain_am(&c, m).unwrap(), am);
    }

    #[test]
    fn boolean_extractor_is_total(seed in any::<u64>(), k in 1u32..=40) {
        let mut rng = sample::rng(seed);
        let c = sample::uniform(7, k, &mut rng).unwrap();
        total(&extractors::rainbow_boolean(&c, 3, 2).unwrap(), &c)?;
        let c6 = sample::uniform(6, k, &mut rng).unwrap();
        let out = extractors::rainbow_boolean(&c6, 2, 3).unwrap();
        total(&out, &c6)?;
        prop_assert_eq!(extractors::rainbow_boolean(&c6, 2, 3).unwrap(), out);
    }

    #[test]
    fn antichain_extractor_is_total(seed in any::<u64>(), k in 1u32..=12, case in 0usize..4) {
        let (m, n, big_n) = [(2, 2, 4), (2, 3, 5), (3, 2, 4), (3, 3, 6)][case];
        let mut rng = sample::rng(seed);
        let c = sample::uniform(big_n, k, &mut rng).unwrap();
        total(&extractors::rainbow_antichain(&c, m, n).unwrap(), &c)?;
    }
}

#[test]
fn lubell_of_levels_and_chains() {
    for n in 0..=10u32 {
        for k in 0..=n {
            assert_eq!(lubell(n, &level(n, k).unwrap()).unwrap(), BigRational::one());
        }
        let chain: Vec<Subset> = (0..=n).map(Subset::prefix).collect();
        let expected = (0..=n).fold(BigRational::zero(), |acc, i| {
            acc + BigRational::new(1.into(), binomial(n, i).into())
        });
        assert_eq!(lubell(n, &chain).unwrap(), expected);
    }
}

#[test]
fn threshold_matches_central_binomials() {
    for m in 2..=6u64 {
        for n in 2..=6u64 {
            let t = bounds::n_threshold(m, n) as u32;
            assert!(binomial(t, t / 2) > (m - 1) * (n - 1));
            assert!(t == 0 || binomial(t - 1, (t - 1) / 2) <= (m - 1) * (n - 1));
        }
    }
}

#[test]
fn table_rows_agree_with_constructions_and_search() {
    let opts = rainbow_ramsey::table::TableOptions::default();
    for cell in rainbow_ramsey::table::cmd_table(&opts).unwrap() {
        assert_ne!(cell.status, rainbow_ramsey::table::Status::SkippedWithReason, "{cell:?}");
        let r = bounds::report(&p(&cell.p), &p(&cell.q));
        assert_eq!(r.exact, Some(cell.claimed));
        assert!(r.best_lower.to_u64().unwrap() <= cell.claimed);
    }
}
