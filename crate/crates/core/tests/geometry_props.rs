use jumpexit_core::montecarlo::path_rng;
use jumpexit_core::{interaction_domain, AbsorbingSpec, DomainPartition, Grid, IntervalSet, Region};
use proptest::prelude::*;
use rand::Rng;

fn domain() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0.05f64..1.5, 0.05f64..1.5), 1..4).prop_map(|parts| {
        let mut out = Vec::new();
        let mut x = 0.0;
        for (gap, len) in parts {
            x += gap;
            out.push([x, x + len]);
            x += len;
        }
        out
    })
}

#[test]
fn spec_collars() {
    type Case<'a> = (&'a [[f64; 2]], f64, &'a [[f64; 2]]);
    let cases: [Case; 3] = [
        (&[[0.0, 1.0]], 1.0, &[[-1.0, 0.0], [1.0, 2.0]]),
        (&[[0.0, 1.0], [1.5, 2.5]], 1.0, &[[-1.0, 0.0], [1.0, 1.5], [2.5, 3.5]]),
        (&[[0.0, 1.0], [3.0, 4.0]], 0.5, &[[-0.5, 0.0], [1.0, 1.5], [2.5, 3.0], [4.0, 4.5]]),
    ];
    for (omega, lambda, expected) in cases {
        let got = interaction_domain(&IntervalSet::from_pairs(omega).unwrap(), lambda);
        let want = IntervalSet::from_pairs(expected).unwrap();
        assert_eq!(got, want);
    }
}

#[test]
fn invalid_absorbing_set_names_interval() {
    let err = DomainPartition::from_pairs(
        &[[0.0, 1.0]],
        1.0,
        AbsorbingSpec::Explicit(IntervalSet::single(1.5, 2.5)),
    )
    .unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("[1.5, 2.5]"), "{msg}");
    assert!(err.is_validation());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilation_contains_all_short_jumps(omega in domain(), lambda in 0.1f64..1.5, seed in 0u64..1000) {
        let p = DomainPartition::from_pairs(&omega, lambda, AbsorbingSpec::Full).unwrap();
        let ext = p.extended();
        let om = p.omega();
        let mut rng = path_rng(seed, 0);
        for _ in 0..10_000 / 64 {
            let iv = om.intervals()[rng.random_range(0..om.len())];
            let x = rng.random_range(iv.lo..iv.hi);
            let d = rng.random_range(-lambda..lambda);
            prop_assert!(ext.contains(x + d));
            // points farther than λ from Ω are outside Ω ∪ Ω_I
            let far = if d >= 0.0 { om.intervals().last().unwrap().hi + lambda * (1.0 + d.abs()) + 1e-9 }
                      else { om.intervals()[0].lo - lambda * (1.0 + d.abs()) - 1e-9 };
            prop_assert!(!ext.contains(far));
            prop_assert!(om.distance(far) > lambda);
        }
    }

    #[test]
    fn unions_are_sorted_and_merged(omega in domain(), lambda in 0.1f64..1.5) {
        let p = DomainPartition::from_pairs(&omega, lambda, AbsorbingSpec::Full).unwrap();
        for set in [p.omega().clone(), p.interaction().clone(), p.extended()] {
            for w in set.intervals().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
        }
        prop_assert!(p.omega().intersection(p.interaction()).measure() == 0.0);
    }

    #[test]
    fn grid_tiles_and_tags(omega in domain(), lambda in 0.2f64..1.5, frac in 0.02f64..0.12) {
        let p = DomainPartition::from_pairs(&omega, lambda, AbsorbingSpec::Full).unwrap();
        let g = Grid::build(&p, lambda * frac).unwrap();
        let total = p.extended().measure();
        prop_assert!((g.total_width() - total).abs() <= 1e-12 * total);
        prop_assert!(g.max_width() <= lambda / 4.0 * (1.0 + 1e-9));
        for c in g.cells() {
            prop_assert_eq!(p.classify(c.center), c.region);
            prop_assert!(c.region != Region::Outside);
        }
        let counted: usize = [Region::Interior, Region::Absorbing, Region::Collar].iter().map(|&r| g.count(r)).sum();
        prop_assert_eq!(counted, g.len());
        prop_assert_eq!(g.count(Region::Collar), 0);
    }
}
