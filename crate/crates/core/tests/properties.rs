use carpetlab::boxlab::{exact_box_counts, fit_level_range, DEFAULT_BUDGET};
use carpetlab::dimension::{ly_dimension_conditional, row_profile, Weights};
use carpetlab::numopt::{maximize_dimension, objective, objective_gradient, AscentConfig};
use carpetlab::{hausdorff_dimension, ly_dimension, optimal_weights, CarpetSpec, Digit, Sign};
use proptest::prelude::*;

fn sign() -> impl Strategy<Value = Sign> {
    any::<bool>().prop_map(|b| if b { Sign::Plus } else { Sign::Minus })
}

/// Random carpet with `lo..=hi` digits on a grid with `n <= max_n`.
fn carpet(lo: usize, hi: usize, max_n: u32) -> impl Strategy<Value = CarpetSpec> {
    (3..=max_n)
        .prop_flat_map(|n| (Just(n), 2..n))
        .prop_flat_map(move |(n, m)| {
            let cells: Vec<(u32, u32)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
            let hi = hi.min(cells.len());
            let picked = proptest::sample::subsequence(cells, lo..=hi).prop_shuffle();
            (
                Just(n),
                Just(m),
                picked,
                prop::collection::vec((sign(), sign()), hi),
            )
        })
        .prop_map(|(n, m, cells, signs)| {
            let digits = cells
                .iter()
                .zip(&signs)
                .map(|(&(i, j), &(sx, sy))| Digit::new(i, j, sx, sy))
                .collect();
            CarpetSpec::new(n, m, digits).unwrap()
        })
}

fn simplex(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let drift = 1.0 - p.iter().sum::<f64>();
    p[0] += drift;
    p
}

fn carpet_with_weights() -> impl Strategy<Value = (CarpetSpec, Vec<f64>)> {
    carpet(2, 12, 8).prop_flat_map(|spec| {
        let k = spec.len();
        (
            Just(spec),
            prop::collection::vec(0.01f64..1.0, k).prop_map(|r| simplex(&r)),
        )
    })
}

fn signs_for(k: usize) -> impl Strategy<Value = Vec<(Sign, Sign)>> {
    prop::collection::vec((sign(), sign()), k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reflections_do_not_change_dimensions(
        (spec, p, signs) in carpet_with_weights()
            .prop_flat_map(|(s, p)| { let k = s.len(); (Just(s), Just(p), signs_for(k)) })
    ) {
        let other = spec.with_signatures(&signs);
        let a = row_profile(&spec);
        let b = row_profile(&other);
        prop_assert_eq!(hausdorff_dimension(&a).to_bits(), hausdorff_dimension(&b).to_bits());
        let wa = Weights::new(&spec, p.clone()).unwrap();
        let wb = Weights::new(&other, p).unwrap();
        prop_assert_eq!(
            ly_dimension(&a, &wa).unwrap().to_bits(),
            ly_dimension(&b, &wb).unwrap().to_bits()
        );
    }

    #[test]
    fn no_measure_beats_the_set((spec, p) in carpet_with_weights()) {
        let prof = row_profile(&spec);
        let w = Weights::new(&spec, p).unwrap();
        let ly = ly_dimension(&prof, &w).unwrap();
        prop_assert!(ly <= hausdorff_dimension(&prof) + 1e-9);
        let cond = ly_dimension_conditional(&prof, &w).unwrap();
        prop_assert!((ly - cond).abs() <= 1e-12, "{} vs {}", ly, cond);
        let best = ly_dimension(&prof, &optimal_weights(&prof)).unwrap();
        prop_assert!((best - hausdorff_dimension(&prof)).abs() <= 1e-12);
    }

    #[test]
    fn dimension_bounds(spec in carpet(2, 64, 8)) {
        let prof = row_profile(&spec);
        let d = hausdorff_dimension(&prof);
        let lower = (prof.r as f64).ln() / prof.log_m;
        prop_assert!(d >= lower - 1e-12);
        prop_assert!(d <= 2.0 + 1e-12);
    }

    #[test]
    fn row_relabelling_keeps_dimension(spec in carpet(2, 20, 8), shift in 0u32..8) {
        // cyclically moving rows keeps the row counts, including empty rows
        let m = spec.m();
        let moved: Vec<Digit> = spec
            .digits()
            .iter()
            .map(|d| Digit::new(d.i, (d.j + shift) % m, d.sx, d.sy))
            .collect();
        let other = CarpetSpec::new(spec.n(), m, moved).unwrap();
        let a = hausdorff_dimension(&row_profile(&spec));
        let b = hausdorff_dimension(&row_profile(&other));
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn cylinders_nest_and_do_not_overlap(
        (spec, words) in carpet(2, 6, 6).prop_flat_map(|s| {
            let k = s.len();
            (Just(s), prop::collection::vec(prop::collection::vec(0..k, 1..=3), 2..8))
        })
    ) {
        for w in &words {
            let c = spec.cylinder_of_word(w).unwrap();
            let parent = spec.cylinder_of_word(&w[..w.len() - 1]).unwrap();
            prop_assert!(parent.contains(&c));
            // composed maps at the corners reproduce the exact endpoints
            let ((x0, x1), (y0, y1)) = c.bounds();
            let image = |pt: (f64, f64)| w.iter().rev().fold(pt, |p, &d| spec.apply(d, p));
            let (ax, ay) = image((0.0, 0.0));
            let (bx, by) = image((1.0, 1.0));
            prop_assert!((ax.min(bx) - x0).abs() <= 1e-12 && (ax.max(bx) - x1).abs() <= 1e-12);
            prop_assert!((ay.min(by) - y0).abs() <= 1e-12 && (ay.max(by) - y1).abs() <= 1e-12);
        }
        for a in &words {
            for b in &words {
                if a.len() != b.len() || a == b {
                    continue;
                }
                let ca = spec.cylinder_of_word(a).unwrap();
                let cb = spec.cylinder_of_word(b).unwrap();
                prop_assert!(ca.x.index != cb.x.index || ca.y.index != cb.y.index);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_counts_grow_boundedly(spec in carpet(2, 7, 6)) {
        let s = exact_box_counts(&spec, 1, 6, DEFAULT_BUDGET).unwrap();
        let counts = s.counts();
        let k = spec.len() as u64;
        for w in counts.windows(2) {
            prop_assert!(w[0] <= w[1] && w[1] <= k * w[0], "{:?}", counts);
        }
    }

    #[test]
    fn counting_slope_is_not_below_dimension(spec in carpet(2, 7, 6)) {
        let s = exact_box_counts(&spec, 4, 8, DEFAULT_BUDGET).unwrap();
        let fit = fit_level_range(&s, spec.m(), 4, 8).unwrap();
        let d = hausdorff_dimension(&row_profile(&spec));
        prop_assert!(fit.slope >= d - 0.05, "slope {} dim {}", fit.slope, d);
    }

    #[test]
    fn ascent_reaches_closed_form(spec in carpet(2, 12, 8)) {
        let prof = row_profile(&spec);
        let trace = maximize_dimension(&prof, &Weights::uniform(&spec), &AscentConfig::default())
            .unwrap();
        let target = optimal_weights(&prof);
        let dist = trace
            .weights
            .p()
            .iter()
            .zip(target.p())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        prop_assert!(dist <= 1e-6, "dist {}", dist);
        let sum: f64 = trace.weights.p().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!(trace.weights.p().iter().all(|&x| x > 0.0));
        prop_assert!(trace.objective.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn gradient_matches_central_differences(
        (spec, p) in carpet(2, 10, 8).prop_flat_map(|s| {
            let k = s.len();
            (Just(s), prop::collection::vec(0.2f64..1.0, k).prop_map(|r| simplex(&r)))
        })
    ) {
        let prof = row_profile(&spec);
        let w = Weights::new(&spec, p.clone()).unwrap();
        let g = objective_gradient(&prof, &w).unwrap();
        let h = 1e-6;
        for a in 1..spec.len() {
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus[a] += h;
            plus[0] -= h;
            minus[a] -= h;
            minus[0] += h;
            let fd = (objective(&prof, &plus) - objective(&prof, &minus)) / (2.0 * h);
            let an = g[a] - g[0];
            prop_assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{} vs {}", fd, an);
        }
    }
}
