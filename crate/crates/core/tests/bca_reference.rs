//! BCa limits checked against a from-scratch reference built on statrs'
//! normal distribution and a hand-rolled leave-one-out loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use paircmp::interval::{bca_ci, QuantileRule};
use paircmp::resampling::{bootstrap_diff_distribution, jackknife_diff_values};
use paircmp::{compare_pair, ComparisonConfig, LabelValue, MetricSpec, PairedEvaluationSet, ResamplingConfig};

fn accuracy(gold: &[bool], pred: &[bool]) -> f64 {
    gold.iter().zip(pred).filter(|(g, p)| g == p).count() as f64 / gold.len() as f64
}

fn type7(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn reference_bca(dist: &[f64], theta: f64, jack: &[f64], level: f64) -> (f64, f64) {
    let norm = Normal::new(0.0, 1.0).unwrap();
    let b = dist.len() as f64;
    let below = dist.iter().filter(|&&d| d < theta).count() as f64;
    let ties = dist.iter().filter(|&&d| d == theta).count() as f64;
    let z0 = norm.inverse_cdf((below + 0.5 * ties) / b);
    let mean = jack.iter().sum::<f64>() / jack.len() as f64;
    let num: f64 = jack.iter().map(|j| (mean - j).powi(3)).sum();
    let den: f64 = jack.iter().map(|j| (mean - j).powi(2)).sum();
    let a = num / (6.0 * den.powf(1.5));
    let adjust = |z: f64| norm.cdf(z0 + (z0 + z) / (1.0 - a * (z0 + z)));
    let alpha = 1.0 - level;
    let a1 = adjust(norm.inverse_cdf(alpha / 2.0));
    let a2 = adjust(norm.inverse_cdf(1.0 - alpha / 2.0));
    let mut sorted = dist.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (x, y) = (type7(&sorted, a1), type7(&sorted, a2));
    (x.min(y), x.max(y))
}

#[test]
fn matches_independent_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 30;
    let gold: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let flip = |rng: &mut ChaCha8Rng, p: f64| -> Vec<bool> {
        gold.iter()
            .map(|&g| if rng.random::<f64>() < p { g } else { !g })
            .collect()
    };
    let a = flip(&mut rng, 0.8);
    let b = flip(&mut rng, 0.6);
    let lv = |xs: &[bool]| {
        xs.iter()
            .map(|&x| LabelValue::Label(if x { "y" } else { "n" }.into()))
            .collect::<Vec<_>>()
    };
    let set = PairedEvaluationSet::from_rows(lv(&gold), [("a", lv(&a)), ("b", lv(&b))]).unwrap();
    let metric = MetricSpec::accuracy();

    // leave-one-pair-out by hand
    let jack: Vec<f64> = (0..n)
        .map(|skip| {
            let keep = |xs: &[bool]| -> Vec<bool> {
                xs.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &x)| x)
                    .collect()
            };
            accuracy(&keep(&gold), &keep(&a)) - accuracy(&keep(&gold), &keep(&b))
        })
        .collect();
    let lib_jack = jackknife_diff_values(&set, "a", "b", &metric).unwrap().values;
    for (x, y) in jack.iter().zip(&lib_jack) {
        assert!((x - y).abs() < 1e-15);
    }

    let theta = accuracy(&gold, &a) - accuracy(&gold, &b);
    let cfg = ResamplingConfig {
        replicates: 2000,
        seed: 7,
        ..Default::default()
    };
    let dist = bootstrap_diff_distribution(&set, "a", "b", &metric, &cfg)
        .unwrap()
        .values;
    for level in [0.9, 0.95, 0.99] {
        let (lo, hi) = reference_bca(&dist, theta, &jack, level);
        let (ci, diag) = bca_ci(&dist, theta, &lib_jack, level, QuantileRule::Linear).unwrap();
        assert!(diag.fallback.is_none() && !diag.clamped);
        assert!(
            (ci.lower - lo).abs() <= 1e-9,
            "level {level}: lower {} vs {lo}",
            ci.lower
        );
        assert!(
            (ci.upper - hi).abs() <= 1e-9,
            "level {level}: upper {} vs {hi}",
            ci.upper
        );
    }

    let mut ccfg = ComparisonConfig::with_seed(7);
    ccfg.resampling.replicates = 2000;
    let r = compare_pair(&set, "a", "b", &metric, &ccfg).unwrap();
    let (lo, hi) = reference_bca(&dist, theta, &jack, 0.95);
    assert!((r.interval.lower - lo).abs() <= 1e-9 && (r.interval.upper - hi).abs() <= 1e-9);
}

#[test]
fn constructed_gap_is_exact_and_covered() {
    // 500 instances: A right on 400, B right on 375, so the gap is exactly 0.05
    let n = 500;
    let gold: Vec<LabelValue> = (0..n).map(|i| LabelValue::Label(format!("c{}", i % 3))).collect();
    let wrong = |i: usize| LabelValue::Label(format!("c{}", (i + 1) % 3));
    let a: Vec<LabelValue> = (0..n)
        .map(|i| if i < 400 { gold[i].clone() } else { wrong(i) })
        .collect();
    let b: Vec<LabelValue> = (0..n)
        .map(|i| {
            if (25..400).contains(&i) {
                gold[i].clone()
            } else {
                wrong(i)
            }
        })
        .collect();
    let set = PairedEvaluationSet::from_rows(gold, [("a", a), ("b", b)]).unwrap();
    let mut cfg = ComparisonConfig::with_seed(500);
    cfg.resampling.replicates = 4000;
    let r = compare_pair(&set, "a", "b", &MetricSpec::accuracy(), &cfg).unwrap();
    assert_eq!(r.theta_hat, 0.8 - 0.75);
    assert!(r.interval.lower < 0.05 && 0.05 < r.interval.upper, "{:?}", r.interval);
    assert!(
        r.interval.lower > 0.0,
        "25 one-sided discordant pairs should be significant: {:?}",
        r.interval
    );
}
