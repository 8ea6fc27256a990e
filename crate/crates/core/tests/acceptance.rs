//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use num::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use goldsieve_core::analytics::{
    average_density_survey, bijection_left_to_right, c_closed, delta_period, extrema_survey,
    interval_density, interval_density_bounds, right_density_bounds, split_left_right,
    DensityValue, IntervalRole,
};
use goldsieve_core::goldbach::{
    fundamental_check, partition_candidates, scan_range, Complement, FundamentalCheck,
    PartitionReport, ScanEngine, ScanSummary,
};
use goldsieve_core::perm_sieve::{
    count_permitted, count_permitted_naive, is_permitted, residue_histogram, IntervalSpec,
};
use goldsieve_core::prime_basis::{first_n_primes, PrimeBasis};
use goldsieve_core::selection::{generic_scheme_at, sampled_scheme, SchemeStrategy};

fn verdict(number: u32, name: &str, ok: bool) {
    println!(
        "acceptance {number:02} {name}: {}",
        if ok { "pass" } else { "FAIL" }
    );
}

fn rational(num: i64, den: i64) -> DensityValue {
    DensityValue::from_ratio(BigInt::from(num), BigInt::from(den))
}

fn iv(lo: u64, hi: u64) -> IntervalSpec {
    IntervalSpec::new(lo, hi).unwrap()
}

#[test]
fn criterion_01_period_counts_match_closed_form() {
    let start = Instant::now();
    let mut ok = true;
    for k in 1..=8usize {
        let basis = Arc::new(PrimeBasis::first_k(k).unwrap());
        let m_k = basis.primorial().to_u64_digits()[0];
        let expected = c_closed(k).unwrap();
        for draw in 0..50 {
            let scheme = sampled_scheme(&basis, 1000 + k as u64, draw);
            let counted = count_permitted(&scheme, iv(1, m_k));
            if BigUint::from(counted) != expected {
                ok = false;
                eprintln!("mismatch at k={k} draw={draw}: {counted} vs {expected}");
            }
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(60);
    verdict(1, "period counts match the closed form", ok && in_time);
    assert!(ok, "closed-form count mismatch");
    assert!(in_time, "took {elapsed:?}, budget 60 s");
}

#[test]
fn criterion_02_period_density_constants_and_recurrence() {
    let d4_ok = delta_period(4).unwrap() == rational(1, 2);
    let d5_ok = delta_period(5).unwrap() == rational(135, 210);

    let primes = first_n_primes(36);
    let mut rec_ok = true;
    for k in 1..=34usize {
        let lhs = delta_period(k + 1).unwrap();
        let rhs = DensityValue::from_rational(
            delta_period(k).unwrap().ratio()
                * num::BigRational::new(
                    BigInt::from(primes[k] - 2),
                    BigInt::from(primes[k - 1]),
                ),
        );
        if lhs != rhs {
            rec_ok = false;
            eprintln!("recurrence fails at k={k}");
        }
    }
    let ok = d4_ok && d5_ok && rec_ok;
    verdict(2, "period density constants and recurrence", ok);
    assert!(ok);
}

#[test]
fn criterion_03_exhaustive_average_density_is_exact() {
    let start = Instant::now();
    let mean =
        average_density_survey(4, iv(1, 100), SchemeStrategy::Exhaustive, 10_000).unwrap();
    let elapsed = start.elapsed();
    let ok = mean == rational(1, 2);
    let in_time = elapsed < Duration::from_secs(5);
    verdict(3, "exhaustive average density over [1,100]", ok && in_time);
    assert!(ok, "mean was {}/{}", mean.numerator(), mean.denominator());
    assert!(in_time, "took {elapsed:?}, budget 5 s");
}

#[test]
fn criterion_04_residue_histograms_are_uniform() {
    let mut ok = true;
    for k in 3..=6usize {
        let basis = Arc::new(PrimeBasis::first_k(k).unwrap());
        let primes = first_n_primes(k + 1);
        let q = primes[k];
        let m_k = basis.primorial().to_u64_digits()[0];
        let expected = c_closed(k).unwrap().to_u64_digits()[0];
        for draw in 0..10 {
            let scheme = sampled_scheme(&basis, 2000 + k as u64, draw);
            let hist = residue_histogram(&scheme, iv(1, q * m_k), q).unwrap();
            if hist != vec![expected; q as usize] {
                ok = false;
                eprintln!("nonuniform histogram at k={k} draw={draw}: {hist:?}");
            }
        }
    }
    verdict(4, "residue histograms uniform over aligned periods", ok);
    assert!(ok);
}

#[test]
fn criterion_05_measured_density_strictly_inside_bounds() {
    let mut violations = 0u32;
    for k in 3..=6usize {
        let basis = Arc::new(PrimeBasis::first_k(k).unwrap());
        let m_k = basis.primorial().to_u64_digits()[0];
        let p_k = basis.last_prime();
        let mut rng = ChaCha12Rng::seed_from_u64(3000 + k as u64);
        for draw in 0..200u64 {
            // at least one full period so the sandwich is two-sided
            let n = rng.gen_range(1..=5) * m_k + rng.gen_range(0..m_k);
            let scheme = sampled_scheme(&basis, 4000 + k as u64, draw);
            let count = count_permitted(&scheme, iv(1, n));
            let measured = interval_density(count, iv(1, n), p_k);
            let (lower, upper) = interval_density_bounds(k, n).unwrap();
            if !(lower < measured && measured < upper) {
                violations += 1;
                eprintln!("bounds violated at k={k} n={n} draw={draw}");
            }
        }
    }
    verdict(5, "measured density strictly inside interval bounds", violations == 0);
    assert_eq!(violations, 0);
}

#[test]
fn criterion_06_split_conservation_and_bijection_on_witnesses() {
    let basis = Arc::new(PrimeBasis::first_k(4).unwrap());
    let mut conservation_ok = true;
    for i in 0..1260u64 {
        let scheme = generic_scheme_at(&basis, i);
        // both sides counted directly; their sum is forced
        let left = count_permitted(&scheme, iv(1, 49));
        let right = count_permitted(&scheme, iv(50, 210));
        if left + right != 15 {
            conservation_ok = false;
            eprintln!("split of scheme {i} sums to {}", left + right);
        }
    }

    let left = extrema_survey(4, IntervalRole::Left, SchemeStrategy::Exhaustive, None, 2000)
        .unwrap();
    let right = extrema_survey(4, IntervalRole::Right, SchemeStrategy::Exhaustive, None, 2000)
        .unwrap();
    let map_ok = bijection_left_to_right(4, 4, &left.min_density).unwrap() == right.max_density
        && bijection_left_to_right(4, 4, &left.max_density).unwrap() == right.min_density;

    let ok = conservation_ok && map_ok;
    verdict(6, "left/right conservation and extrema bijection", ok);
    assert!(conservation_ok);
    assert!(map_ok);
}

#[test]
fn criterion_07_right_densities_inside_envelope() {
    let basis = Arc::new(PrimeBasis::first_k(4).unwrap());
    let mut violations = 0u32;
    let envelopes: Vec<_> = (1..=4)
        .map(|h| right_density_bounds(h, 4).unwrap())
        .collect();
    for i in 0..1260u64 {
        let scheme = generic_scheme_at(&basis, i);
        for h in 1..=4usize {
            let truncated = scheme.truncated(h).unwrap();
            let split = split_left_right(&truncated, 4).unwrap();
            let (lower, upper) = &envelopes[h - 1];
            let d = &split.right_density;
            if !(lower <= d && d <= upper) {
                violations += 1;
                eprintln!("right envelope violated at scheme {i}, h={h}");
            }
        }
    }
    verdict(7, "right-interval densities inside the envelope", violations == 0);
    assert_eq!(violations, 0);
}

/// Criteria 8 and 9 share one full-range scan.
struct ScanOutcome {
    summary: ScanSummary,
    min_c_above_threshold: u64,
    engines_disagree: u64,
    elapsed: Duration,
}

fn full_scan() -> &'static ScanOutcome {
    static SCAN: OnceLock<ScanOutcome> = OnceLock::new();
    SCAN.get_or_init(|| {
        // checkpoints where the factor-table report is recomputed through
        // the segmented residue sieve and must agree bit for bit
        let mut checkpoints: BTreeSet<u64> = (6..=5000).step_by(2).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..100 {
            checkpoints.insert(rng.gen_range(2501..=500_000) * 2);
        }

        let min_above = Mutex::new(u64::MAX);
        let disagreements = Mutex::new(0u64);
        let start = Instant::now();
        let summary = scan_range(6, 1_000_000, 2, ScanEngine::FactorTable, |report| {
            if report.x > 22201 {
                let mut m = min_above.lock().unwrap();
                *m = (*m).min(report.c_k_x);
            }
            if checkpoints.contains(&report.x) {
                let direct = partition_candidates(report.x).unwrap();
                if &direct != report {
                    *disagreements.lock().unwrap() += 1;
                    eprintln!("engines disagree at x={}", report.x);
                }
            }
        })
        .unwrap();
        ScanOutcome {
            summary,
            min_c_above_threshold: min_above.into_inner().unwrap(),
            engines_disagree: disagreements.into_inner().unwrap(),
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn criterion_08_soundness_over_the_full_range() {
    let outcome = full_scan();
    let sound = outcome.summary.violations.is_empty();
    let agree = outcome.engines_disagree == 0;
    let in_time = outcome.elapsed < Duration::from_secs(600);
    verdict(
        8,
        "per-index soundness, symmetry, and bound over [6, 1e6]",
        sound && agree && in_time,
    );
    assert!(sound, "violations: {:?}", &outcome.summary.violations[..5.min(outcome.summary.violations.len())]);
    assert!(agree, "{} engine disagreements", outcome.engines_disagree);
    assert!(in_time, "scan took {:?}, budget 600 s", outcome.elapsed);
}

#[test]
fn criterion_09_candidate_floor_past_the_threshold() {
    let outcome = full_scan();
    let min = outcome.min_c_above_threshold;
    let ok = min >= 3;
    verdict(9, "candidate count at least 3 past 22201", ok);
    assert!(ok, "min c_k_x above 22201 was {min}");
}

#[test]
fn criterion_10_worked_example_at_72() {
    let scheme = goldsieve_core::SelectionScheme::for_even(72).unwrap();
    let prohibited = !is_permitted(&scheme, 5);
    let check = fundamental_check(72, 5).unwrap();
    let holds = check == FundamentalCheck::Holds(Complement::Prime(67));
    let ok = prohibited && holds;
    verdict(10, "prohibited index 5 still passes the residue test", ok);
    assert!(prohibited, "index 5 should be prohibited for 72");
    assert!(holds, "got {check:?}");
}

#[test]
fn criterion_11_left_survey_at_level_35() {
    let strategy = SchemeStrategy::Sample {
        count: 10_000,
        seed: 42,
    };
    let report = extrema_survey(35, IntervalRole::Left, strategy, None, 0).unwrap();
    let again = extrema_survey(35, IntervalRole::Left, strategy, None, 0).unwrap();
    let deterministic = report == again;

    // report-only: the threshold verdict is recorded, not asserted
    let threshold = report.min_count_above_half_pk;
    let has_fields = threshold.is_some() && report.samples == 10_000 && report.seed == Some(42);
    println!(
        "  min count {} over [1, {}]; exceeds p_k/2 = 74.5: {:?}; counterexample: {}",
        report.min_count,
        report.interval_hi,
        threshold,
        report
            .counterexample
            .as_ref()
            .map(|s| serde_json::to_string(s).unwrap())
            .unwrap_or_else(|| "none".into()),
    );
    let ok = deterministic && has_fields;
    verdict(11, "sampled left survey at level 35 is deterministic", ok);
    assert!(deterministic);
    assert!(has_fields);
}

#[test]
fn criterion_12_throughput_and_segmented_naive_agreement() {
    let basis = Arc::new(PrimeBasis::first_k(35).unwrap());
    let scheme = sampled_scheme(&basis, 42, 0);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let (count, elapsed) = pool.install(|| {
        let start = Instant::now();
        let count = count_permitted(&scheme, iv(1, 100_000_000));
        (count, start.elapsed())
    });
    let in_time = elapsed <= Duration::from_secs(10);

    let seg = count_permitted(&scheme, iv(1, 1_000_000));
    let naive = count_permitted_naive(&scheme, iv(1, 1_000_000));
    let agree = seg == naive;

    verdict(12, "single-thread throughput and naive agreement", in_time && agree);
    println!("  counted {count} permitted indices in [1, 1e8] in {elapsed:?}");
    assert!(in_time, "count over [1, 1e8] took {elapsed:?}, budget 10 s");
    assert!(agree, "segmented {seg} vs naive {naive}");
}

#[test]
fn scan_reports_match_single_x_reports_on_spot_checks() {
    // belt-and-braces equivalence outside the shared scan checkpoints
    let mut collected: Vec<PartitionReport> = Vec::new();
    scan_range(22202, 22230, 2, ScanEngine::ResidueSieve, |r| {
        collected.push(r.clone())
    })
    .unwrap();
    for report in &collected {
        assert_eq!(&partition_candidates(report.x).unwrap(), report);
    }
}
