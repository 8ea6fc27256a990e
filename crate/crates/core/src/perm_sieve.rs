//! Deciding and counting permitted indices over intervals.
//!
//! The segmented sieve processes blocks of `segment_size` indices with one
//! bit per index: for every level `h` and selected residue `r`, positions
//! congruent to `r (mod p_h)` are marked by stride, and permitted indices
//! are the unmarked bits. Counting uses population counts on the block
//! words; enumeration walks the zero bits. A naive per-index scan backs the
//! same operations as an oracle.
//!
//! Intervals are inclusive and 1-based throughout, matching the indexing of
//! the residue sequences from `n = 1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::selection::SelectionScheme;

/// Default block size: 2^20 indices (128 KiB of mark bits).
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

/// Inclusive 1-based index range `[lo, hi]`. Size-zero intervals are
/// unrepresentable by construction; `lo == hi` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IntervalSpec {
    lo: u64,
    hi: u64,
}

impl IntervalSpec {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo < 1 || hi < lo {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(IntervalSpec { lo, hi })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn size(&self) -> u64 {
        self.hi - self.lo + 1
    }
}

/// True iff no level of the scheme selects the residue of `n`.
pub fn is_permitted(scheme: &SelectionScheme, n: u64) -> bool {
    scheme
        .levels()
        .all(|(p, selected)| !selected.contains(&((n % p) as u32)))
}

/// Exact permitted count over the interval (segmented implementation).
pub fn count_permitted(scheme: &SelectionScheme, interval: IntervalSpec) -> u64 {
    count_permitted_with(scheme, interval, DEFAULT_SEGMENT_SIZE)
}

/// Segmented count with an explicit segment size. Segments are disjoint, so
/// they may be processed in parallel and reduced by addition; the result is
/// identical to sequential execution.
pub fn count_permitted_with(
    scheme: &SelectionScheme,
    interval: IntervalSpec,
    segment_size: u64,
) -> u64 {
    let segment_size = segment_size.max(64);
    let strides = Strides::of(scheme);
    let segments = segment_count(interval, segment_size);
    if segments <= 1 {
        let mut block = MarkBlock::default();
        return count_segment(&strides, interval.lo, interval.size(), &mut block);
    }
    (0..segments)
        .into_par_iter()
        .map(|i| {
            let (lo, len) = segment_bounds(interval, segment_size, i);
            let mut block = MarkBlock::default();
            count_segment(&strides, lo, len, &mut block)
        })
        .sum()
}

/// Naive reference: test every index in turn.
pub fn count_permitted_naive(scheme: &SelectionScheme, interval: IntervalSpec) -> u64 {
    (interval.lo..=interval.hi)
        .filter(|&n| is_permitted(scheme, n))
        .count() as u64
}

/// Ascending permitted indices. Refuses (with the exact count) when the
/// output would exceed `cap`.
pub fn enumerate_permitted(
    scheme: &SelectionScheme,
    interval: IntervalSpec,
    cap: u64,
) -> Result<Vec<u64>> {
    let count = count_permitted(scheme, interval);
    if count > cap {
        return Err(Error::EnumerationCapExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let strides = Strides::of(scheme);
    let mut block = MarkBlock::default();
    for_each_segment(interval, DEFAULT_SEGMENT_SIZE, |lo, len| {
        mark_segment(&strides, lo, len, &mut block);
        block.for_each_unmarked(lo, len, |n| out.push(n));
    });
    Ok(out)
}

/// Naive reference enumeration.
pub fn enumerate_permitted_naive(scheme: &SelectionScheme, interval: IntervalSpec) -> Vec<u64> {
    (interval.lo..=interval.hi)
        .filter(|&n| is_permitted(scheme, n))
        .collect()
}

/// Counts of permitted indices per residue class modulo the prime `q`.
/// The entries sum to `count_permitted`.
pub fn residue_histogram(
    scheme: &SelectionScheme,
    interval: IntervalSpec,
    q: u64,
) -> Result<Vec<u64>> {
    if !is_small_prime(q) {
        return Err(Error::ModulusNotPrime(q));
    }
    let strides = Strides::of(scheme);
    let mut hist = vec![0u64; q as usize];
    let mut block = MarkBlock::default();
    for_each_segment(interval, DEFAULT_SEGMENT_SIZE, |lo, len| {
        mark_segment(&strides, lo, len, &mut block);
        block.for_each_unmarked(lo, len, |n| hist[(n % q) as usize] += 1);
    });
    Ok(hist)
}

fn is_small_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Flattened `(prime, residue)` stride list extracted once per interval walk.
struct Strides {
    pairs: Vec<(u64, u64)>,
}

impl Strides {
    fn of(scheme: &SelectionScheme) -> Self {
        let mut pairs = Vec::new();
        for (p, selected) in scheme.levels() {
            for &r in selected {
                pairs.push((p, u64::from(r)));
            }
        }
        Strides { pairs }
    }
}

#[derive(Default)]
struct MarkBlock {
    words: Vec<u64>,
}

impl MarkBlock {
    fn reset(&mut self, len: u64) {
        let words = (len as usize).div_ceil(64);
        self.words.clear();
        self.words.resize(words, 0);
    }

    fn for_each_unmarked(&self, lo: u64, len: u64, mut f: impl FnMut(u64)) {
        for (w, &word) in self.words.iter().enumerate() {
            let mut zeros = !word;
            if w == self.words.len() - 1 {
                let rem = (len - 64 * w as u64) as u32;
                if rem < 64 {
                    zeros &= (1u64 << rem) - 1;
                }
            }
            while zeros != 0 {
                let bit = zeros.trailing_zeros() as u64;
                f(lo + 64 * w as u64 + bit);
                zeros &= zeros - 1;
            }
        }
    }

    fn ones(&self, len: u64) -> u64 {
        let mut total = 0;
        for (w, &word) in self.words.iter().enumerate() {
            let mut word = word;
            if w == self.words.len() - 1 {
                let rem = (len - 64 * w as u64) as u32;
                if rem < 64 {
                    word &= (1u64 << rem) - 1;
                }
            }
            total += u64::from(word.count_ones());
        }
        total
    }
}

fn segment_count(interval: IntervalSpec, segment_size: u64) -> u64 {
    interval.size().div_ceil(segment_size)
}

fn segment_bounds(interval: IntervalSpec, segment_size: u64, i: u64) -> (u64, u64) {
    let lo = interval.lo + i * segment_size;
    let len = segment_size.min(interval.hi - lo + 1);
    (lo, len)
}

fn for_each_segment(interval: IntervalSpec, segment_size: u64, mut f: impl FnMut(u64, u64)) {
    let segment_size = segment_size.max(64);
    for i in 0..segment_count(interval, segment_size) {
        let (lo, len) = segment_bounds(interval, segment_size, i);
        f(lo, len);
    }
}

fn count_segment(strides: &Strides, lo: u64, len: u64, block: &mut MarkBlock) -> u64 {
    mark_segment(strides, lo, len, block);
    len - block.ones(len)
}

fn mark_segment(strides: &Strides, lo: u64, len: u64, block: &mut MarkBlock) {
    block.reset(len);
    let words = &mut block.words;
    for &(p, r) in &strides.pairs {
        // first index >= lo congruent to r (mod p)
        let offset = (r + p - lo % p) % p;
        if p == 2 {
            // every second bit: fill whole words with the alternating mask
            let mask = if offset == 0 {
                0x5555_5555_5555_5555u64
            } else {
                0xAAAA_AAAA_AAAA_AAAAu64
            };
            for w in words.iter_mut() {
                *w |= mask;
            }
            continue;
        }
        let mut i = offset as usize;
        let len = len as usize;
        let p = p as usize;
        while i < len {
            words[i >> 6] |= 1u64 << (i & 63);
            i += p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime_basis::PrimeBasis;
    use crate::selection::{sampled_scheme, SchemeKind};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use std::sync::Arc;

    fn table_scheme() -> SelectionScheme {
        SelectionScheme::generic(
            PrimeBasis::first_k(4).unwrap(),
            &[vec![0], vec![0, 2], vec![0, 3], vec![3, 5]],
        )
        .unwrap()
    }

    fn interval(lo: u64, hi: u64) -> IntervalSpec {
        IntervalSpec::new(lo, hi).unwrap()
    }

    #[test]
    fn interval_spec_validates() {
        assert!(IntervalSpec::new(0, 5).is_err());
        assert!(IntervalSpec::new(5, 4).is_err());
        assert_eq!(interval(5, 5).size(), 1);
        assert_eq!(interval(1, 210).size(), 210);
    }

    #[test]
    fn membership_matches_worked_rows() {
        let s = table_scheme();
        assert!(is_permitted(&s, 7));
        assert!(is_permitted(&s, 1));
        assert!(!is_permitted(&s, 2));
        assert!(!is_permitted(&s, 10));

        let s72 = SelectionScheme::for_even(72).unwrap();
        assert!(!is_permitted(&s72, 5));
        assert!(is_permitted(&s72, 11));
    }

    #[test]
    fn counts_over_full_periods_match_known_values() {
        let s = table_scheme();
        assert_eq!(count_permitted(&s, interval(1, 210)), 15);
        assert_eq!(count_permitted(&s, interval(1, 420)), 30);
        assert_eq!(count_permitted(&s, interval(1, 16)), 2);
    }

    #[test]
    fn enumeration_is_sorted_and_matches_counts() {
        let s = table_scheme();
        assert_eq!(enumerate_permitted(&s, interval(1, 16), 100).unwrap(), vec![1, 7]);

        let s72 = SelectionScheme::for_even(72).unwrap();
        assert_eq!(
            enumerate_permitted(&s72, interval(2, 71), 100).unwrap(),
            vec![11, 13, 19, 29, 31, 41, 43, 53, 59, 61, 71]
        );

        // empty result on a prohibited singleton
        assert_eq!(
            enumerate_permitted(&s72, interval(2, 2), 100).unwrap(),
            Vec::<u64>::new()
        );
    }

    #[test]
    fn enumeration_refuses_past_cap() {
        let s = table_scheme();
        assert_eq!(
            enumerate_permitted(&s, interval(1, 210), 10),
            Err(Error::EnumerationCapExceeded { count: 15, cap: 10 })
        );
    }

    #[test]
    fn histogram_sums_to_count_and_is_uniform_over_aligned_periods() {
        let b3 = Arc::new(PrimeBasis::first_k(3).unwrap());
        let s = SelectionScheme::generic(
            Arc::clone(&b3),
            &[vec![0], vec![0, 2], vec![0, 3]],
        )
        .unwrap();
        let hist = residue_histogram(&s, interval(1, 7 * 30), 7).unwrap();
        assert_eq!(hist, vec![3; 7]);

        let s4 = table_scheme();
        let hist = residue_histogram(&s4, interval(1, 11 * 210), 11).unwrap();
        assert_eq!(hist, vec![15; 11]);

        let hist = residue_histogram(&s4, interval(5, 5), 3).unwrap();
        assert_eq!(hist.iter().sum::<u64>(), count_permitted(&s4, interval(5, 5)));

        assert!(residue_histogram(&s4, interval(1, 10), 9).is_err());
    }

    #[test]
    fn histogram_stays_uniform_over_multiples_of_aligned_periods() {
        let b3 = Arc::new(PrimeBasis::first_k(3).unwrap());
        for draw in 0..5 {
            let s = sampled_scheme(&b3, 11, draw);
            for t in [2u64, 3] {
                let hist = residue_histogram(&s, interval(1, t * 7 * 30), 7).unwrap();
                assert_eq!(hist, vec![3 * t; 7], "draw={draw} t={t}");
            }
        }
    }

    #[test]
    fn segmented_matches_naive_on_large_random_intervals() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(99);
        use rand::Rng;
        for pair in 0..100 {
            let k = rng.gen_range(1..=8usize);
            let basis = Arc::new(PrimeBasis::first_k(k).unwrap());
            let s = sampled_scheme(&basis, 99, pair);
            let lo = rng.gen_range(1..=1_000_000u64);
            // log-uniform sizes up to a million indices
            let size = 1u64 << rng.gen_range(0..=20u32);
            let iv = interval(lo, lo + rng.gen_range(0..size));
            assert_eq!(
                count_permitted(&s, iv),
                count_permitted_naive(&s, iv),
                "pair={pair} interval={iv:?}"
            );
            assert_eq!(
                enumerate_permitted(&s, iv, u64::MAX).unwrap(),
                enumerate_permitted_naive(&s, iv),
                "pair={pair} interval={iv:?}"
            );
        }
    }

    #[test]
    fn segmented_agrees_with_naive_on_odd_boundaries() {
        let s = table_scheme();
        for (lo, hi) in [(1, 1), (1, 63), (64, 64), (1, 64), (63, 129), (100, 5000)] {
            let iv = interval(lo, hi);
            assert_eq!(
                count_permitted_with(&s, iv, 64),
                count_permitted_naive(&s, iv),
                "[{lo},{hi}] seg=64"
            );
            assert_eq!(
                count_permitted(&s, iv),
                count_permitted_naive(&s, iv),
                "[{lo},{hi}]"
            );
            assert_eq!(
                enumerate_permitted(&s, iv, u64::MAX).unwrap(),
                enumerate_permitted_naive(&s, iv),
                "[{lo},{hi}] enumerate"
            );
        }
    }

    #[test]
    fn prohibition_transfer_when_extending_a_level() {
        // extending a scheme by one level never un-prohibits an index, and a
        // permitted index survives iff its new residue is unselected
        let b5 = Arc::new(PrimeBasis::first_k(5).unwrap());
        for draw in 0..40 {
            let s5 = sampled_scheme(&b5, 99, draw);
            let s4 = s5.truncated(4).unwrap();
            for n in 1..=2310u64 {
                let before = is_permitted(&s4, n);
                let after = is_permitted(&s5, n);
                if !before {
                    assert!(!after, "draw={draw} n={n}");
                } else {
                    let r = (n % 11) as u32;
                    assert_eq!(after, !s5.selected(5).contains(&r), "draw={draw} n={n}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn permitted_is_periodic(draw in 0u64..400, n in 1u64..100_000) {
            let basis = Arc::new(PrimeBasis::first_k(5).unwrap());
            let s = sampled_scheme(&basis, 1234, draw);
            prop_assert_eq!(is_permitted(&s, n), is_permitted(&s, n + 2310));
        }

        #[test]
        fn segmented_count_matches_naive(
            draw in 0u64..1000,
            lo in 1u64..5_000,
            len in 0u64..4_000,
            k in 1usize..6,
        ) {
            let basis = Arc::new(PrimeBasis::first_k(k).unwrap());
            let s = sampled_scheme(&basis, 777, draw);
            let iv = IntervalSpec::new(lo, lo + len).unwrap();
            prop_assert_eq!(
                count_permitted_with(&s, iv, 512),
                count_permitted_naive(&s, iv)
            );
        }
    }

    #[test]
    fn even_scheme_counting_works_through_the_same_path() {
        let s = SelectionScheme::for_even(72).unwrap();
        assert_eq!(s.kind(), SchemeKind::EvenAssociated { x: 72 });
        assert_eq!(
            count_permitted(&s, interval(1, 72)),
            count_permitted_naive(&s, interval(1, 72))
        );
    }
}
