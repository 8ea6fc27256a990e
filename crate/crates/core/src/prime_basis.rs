//! Prime generation and the modulus basis underlying every scheme.
//!
//! A [`PrimeBasis`] is the ordered list of the first `k` primes together with
//! their exact product (the period of the associated residue system). Bases
//! are built either by level or from an even number `x`, in which case the
//! basis holds exactly the primes `p` with `p^2 < x`.

use num::BigUint;

use crate::error::{Error, Result};

/// Bit-array limit for the plain sieve; larger limits go through the
/// segmented path so memory stays bounded.
const PLAIN_SIEVE_LIMIT: u64 = 100_000_000;

/// All primes in `[2, limit]`, ascending.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::LimitTooSmall(limit));
    }
    if limit <= PLAIN_SIEVE_LIMIT {
        Ok(sieve_plain(limit))
    } else {
        Ok(sieve_segmented(limit))
    }
}

/// Odd-only sieve of Eratosthenes. Bit i represents the odd number 2i + 1.
fn sieve_plain(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let half = n / 2 + 1;
    let mut composite = vec![0u64; half / 64 + 1];
    let is_set = |bits: &[u64], i: usize| bits[i / 64] >> (i % 64) & 1 == 1;

    let mut primes = vec![2];
    let mut i = 1; // odd number 3
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !is_set(&composite, i) {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < half {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }
    for i in 1..half {
        let v = 2 * i + 1;
        if v > n {
            break;
        }
        if !is_set(&composite, i) {
            primes.push(v as u64);
        }
    }
    primes
}

/// Segmented sieve for limits past the bit-array threshold. Base primes up to
/// `sqrt(limit)` mark blocks of odd numbers.
fn sieve_segmented(limit: u64) -> Vec<u64> {
    let root = isqrt(limit);
    let base = sieve_plain(root.max(2));
    let mut primes = base.clone();

    const SEGMENT: u64 = 1 << 22;
    let mut lo = root + 1;
    if lo % 2 == 0 {
        lo += 1;
    }
    let mut block = Vec::new();
    while lo <= limit {
        let hi = (lo + 2 * SEGMENT - 2).min(limit);
        let len = ((hi - lo) / 2 + 1) as usize; // odd values lo, lo+2, ..
        block.clear();
        block.resize(len, false);
        for &p in base.iter().skip(1) {
            // first odd multiple of p that is >= lo
            let mut start = lo.next_multiple_of(p);
            if start % 2 == 0 {
                start += p;
            }
            if start > hi {
                continue;
            }
            let mut j = ((start - lo) / 2) as usize;
            while j < len {
                block[j] = true;
                j += p as usize;
            }
        }
        for (j, &c) in block.iter().enumerate() {
            if !c {
                primes.push(lo + 2 * j as u64);
            }
        }
        lo = hi + 2 - (hi % 2);
        if lo % 2 == 0 {
            lo += 1;
        }
    }
    primes
}

/// Integer square root (largest r with r*r <= n).
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// The ordered modulus system of a level: the first `k` primes and their
/// exact product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeBasis {
    primes: Vec<u64>,
    primorial: BigUint,
}

impl PrimeBasis {
    /// Basis of the first `k` primes.
    pub fn first_k(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::LevelTooSmall { min: 1, got: 0 });
        }
        let primes = first_n_primes(k);
        Ok(Self::from_primes(primes))
    }

    /// Basis associated with an even number `x`: exactly the primes `p` with
    /// `p^2 < x`. Integer arithmetic only, so there is no floating-point
    /// boundary to get wrong.
    pub fn for_even(x: u64) -> Result<Self> {
        if x < 6 || x % 2 != 0 {
            return Err(Error::InvalidEven(x));
        }
        // p^2 < x  <=>  p <= isqrt(x - 1)
        let bound = isqrt(x - 1);
        let primes = primes_up_to(bound.max(2))?;
        debug_assert!(primes.first() == Some(&2));
        Ok(Self::from_primes(primes))
    }

    fn from_primes(primes: Vec<u64>) -> Self {
        let primorial = primes.iter().map(|&p| BigUint::from(p)).product();
        PrimeBasis { primes, primorial }
    }

    pub fn k(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Prime at 1-based level `h`.
    pub fn prime(&self, h: usize) -> u64 {
        self.primes[h - 1]
    }

    /// Largest prime in the basis.
    pub fn last_prime(&self) -> u64 {
        *self.primes.last().expect("basis is never empty")
    }

    /// Exact product of all basis primes.
    pub fn primorial(&self) -> &BigUint {
        &self.primorial
    }

    /// Basis restricted to its first `h` levels.
    pub fn truncated(&self, h: usize) -> Result<Self> {
        if h == 0 || h > self.k() {
            return Err(Error::LevelTooSmall { min: 1, got: h });
        }
        Ok(Self::from_primes(self.primes[..h].to_vec()))
    }
}

/// Exact primorial of level `k` (product of the first `k` primes).
pub fn primorial(k: usize) -> Result<BigUint> {
    Ok(PrimeBasis::first_k(k)?.primorial().clone())
}

/// First `n` primes, ascending.
pub fn first_n_primes(n: usize) -> Vec<u64> {
    // Upper bound for the n-th prime: n (ln n + ln ln n) for n >= 6,
    // padded for small n.
    let bound = if n < 6 {
        13
    } else {
        let nf = n as f64;
        (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 16
    };
    let mut primes = primes_up_to(bound).expect("bound >= 13");
    while primes.len() < n {
        // The analytic bound cannot miss, but grow defensively anyway.
        primes = primes_up_to(bound * 2).expect("bound >= 13");
    }
    primes.truncate(n);
    primes
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigUint;

    #[test]
    fn primes_up_to_small_limits() {
        assert_eq!(primes_up_to(11).unwrap(), vec![2, 3, 5, 7, 11]);
        assert_eq!(primes_up_to(2).unwrap(), vec![2]);
        let up_to_150 = primes_up_to(150).unwrap();
        assert_eq!(up_to_150.len(), 35);
        assert_eq!(*up_to_150.last().unwrap(), 149);
    }

    #[test]
    fn primes_up_to_rejects_tiny_limit() {
        assert_eq!(primes_up_to(1), Err(Error::LimitTooSmall(1)));
    }

    #[test]
    fn segmented_agrees_with_plain() {
        // Force the segmented path on a small limit by calling it directly.
        let plain = sieve_plain(2_000_000);
        let seg = sieve_segmented(2_000_000);
        assert_eq!(plain, seg);
    }

    #[test]
    fn basis_for_even_examples() {
        let b = PrimeBasis::for_even(72).unwrap();
        assert_eq!(b.primes(), &[2, 3, 5, 7]);
        assert_eq!(b.k(), 4);

        let b = PrimeBasis::for_even(6).unwrap();
        assert_eq!(b.primes(), &[2]);

        let b = PrimeBasis::for_even(22202).unwrap();
        assert_eq!(b.k(), 35);
        assert_eq!(b.last_prime(), 149);
        // 22201 = 149^2 is excluded by the strict inequality.
        let b = PrimeBasis::for_even(22200).unwrap();
        assert_eq!(b.last_prime(), 139);
    }

    #[test]
    fn basis_for_even_rejects_bad_input() {
        assert!(PrimeBasis::for_even(7).is_err());
        assert!(PrimeBasis::for_even(4).is_err());
        assert!(PrimeBasis::for_even(0).is_err());
    }

    #[test]
    fn primorial_examples() {
        assert_eq!(primorial(4).unwrap(), BigUint::from(210u32));
        assert_eq!(primorial(5).unwrap(), BigUint::from(2310u32));
        assert_eq!(primorial(1).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn primorial_multiplicative_step() {
        let primes = first_n_primes(40);
        for k in 1..40 {
            let lhs = primorial(k + 1).unwrap();
            let rhs = primorial(k).unwrap() * BigUint::from(primes[k]);
            assert_eq!(lhs, rhs, "step k={k}");
        }
    }

    #[test]
    fn basis_matches_trial_division() {
        let trial_primes = |x: u64| -> Vec<u64> {
            (2..x)
                .take_while(|p| p * p < x)
                .filter(|&p| (2..p).all(|d| p % d != 0))
                .collect()
        };
        for x in (6..2000u64).step_by(2) {
            assert_eq!(PrimeBasis::for_even(x).unwrap().primes(), trial_primes(x), "x={x}");
        }
        // spot checks near the top of the verified range
        for x in [10_000u64, 250_000, 999_998, 1_000_000] {
            assert_eq!(PrimeBasis::for_even(x).unwrap().primes(), trial_primes(x), "x={x}");
        }
    }

    #[test]
    fn isqrt_exact_on_squares_and_neighbors() {
        for r in [0u64, 1, 2, 3, 148, 149, 150, 65535, 4_000_000_000] {
            let s = r * r;
            assert_eq!(isqrt(s), r);
            if s > 0 {
                assert_eq!(isqrt(s - 1), r - 1);
            }
            assert_eq!(isqrt(s + 2 * r), r);
            assert_eq!(isqrt(s + 2 * r + 1), r + 1);
        }
    }
}
