//! Interval sandwiches, the left/right split of a period, and the density
//! bijection between the two sides.

use num::{BigInt, BigRational, BigUint, One};

use crate::analytics::density::{c_closed, delta_period, DensityValue};
use crate::error::{Error, Result};
use crate::perm_sieve::{count_permitted, IntervalSpec};
use crate::prime_basis::PrimeBasis;
use crate::selection::{SchemeKind, SelectionScheme};

/// Above this period size the right-side count is derived by period
/// arithmetic instead of a direct second sieve pass.
const DIRECT_RIGHT_COUNT_LIMIT: u64 = 10_000_000;

fn big(u: u64) -> BigInt {
    BigInt::from(u)
}

/// Lower and upper sandwich for the measured density over `[1, n]` at level
/// `k > 2`, in terms of `q = floor(n / m_k)`:
///
/// `(q m) / (q m + m - 1) * delta_k  <  delta^I  <  (q + 1) m / (q m + 1) * delta_k`
pub fn interval_density_bounds(k: usize, n: u64) -> Result<(DensityValue, DensityValue)> {
    if k <= 2 {
        return Err(Error::LevelTooSmallForBounds(k));
    }
    if n < 1 {
        return Err(Error::InvalidInterval { lo: 1, hi: n });
    }
    let m = BigInt::from(PrimeBasis::first_k(k)?.primorial().clone());
    let q = big(n) / &m;
    let qm = &q * &m;
    let delta = delta_period(k)?;
    let lower = BigRational::new(qm.clone(), &qm + &m - BigInt::one()) * delta.ratio();
    let upper = BigRational::new((&q + BigInt::one()) * &m, &qm + BigInt::one()) * delta.ratio();
    Ok((
        DensityValue::from_rational(lower),
        DensityValue::from_rational(upper),
    ))
}

/// Counts and densities of a level-`h` scheme over the two sides of the
/// level-`k` frame: left `[1, p_k^2]`, right `[p_k^2 + 1, m_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftRightSplit {
    pub left_count: u64,
    pub right_count: BigUint,
    pub left_density: DensityValue,
    pub right_density: DensityValue,
}

/// Split a generic scheme against the frame of level `k >= scheme.k()`.
/// The total over `[1, m_k]` is scheme-independent, so the right-side count
/// follows by period arithmetic; for small periods it is also counted
/// directly and the two must agree.
pub fn split_left_right(scheme: &SelectionScheme, k: usize) -> Result<LeftRightSplit> {
    if scheme.kind() != SchemeKind::Generic {
        return Err(Error::NotGeneric);
    }
    let h = scheme.k();
    if h > k {
        return Err(Error::ReferenceLevelOutOfRange { h, k });
    }
    let frame = PrimeBasis::first_k(k)?;
    let p_k = frame.last_prime();
    let pk2 = p_k * p_k;
    let m_k = frame.primorial().clone();
    if m_k <= BigUint::from(pk2) {
        return Err(Error::SplitLevelTooSmall(k));
    }

    let p_h = scheme.basis().last_prime();
    let left_iv = IntervalSpec::new(1, pk2).expect("pk2 >= 1");
    let left_count = count_permitted(scheme, left_iv);

    // permitted count of the level-h scheme over [1, m_k]:
    // c_h * (m_k / m_h), exact by periodicity
    let tail = &m_k / scheme.basis().primorial();
    let total = c_closed(h)? * &tail;
    let right_count = &total - BigUint::from(left_count);

    if let Some(m_small) = to_u64(&m_k) {
        if m_small <= DIRECT_RIGHT_COUNT_LIMIT {
            let right_iv = IntervalSpec::new(pk2 + 1, m_small).expect("m_k > pk2");
            let direct = count_permitted(scheme, right_iv);
            assert_eq!(
                BigUint::from(direct),
                right_count,
                "left/right conservation failed for the level-{h} scheme in frame k={k}"
            );
        }
    }

    let left_density = DensityValue::from_ratio(big(left_count) * big(p_h), big(pk2));
    let right_size = BigInt::from(m_k) - big(pk2);
    let right_density = DensityValue::from_ratio(
        BigInt::from(right_count.clone()) * big(p_h),
        right_size,
    );
    Ok(LeftRightSplit {
        left_count,
        right_count,
        left_density,
        right_density,
    })
}

fn to_u64(n: &BigUint) -> Option<u64> {
    let digits = n.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => Some(digits[0]),
        _ => None,
    }
}

/// The left-to-right density bijection of the level-`k` frame at reference
/// level `h <= k`:
///
/// `f_h(x) = delta_h - (x - delta_h) * p_k^2 / (m_k - p_k^2)`
pub fn bijection_left_to_right(h: usize, k: usize, x: &DensityValue) -> Result<DensityValue> {
    let (delta_h, pk2, m_minus) = frame_parts(h, k)?;
    let scale = BigRational::new(pk2, m_minus);
    let out = delta_h.ratio() - (x.ratio() - delta_h.ratio()) * scale;
    Ok(DensityValue::from_rational(out))
}

/// Inverse of [`bijection_left_to_right`]:
/// `f_h^{-1}(x) = delta_h + (delta_h - x) * (m_k - p_k^2) / p_k^2`
pub fn bijection_right_to_left(h: usize, k: usize, x: &DensityValue) -> Result<DensityValue> {
    let (delta_h, pk2, m_minus) = frame_parts(h, k)?;
    let scale = BigRational::new(m_minus, pk2);
    let out = delta_h.ratio() + (delta_h.ratio() - x.ratio()) * scale;
    Ok(DensityValue::from_rational(out))
}

fn frame_parts(h: usize, k: usize) -> Result<(DensityValue, BigInt, BigInt)> {
    if h == 0 || h > k {
        return Err(Error::ReferenceLevelOutOfRange { h, k });
    }
    let frame = PrimeBasis::first_k(k)?;
    let p_k = frame.last_prime();
    let pk2 = big(p_k * p_k);
    let m = BigInt::from(frame.primorial().clone());
    if m <= pk2 {
        return Err(Error::SplitLevelTooSmall(k));
    }
    Ok((delta_period(h)?, pk2.clone(), m - pk2))
}

/// Exact evaluation of the right-interval density envelope at reference
/// level `h` of the level-`k` frame:
///
/// `delta_h (1 - p_k^2/(c_h p_{h+1}..p_k)) / (1 - p_k^2/m_k)
///      <= delta_h^R <= delta_h / (1 - p_k^2/m_k)`
///
/// The lower bound is clamped at zero where the formula goes negative
/// (densities are nonnegative by definition).
pub fn right_density_bounds(h: usize, k: usize) -> Result<(DensityValue, DensityValue)> {
    if h == 0 || h > k {
        return Err(Error::ReferenceLevelOutOfRange { h, k });
    }
    let frame = PrimeBasis::first_k(k)?;
    let p_k = frame.last_prime();
    let pk2 = BigRational::from_integer(big(p_k * p_k));
    let m = BigRational::from_integer(BigInt::from(frame.primorial().clone()));
    if m <= pk2 {
        return Err(Error::SplitLevelTooSmall(k));
    }
    let delta_h = delta_period(h)?;

    // c_h * p_{h+1} p_{h+2} ... p_k
    let tail: BigUint = frame.primes()[h..].iter().map(|&p| BigUint::from(p)).product();
    let reach = BigRational::from_integer(BigInt::from(c_closed(h)? * tail));

    let one = BigRational::one();
    let denom = &one - &pk2 / &m;
    let lower_raw = delta_h.ratio() * (&one - &pk2 / reach) / &denom;
    let lower = if lower_raw < BigRational::from_integer(BigInt::from(0u32)) {
        BigRational::from_integer(BigInt::from(0u32))
    } else {
        lower_raw
    };
    let upper = delta_h.ratio() / denom;
    Ok((
        DensityValue::from_rational(lower),
        DensityValue::from_rational(upper),
    ))
}
