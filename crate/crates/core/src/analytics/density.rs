//! Exact closed-form density quantities.
//!
//! All values that involve the period are exact arbitrary-precision
//! rationals. Float views are derived from the rational and never feed back
//! into computation; the asymptotic ratio trio is evaluated in log space so
//! very large periods cannot overflow.

use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm_sieve::IntervalSpec;
use crate::prime_basis::{first_n_primes, PrimeBasis};

/// Exact rational with a derived 64-bit float view. Comparisons and
/// arithmetic always use the rational form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DensityValue(BigRational);

impl DensityValue {
    pub fn from_ratio(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "density denominator must be nonzero");
        DensityValue(BigRational::new(num, den))
    }

    pub fn from_rational(r: BigRational) -> Self {
        DensityValue(r)
    }

    pub fn zero() -> Self {
        DensityValue(BigRational::zero())
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    /// Nearest 64-bit float. Falls back to exponent arithmetic when the
    /// parts individually overflow `f64`.
    pub fn to_f64(&self) -> f64 {
        if let Some(f) = self.0.to_f64() {
            if f.is_finite() {
                return f;
            }
        }
        let num = self.0.numer();
        let den = self.0.denom();
        if num.is_zero() {
            return 0.0;
        }
        let sign = if num.is_negative() { -1.0 } else { 1.0 };
        let log2 = big_log2(num.magnitude()) - big_log2(den.magnitude());
        sign * log2.exp2()
    }
}

fn big_log2(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("fits in f64").log2();
    }
    let top = (n >> (bits - 53)).to_f64().expect("53 bits fit");
    top.log2() + (bits - 53) as f64
}

// Wire form: {"num","den","float"} with the exact parts as decimal strings.

#[derive(Serialize, Deserialize)]
struct DensityWire {
    num: String,
    den: String,
    float: f64,
}

impl Serialize for DensityValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DensityWire {
            num: self.numerator().to_string(),
            den: self.denominator().to_string(),
            float: self.to_f64(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = DensityWire::deserialize(deserializer)?;
        let num: BigInt = wire.num.parse().map_err(D::Error::custom)?;
        let den: BigInt = wire.den.parse().map_err(D::Error::custom)?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(DensityValue::from_ratio(num, den))
    }
}

fn big(u: u64) -> BigInt {
    BigInt::from(u)
}

/// Permitted count per period: `(p_1 - 1)(p_2 - 2)...(p_k - 2)`.
pub fn c_closed(k: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::LevelTooSmall { min: 1, got: 0 });
    }
    let primes = first_n_primes(k);
    Ok(primes
        .iter()
        .enumerate()
        .map(|(i, &p)| BigUint::from(p - if i == 0 { 1 } else { 2 }))
        .product())
}

/// Density within a full period: `c_k / (m_k / p_k)`, exact.
pub fn delta_period(k: usize) -> Result<DensityValue> {
    let basis = PrimeBasis::first_k(k)?;
    let c = c_closed(k)?;
    let num = BigInt::from(c * basis.last_prime());
    let den = BigInt::from(basis.primorial().clone());
    Ok(DensityValue::from_ratio(num, den))
}

/// Gap defect of the transition at level `k >= 2`: `p_{k+1} - p_k - 2`.
pub fn theta(k: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::LevelTooSmall { min: 2, got: k });
    }
    let primes = first_n_primes(k + 1);
    Ok(primes[k] - primes[k - 1] - 2)
}

/// The period density rewritten as the telescoped product
/// `(1/2) * prod_{j=2}^{k-1} (p_j + theta_j) / p_j`, exact. Agrees with
/// [`delta_period`] as a rational identity.
pub fn delta_product_form(k: usize) -> Result<DensityValue> {
    if k < 2 {
        return Err(Error::LevelTooSmall { min: 2, got: k });
    }
    let primes = first_n_primes(k);
    let mut num = BigInt::one();
    let mut den = big(2);
    for j in 2..k {
        let p_j = primes[j - 1];
        let p_next = primes[j];
        num *= big(p_j + (p_next - p_j - 2));
        den *= big(p_j);
    }
    Ok(DensityValue::from_ratio(num, den))
}

/// Measured density of a count over an interval: `count * p_k / |I|`.
pub fn interval_density(count: u64, interval: IntervalSpec, p_k: u64) -> DensityValue {
    DensityValue::from_ratio(big(count) * big(p_k), big(interval.size()))
}

/// Log-space evaluations of `c_k / m_k`, `p_k^2 / c_k`, `p_k^2 / m_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRatios {
    pub c_over_m: f64,
    pub pk2_over_c: f64,
    pub pk2_over_m: f64,
}

pub fn asymptotic_ratios(k: usize) -> Result<AsymptoticRatios> {
    if k == 0 {
        return Err(Error::LevelTooSmall { min: 1, got: 0 });
    }
    let primes = first_n_primes(k);
    let mut log_c = 0.0f64;
    let mut log_m = 0.0f64;
    for (i, &p) in primes.iter().enumerate() {
        log_c += ((p - if i == 0 { 1 } else { 2 }) as f64).ln();
        log_m += (p as f64).ln();
    }
    let log_pk2 = 2.0 * (primes[k - 1] as f64).ln();
    Ok(AsymptoticRatios {
        c_over_m: (log_c - log_m).exp(),
        pk2_over_c: (log_pk2 - log_c).exp(),
        pk2_over_m: (log_pk2 - log_m).exp(),
    })
}

/// Exact rational counterparts of [`asymptotic_ratios`].
pub fn exact_asymptotic_ratios(k: usize) -> Result<(DensityValue, DensityValue, DensityValue)> {
    let basis = PrimeBasis::first_k(k)?;
    let c = BigInt::from(c_closed(k)?);
    let m = BigInt::from(basis.primorial().clone());
    let pk2 = big(basis.last_prime() * basis.last_prime());
    Ok((
        DensityValue::from_ratio(c.clone(), m.clone()),
        DensityValue::from_ratio(pk2.clone(), c),
        DensityValue::from_ratio(pk2, m),
    ))
}
