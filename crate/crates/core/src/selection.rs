//! Selection schemes: which residues disqualify an index at each level.
//!
//! A generic scheme selects one residue at level 1 and two distinct residues
//! at every higher level. The scheme associated with an even number `x`
//! selects `0` and `x mod p_h` at each level (one residue when `p_h` divides
//! `x`). Type A and Type B steps walk the combination space of generic
//! schemes; together they generate all `nu_h = p_h (p_h - 1) / 2` residue
//! pairs of a level.
//!
//! Sampling uses `ChaCha12Rng` keyed as `(seed, draw index)` via the stream
//! counter, so any draw is reproducible in isolation. Reproducibility is
//! guaranteed within this implementation, not across implementations.

use std::cmp::Ordering;
use std::sync::Arc;

use arrayvec::ArrayVec;
use num::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prime_basis::{first_n_primes, PrimeBasis};

/// Residues selected at one level, sorted ascending. Never more than two.
pub type LevelResidues = ArrayVec<u32, 2>;

/// Default refusal threshold for exhaustive walks of the combination space.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Generic,
    EvenAssociated { x: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionScheme {
    basis: Arc<PrimeBasis>,
    selected: Vec<LevelResidues>,
    kind: SchemeKind,
}

impl SelectionScheme {
    /// Validated generic scheme: level 1 holds exactly one residue, every
    /// deeper level exactly two distinct residues, all within range.
    pub fn generic(
        basis: impl Into<Arc<PrimeBasis>>,
        residues: &[Vec<u32>],
    ) -> Result<Self> {
        let basis = basis.into();
        if residues.len() != basis.k() {
            return Err(Error::LevelCountMismatch {
                expected: basis.k(),
                got: residues.len(),
            });
        }
        let mut selected = Vec::with_capacity(residues.len());
        for (i, level) in residues.iter().enumerate() {
            let h = i + 1;
            let expected = if h == 1 { 1 } else { 2 };
            if level.len() != expected {
                return Err(Error::WrongResidueCount {
                    level: h,
                    expected,
                    got: level.len(),
                });
            }
            selected.push(checked_level(level, h, basis.prime(h))?);
        }
        Ok(SelectionScheme {
            basis,
            selected,
            kind: SchemeKind::Generic,
        })
    }

    /// Scheme associated with the even number `x`: selects `0` and
    /// `x mod p_h` at every level of the basis for `x`.
    pub fn for_even(x: u64) -> Result<Self> {
        let basis = PrimeBasis::for_even(x)?;
        let selected = basis
            .primes()
            .iter()
            .map(|&p| {
                let b = (x % p) as u32;
                let mut level = LevelResidues::new();
                level.push(0);
                if b != 0 {
                    level.push(b);
                }
                level
            })
            .collect();
        Ok(SelectionScheme {
            basis: Arc::new(basis),
            selected,
            kind: SchemeKind::EvenAssociated { x },
        })
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn basis(&self) -> &PrimeBasis {
        &self.basis
    }

    pub fn k(&self) -> usize {
        self.basis.k()
    }

    /// Residues selected at 1-based level `h`.
    pub fn selected(&self, h: usize) -> &[u32] {
        &self.selected[h - 1]
    }

    /// Iterator over `(prime, selected residues)` pairs, level order.
    pub fn levels(&self) -> impl Iterator<Item = (u64, &[u32])> {
        self.basis
            .primes()
            .iter()
            .zip(&self.selected)
            .map(|(&p, r)| (p, r.as_slice()))
    }

    /// Both residues at level `h` shifted by one (the single residue when
    /// `h = 1`). Generic schemes only.
    pub fn type_a_step(&self, h: usize) -> Result<Self> {
        self.require_generic()?;
        self.check_level(h)?;
        let p = self.basis.prime(h) as u32;
        let mut next = self.clone();
        let level = &mut next.selected[h - 1];
        for r in level.iter_mut() {
            *r = (*r + 1) % p;
        }
        sort_level(level);
        Ok(next)
    }

    /// Shift the non-fixed residue at level `h` by `direction`, holding
    /// `fixed` still. Refuses the step if the move would land on `fixed`.
    pub fn type_b_step(&self, h: usize, fixed: u32, direction: StepDirection) -> Result<Self> {
        self.require_generic()?;
        self.check_level(h)?;
        if h == 1 {
            return Err(Error::LevelTooSmall { min: 2, got: 1 });
        }
        let p = self.basis.prime(h) as u32;
        let level = &self.selected[h - 1];
        let moving = match level.iter().position(|&r| r == fixed) {
            Some(i) => level[1 - i],
            None => {
                return Err(Error::ResidueOutOfRange {
                    level: h,
                    residue: fixed,
                    modulus: self.basis.prime(h),
                })
            }
        };
        let moved = match direction {
            StepDirection::Up => (moving + 1) % p,
            StepDirection::Down => (moving + p - 1) % p,
        };
        if moved == fixed {
            return Err(Error::StepBlocked { level: h, fixed });
        }
        let mut next = self.clone();
        let level = &mut next.selected[h - 1];
        let mut fresh = LevelResidues::new();
        fresh.push(fixed);
        fresh.push(moved);
        sort_level(&mut fresh);
        *level = fresh;
        Ok(next)
    }

    /// Generic scheme restricted to its first `h` levels. The truncation of
    /// a level-`k` scheme is one of the level-`h` schemes, which is what the
    /// left/right analytics at reference levels need.
    pub fn truncated(&self, h: usize) -> Result<Self> {
        self.require_generic()?;
        self.check_level(h)?;
        Ok(SelectionScheme {
            basis: Arc::new(self.basis.truncated(h)?),
            selected: self.selected[..h].to_vec(),
            kind: SchemeKind::Generic,
        })
    }

    /// Total order on schemes over the same basis; used for deterministic
    /// tie-breaks in parallel reductions.
    pub fn cmp_selected(&self, other: &Self) -> Ordering {
        self.selected.cmp(&other.selected)
    }

    fn require_generic(&self) -> Result<()> {
        match self.kind {
            SchemeKind::Generic => Ok(()),
            SchemeKind::EvenAssociated { .. } => Err(Error::NotGeneric),
        }
    }

    fn check_level(&self, h: usize) -> Result<()> {
        if h == 0 || h > self.k() {
            return Err(Error::LevelTooSmall { min: 1, got: h });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDirection {
    Up,
    Down,
}

fn sort_level(level: &mut LevelResidues) {
    if level.len() == 2 && level[0] > level[1] {
        level.swap(0, 1);
    }
}

fn checked_level(residues: &[u32], h: usize, p: u64) -> Result<LevelResidues> {
    let mut level = LevelResidues::new();
    for &r in residues {
        if u64::from(r) >= p {
            return Err(Error::ResidueOutOfRange {
                level: h,
                residue: r,
                modulus: p,
            });
        }
        if level.contains(&r) {
            return Err(Error::DuplicateResidue { level: h, residue: r });
        }
        level.push(r);
    }
    sort_level(&mut level);
    Ok(level)
}

/// Combinations of selected residues at a single level:
/// `nu_1 = 2`, `nu_h = p_h (p_h - 1) / 2` for `h > 1`.
pub fn level_combinations(h: usize, p: u64) -> u64 {
    if h == 1 {
        2
    } else {
        p * (p - 1) / 2
    }
}

/// Exact number of combinations over all levels of the first `k` primes.
pub fn combination_count(k: usize) -> Result<BigUint> {
    let basis = PrimeBasis::first_k(k)?;
    Ok(basis
        .primes()
        .iter()
        .enumerate()
        .map(|(i, &p)| BigUint::from(level_combinations(i + 1, p)))
        .product())
}

/// How schemes are drawn from the combination space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeStrategy {
    /// Every combination exactly once, odometer order: level 1 is the most
    /// significant digit, deeper levels tick faster, residue pairs in
    /// lexicographic order.
    Exhaustive,
    /// `count` independent uniform draws, reproducible from `(seed, index)`.
    Sample { count: u64, seed: u64 },
}

/// Generic scheme at `index` in odometer order. `index` must be below the
/// total combination count.
pub fn generic_scheme_at(basis: &Arc<PrimeBasis>, index: u64) -> SelectionScheme {
    let k = basis.k();
    let mut digits = vec![0u64; k];
    let mut rest = index;
    for h in (1..=k).rev() {
        let nu = level_combinations(h, basis.prime(h));
        digits[h - 1] = rest % nu;
        rest /= nu;
    }
    debug_assert_eq!(rest, 0, "index out of range");
    let selected = digits
        .iter()
        .enumerate()
        .map(|(i, &d)| level_from_combo_index(i + 1, basis.prime(i + 1), d))
        .collect();
    SelectionScheme {
        basis: Arc::clone(basis),
        selected,
        kind: SchemeKind::Generic,
    }
}

/// Uniform independent draw number `draw` for the given seed.
pub fn sampled_scheme(basis: &Arc<PrimeBasis>, seed: u64, draw: u64) -> SelectionScheme {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    let selected = basis
        .primes()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut level = LevelResidues::new();
            if i == 0 {
                level.push(rng.gen_range(0..2u32));
            } else {
                let a = rng.gen_range(0..p as u32);
                let mut b = rng.gen_range(0..p as u32 - 1);
                if b >= a {
                    b += 1;
                }
                level.push(a);
                level.push(b);
                sort_level(&mut level);
            }
            level
        })
        .collect();
    SelectionScheme {
        basis: Arc::clone(basis),
        selected,
        kind: SchemeKind::Generic,
    }
}

/// Pair (or level-1 slot) number `combo` of a level, lexicographic order.
fn level_from_combo_index(h: usize, p: u64, combo: u64) -> LevelResidues {
    let mut level = LevelResidues::new();
    if h == 1 {
        level.push(combo as u32);
        return level;
    }
    let p = p as u32;
    let mut a = 0u32;
    let mut rest = combo;
    loop {
        let span = u64::from(p - 1 - a);
        if rest < span {
            level.push(a);
            level.push(a + 1 + rest as u32);
            return level;
        }
        rest -= span;
        a += 1;
    }
}

/// Stream of generic schemes under the chosen strategy. Exhaustive mode is
/// refused (with the exact combination count) when it exceeds `cap`.
#[derive(Debug)]
pub struct SchemeIter {
    basis: Arc<PrimeBasis>,
    mode: IterMode,
    next: u64,
    total: u64,
}

#[derive(Debug)]
enum IterMode {
    Exhaustive,
    Sample { seed: u64 },
}

pub fn scheme_iterator(
    basis: impl Into<Arc<PrimeBasis>>,
    strategy: SchemeStrategy,
    cap: u64,
) -> Result<SchemeIter> {
    let basis = basis.into();
    match strategy {
        SchemeStrategy::Exhaustive => {
            let total = exhaustive_total(&basis, cap)?;
            Ok(SchemeIter {
                basis,
                mode: IterMode::Exhaustive,
                next: 0,
                total,
            })
        }
        SchemeStrategy::Sample { count, seed } => Ok(SchemeIter {
            basis,
            mode: IterMode::Sample { seed },
            next: 0,
            total: count,
        }),
    }
}

/// Exhaustive size check: exact `N_k` versus the cap.
pub fn exhaustive_total(basis: &PrimeBasis, cap: u64) -> Result<u64> {
    let combinations: BigUint = basis
        .primes()
        .iter()
        .enumerate()
        .map(|(i, &p)| BigUint::from(level_combinations(i + 1, p)))
        .product();
    if combinations > BigUint::from(cap) {
        return Err(Error::CombinationCapExceeded { combinations, cap });
    }
    let digits = combinations.to_u64_digits();
    Ok(digits.first().copied().unwrap_or(0))
}

impl Iterator for SchemeIter {
    type Item = SelectionScheme;

    fn next(&mut self) -> Option<SelectionScheme> {
        if self.next >= self.total {
            return None;
        }
        let i = self.next;
        self.next += 1;
        Some(match self.mode {
            IterMode::Exhaustive => generic_scheme_at(&self.basis, i),
            IterMode::Sample { seed } => sampled_scheme(&self.basis, seed, i),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

// Canonical wire form: {"kind","x"?,"primes","selected"}, residues sorted.

#[derive(Serialize)]
struct SchemeWire<'a> {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<u64>,
    primes: &'a [u64],
    selected: Vec<&'a [u32]>,
}

#[derive(Deserialize)]
struct SchemeWireOwned {
    kind: String,
    #[serde(default)]
    x: Option<u64>,
    primes: Vec<u64>,
    selected: Vec<Vec<u32>>,
}

impl Serialize for SelectionScheme {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (kind, x) = match self.kind {
            SchemeKind::Generic => ("generic", None),
            SchemeKind::EvenAssociated { x } => ("even", Some(x)),
        };
        SchemeWire {
            kind,
            x,
            primes: self.basis.primes(),
            selected: self.selected.iter().map(|l| l.as_slice()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SelectionScheme {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = SchemeWireOwned::deserialize(deserializer)?;
        let scheme = match wire.kind.as_str() {
            "generic" => {
                let k = wire.primes.len();
                if wire.primes != first_n_primes(k) {
                    return Err(D::Error::custom(
                        "primes must be exactly the first k primes",
                    ));
                }
                let basis = PrimeBasis::first_k(k).map_err(D::Error::custom)?;
                SelectionScheme::generic(basis, &wire.selected).map_err(D::Error::custom)?
            }
            "even" => {
                let x = wire
                    .x
                    .ok_or_else(|| D::Error::custom("even scheme requires \"x\""))?;
                let scheme = SelectionScheme::for_even(x).map_err(D::Error::custom)?;
                if scheme.basis.primes() != wire.primes {
                    return Err(D::Error::custom("primes do not match the basis for x"));
                }
                let declared: Vec<Vec<u32>> = wire
                    .selected
                    .iter()
                    .map(|l| {
                        let mut l = l.clone();
                        l.sort_unstable();
                        l
                    })
                    .collect();
                let actual: Vec<Vec<u32>> =
                    scheme.selected.iter().map(|l| l.to_vec()).collect();
                if declared != actual {
                    return Err(D::Error::custom(
                        "selected residues do not match the scheme for x",
                    ));
                }
                scheme
            }
            other => return Err(D::Error::custom(format!("unknown scheme kind {other:?}"))),
        };
        Ok(scheme)
    }
}
